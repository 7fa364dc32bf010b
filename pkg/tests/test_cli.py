import json

import pytest

from convtab.cli import main
from convtab.synthetic import SyntheticSpec, gen_synthetic, write_corpus

from conftest import OLYMPICS_CSV


@pytest.fixture
def table_file(tmp_path):
    path = tmp_path / "olympics.csv"
    path.write_text(OLYMPICS_CSV, encoding="utf-8")
    return path


@pytest.fixture
def corpus_dir(tmp_path):
    out = tmp_path / "corpus"
    write_corpus(gen_synthetic(SyntheticSpec(n_tables=12, seed=4)), out)
    return out


def test_no_command_is_usage_error(capsys):
    assert main([]) == 1
    assert "error:" in capsys.readouterr().err


def test_unknown_command_is_usage_error():
    assert main(["frobnicate"]) == 1


def test_missing_required_argument():
    assert main(["parse", "--table", "x.csv"]) == 1  # no --question


def test_missing_table_file_is_data_error(capsys):
    assert main(["parse", "--table", "/nonexistent.csv",
                 "--question", "which city?"]) == 2
    assert "error:" in capsys.readouterr().err


def test_parse_outputs_lf_and_answer(table_file, capsys, monkeypatch):
    monkeypatch.delenv("CAMP_MODEL", raising=False)
    assert main(["parse", "--table", str(table_file),
                 "--question", "which City hosted in 2008 ?"]) == 0
    out = capsys.readouterr().out
    assert "SELECT" in out


def test_gen_search_train_eval_round_trip(corpus_dir, tmp_path, capsys,
                                          monkeypatch):
    monkeypatch.delenv("CAMP_MODEL", raising=False)
    data = corpus_dir / "conversations.jsonl"
    labels = tmp_path / "labels.jsonl"
    model = tmp_path / "model.json"

    assert main(["search-labels", "--data", str(data),
                 "--out", str(labels), "--report"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["overall"] == 100.0
    assert labels.exists()

    assert main(["train", "--labels", str(labels), "--data", str(data),
                 "--out", str(model), "--epochs", "8"]) == 0
    saved = json.loads(model.read_text())
    assert saved["version"] and "heads" in saved
    capsys.readouterr()

    assert main(["eval", "--data", str(data), "--model", str(model),
                 "--json", str(tmp_path / "metrics.json")]) == 0
    out = capsys.readouterr().out
    assert "All" in out and "Seq" in out
    metrics = json.loads((tmp_path / "metrics.json").read_text())
    assert metrics["all"] >= 70.0


def test_gen_synthetic_command(tmp_path, capsys):
    out_dir = tmp_path / "gen"
    assert main(["gen-synthetic", "--out-dir", str(out_dir),
                 "--n-tables", "3", "--seed", "1"]) == 0
    assert (out_dir / "conversations.jsonl").exists()
    assert (out_dir / "gold.jsonl").exists()
    assert "3 conversations" in capsys.readouterr().out


def test_model_env_override(table_file, tmp_path, capsys, monkeypatch):
    from convtab.scorer import ModelWeights

    path = tmp_path / "env-model.json"
    ModelWeights.zero().save(path)
    monkeypatch.setenv("CAMP_MODEL", str(path))
    assert main(["parse", "--table", str(table_file),
                 "--question", "show all City entries ."]) == 0
    monkeypatch.setenv("CAMP_MODEL", str(tmp_path / "missing.json"))
    assert main(["parse", "--table", str(table_file),
                 "--question", "show all City entries ."]) == 2


def test_bad_labels_file_is_data_error(tmp_path, table_file, capsys):
    labels = tmp_path / "bad.jsonl"
    labels.write_text("{invalid json\n", encoding="utf-8")
    data = tmp_path / "conv.jsonl"
    data.write_text(json.dumps({"tableFile": "olympics.csv", "turns": []}) + "\n",
                    encoding="utf-8")
    assert main(["train", "--labels", str(labels), "--data", str(data),
                 "--out", str(tmp_path / "m.json")]) == 2
