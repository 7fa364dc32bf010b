import json

import pytest

from convtab.datasets import load_conversations_jsonl, load_sqa_tsv
from convtab.errors import MalformedRowError, MissingTableFileError

from conftest import OLYMPICS_CSV


def _write_jsonl(tmp_path, records):
    path = tmp_path / "conversations.jsonl"
    path.write_text("\n".join(json.dumps(r) for r in records) + "\n",
                    encoding="utf-8")
    return path


def test_load_jsonl(tmp_path):
    (tmp_path / "olympics.csv").write_text(OLYMPICS_CSV, encoding="utf-8")
    path = _write_jsonl(tmp_path, [
        {"id": "c1", "tableFile": "olympics.csv",
         "turns": [{"question": "which city?", "answers": ["Beijing"]}]},
        {"id": "c2", "tableFile": "olympics.csv",
         "turns": [{"question": "what year?", "answers": ["2008"]}]},
    ])
    convs = load_conversations_jsonl(path)
    assert [c["id"] for c in convs] == ["c1", "c2"]
    assert convs[0]["turns"][0]["answers"] == ["Beijing"]
    # The shared table is loaded once.
    assert convs[0]["table"] is convs[1]["table"]
    assert convs[0]["table"].id == "olympics.csv"


def test_load_jsonl_skips_blank_lines(tmp_path):
    (tmp_path / "t.csv").write_text("A\n1\n", encoding="utf-8")
    path = tmp_path / "conversations.jsonl"
    path.write_text('\n{"tableFile": "t.csv", "turns": []}\n\n',
                    encoding="utf-8")
    assert len(load_conversations_jsonl(path)) == 1


def test_load_jsonl_missing_table(tmp_path):
    path = _write_jsonl(tmp_path, [{"tableFile": "absent.csv", "turns": []}])
    with pytest.raises(MissingTableFileError):
        load_conversations_jsonl(path)


def test_load_jsonl_malformed(tmp_path):
    path = tmp_path / "conversations.jsonl"
    path.write_text("not json\n", encoding="utf-8")
    with pytest.raises(MalformedRowError) as err:
        load_conversations_jsonl(path)
    assert err.value.line == 1

    path.write_text('{"turns": []}\n', encoding="utf-8")
    with pytest.raises(MalformedRowError):
        load_conversations_jsonl(path)


SQA_HEADER = "id\tannotator\tposition\tquestion\ttable_file\tanswer_text\n"


def _write_sqa(tmp_path, rows, header=SQA_HEADER):
    (tmp_path / "table.csv").write_text(OLYMPICS_CSV, encoding="utf-8")
    path = tmp_path / "test.tsv"
    path.write_text(header + "".join(rows), encoding="utf-8")
    return path


def test_load_sqa_groups_and_orders(tmp_path):
    path = _write_sqa(tmp_path, [
        "q1\t0\t1\tfirst?\ttable.csv\t['Beijing']\n",
        "q1\t1\t0\tother annotator?\ttable.csv\tAthens|London\n",
        "q1\t0\t0\tzeroth?\ttable.csv\t['2008']\n",
    ])
    convs = load_sqa_tsv(path)
    assert [c["id"] for c in convs] == ["q1-0", "q1-1"]
    first = convs[0]
    assert [t["question"] for t in first["turns"]] == ["zeroth?", "first?"]
    assert first["turns"][0]["answers"] == ["2008"]
    assert convs[1]["turns"][0]["answers"] == ["Athens", "London"]
    assert first["table"].id == "table.csv"


def test_load_sqa_tolerates_column_reorder(tmp_path):
    (tmp_path / "table.csv").write_text(OLYMPICS_CSV, encoding="utf-8")
    path = tmp_path / "test.tsv"
    path.write_text(
        "position\tid\tannotator\tanswer_text\ttable_file\tquestion\n"
        "0\tq\t0\t['Beijing']\ttable.csv\twhich city?\n",
        encoding="utf-8")
    convs = load_sqa_tsv(path)
    assert convs[0]["turns"][0]["question"] == "which city?"


def test_load_sqa_missing_column(tmp_path):
    path = _write_sqa(tmp_path, [], header="id\tannotator\tposition\n")
    with pytest.raises(MalformedRowError):
        load_sqa_tsv(path)


def test_load_sqa_bad_answer_literal(tmp_path):
    path = _write_sqa(tmp_path, ["q\t0\t0\tx?\ttable.csv\t['unclosed\n"])
    with pytest.raises(MalformedRowError):
        load_sqa_tsv(path)


def test_load_sqa_missing_table(tmp_path):
    path = _write_sqa(tmp_path, ["q\t0\t0\tx?\tgone.csv\t['a']\n"])
    with pytest.raises(MissingTableFileError):
        load_sqa_tsv(path)
