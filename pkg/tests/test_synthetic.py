import json

import pytest

from convtab.executor import MatchKind, denotation_matches, execute
from convtab.logical_form import SketchId, render, sketch_of
from convtab.search import SearchConfig, coverage_report, search_labels
from convtab.synthetic import SyntheticSpec, gen_synthetic, write_corpus


def test_spec_validation():
    with pytest.raises(ValueError):
        SyntheticSpec(row_range=(5, 3))
    with pytest.raises(ValueError):
        SyntheticSpec(copy_turn_fraction=1.5)


def test_generation_deterministic():
    spec = SyntheticSpec(n_tables=5, seed=7)
    a = gen_synthetic(spec)
    b = gen_synthetic(spec)
    assert [c["id"] for c in a] == [c["id"] for c in b]
    for ca, cb in zip(a, b):
        assert [t["question"] for t in ca["turns"]] == \
               [t["question"] for t in cb["turns"]]
        assert ca["table"] == cb["table"]


def test_cells_unique_within_table():
    for conv in gen_synthetic(SyntheticSpec(n_tables=10, seed=1)):
        table = conv["table"]
        raws = [cell.raw for col in table.columns for cell in col.cells]
        assert len(raws) == len(set(raws)), table.id


def test_gold_forms_execute_to_answers():
    for conv in gen_synthetic(SyntheticSpec(n_tables=10, seed=2)):
        for turn in conv["turns"]:
            d = execute(turn["gold_lf"], conv["table"])
            assert d.values, render(turn["gold_lf"])
            assert denotation_matches(d, turn["answers"]) is MatchKind.EXACT
            assert sketch_of(turn["gold_actions"]).id.value == turn["sketch"]


def test_copy_fraction_honored():
    convs = gen_synthetic(SyntheticSpec(n_tables=40, seed=3,
                                        copy_turn_fraction=1.0,
                                        turns_range=(3, 3)))
    copy_ids = {SketchId.S_COPYSEL_WHERE.value,
                SketchId.S_COPYWHERE_SELECT.value,
                SketchId.S_COPYALL_WHERE.value}
    later = [t["sketch"] for c in convs for t in c["turns"][1:]]
    assert later
    assert all(s in copy_ids for s in later)
    no_copy = gen_synthetic(SyntheticSpec(n_tables=10, seed=3,
                                          copy_turn_fraction=0.0))
    assert all(t["sketch"] not in copy_ids
               for c in no_copy for t in c["turns"])


def test_full_search_coverage(synthetic_corpus):
    results = []
    for conv in synthetic_corpus:
        turns = [(t["question"], t["answers"]) for t in conv["turns"]]
        results.extend(search_labels(turns, conv["table"], SearchConfig()))
    report = coverage_report(results)
    assert report["overall"] == 100.0


def test_write_corpus_round_trip(tmp_path):
    from convtab.datasets import load_conversations_jsonl

    convs = gen_synthetic(SyntheticSpec(n_tables=4, seed=9))
    path = write_corpus(convs, tmp_path)
    assert path.name == "conversations.jsonl"
    assert (tmp_path / "gold.jsonl").exists()
    loaded = load_conversations_jsonl(path)
    assert len(loaded) == len(convs)
    for orig, back in zip(convs, loaded):
        assert back["id"] == orig["id"]
        assert [t["question"] for t in back["turns"]] == \
               [t["question"] for t in orig["turns"]]
        assert [t["answers"] for t in back["turns"]] == \
               [t["answers"] for t in orig["turns"]]
        # Reloaded tables hold the same cells.
        assert [[c.raw for c in col.cells] for col in back["table"].columns] == \
               [[c.raw for c in col.cells] for col in orig["table"].columns]
    gold = [json.loads(line)
            for line in (tmp_path / "gold.jsonl").read_text().splitlines()]
    assert [g["id"] for g in gold] == [c["id"] for c in convs]
