import pytest

from convtab.errors import NoParseError
from convtab.executor import MatchKind, denotation_matches
from convtab.logical_form import render
from convtab.pipeline import (
    ConversationState,
    answer,
    evaluate,
    format_metrics,
    new_session,
    parse_turn,
)
from convtab.scorer import ModelWeights

from conftest import OLYMPICS_CONVERSATION


def test_new_session_state(olympics):
    state = new_session(olympics)
    assert state.previous_lf is None
    assert state.previous_question is None
    assert state.turns == []


def test_parse_turn_returns_executable(olympics, fixture_model):
    state = new_session(olympics)
    parse = parse_turn(state, OLYMPICS_CONVERSATION[0][0], fixture_model)
    assert render(parse.lf) == "SELECT City WHERE Year = 2008"
    assert parse.denotation.texts == ["Beijing"]
    assert parse.score <= 0.0  # log-probability


def test_parse_turn_beam_validation(olympics, fixture_model):
    with pytest.raises(ValueError):
        parse_turn(new_session(olympics), "q", fixture_model, beam=0)


def test_three_turn_conversation(olympics, fixture_model):
    state = new_session(olympics)
    for question, gold in OLYMPICS_CONVERSATION:
        denotation, parse, state = answer(state, question, fixture_model)
        assert denotation_matches(denotation, gold) is MatchKind.EXACT
    assert len(state.turns) == 3
    assert render(state.turns[1].chosen) == "SELECT Nations WHERE Year = 2008"
    assert render(state.turns[2].chosen) == "SELECT Nations WHERE Year = 2012"


def test_answer_threads_predicted_history(olympics, fixture_model):
    state = new_session(olympics)
    _, parse1, state = answer(state, OLYMPICS_CONVERSATION[0][0], fixture_model)
    assert state.previous_lf == parse1.lf
    assert state.previous_question == OLYMPICS_CONVERSATION[0][0]


def test_zero_model_still_parses(olympics):
    # With zero weights every head is uniform; the parse is arbitrary but legal.
    state = new_session(olympics)
    denotation, parse, state = answer(state, "which city?", ModelWeights.zero())
    assert parse.denotation is denotation
    assert render(parse.lf).startswith("SELECT ")


def test_empty_denotations_demoted(fixture_model, olympics):
    # The chosen parse has rows whenever any candidate does.
    parse = parse_turn(new_session(olympics), "which city hosted in 2008 ?",
                       fixture_model, beam=5)
    assert parse.denotation.values


def test_evaluate_metrics(olympics, fixture_model):
    dataset = [{
        "table": olympics,
        "turns": [{"question": q, "answers": a}
                  for q, a in OLYMPICS_CONVERSATION],
    }]
    metrics = evaluate(dataset, fixture_model)
    assert metrics["all"] == 100.0
    assert metrics["seq"] == 100.0
    assert metrics["pos"] == [100.0, 100.0, 100.0]


def test_evaluate_empty_dataset(fixture_model):
    metrics = evaluate([], fixture_model)
    assert metrics == {"all": 0.0, "seq": 0.0, "pos": []}


def test_format_metrics():
    text = format_metrics({"all": 96.9, "seq": 90.0, "pos": [100.0, 95.0]})
    lines = text.splitlines()
    assert len(lines) == 2
    assert "All" in lines[0] and "Pos 2" in lines[0]
    assert "96.9" in lines[1] and "95.0" in lines[1]


def test_end_to_end_synthetic_accuracy(trained_model, synthetic_corpus):
    weights, _ = trained_model
    test_set = [{"table": conv["table"],
                 "turns": [{"question": t["question"], "answers": t["answers"]}
                           for t in conv["turns"]]}
                for conv in synthetic_corpus[160:]]
    metrics = evaluate(test_set, weights)
    baseline = evaluate(test_set, ModelWeights.zero())
    assert metrics["all"] >= 70.0
    assert metrics["all"] - baseline["all"] >= 20.0
