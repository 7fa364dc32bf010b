"""Turn-level inference over a conversation.

Each turn: rank sketches with the controller, fill arguments head by head,
resolve copy actions against the previous turn's chosen logical form, execute,
and prefer candidates with non-empty denotations.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

from .errors import ConvTabError, NoParseError
from .executor import Denotation, MatchKind, denotation_matches, execute
from .logical_form import (
    Action,
    ActionTag,
    LogicalForm,
    Operator,
    Sketch,
    SKETCHES,
    SketchId,
    SKETCH_BY_ID,
    assemble,
)
from .scorer import (
    ModelWeights,
    featurize_controller,
    score_column,
    score_operator,
    score_sketch,
    score_value,
)
from .table_model import Table

MAX_EXPANSIONS = 32  # cap on per-sketch argument combinations


@dataclass
class Turn:
    question: str
    chosen: LogicalForm | None = None
    denotation: Denotation | None = None
    parse: object = None


@dataclass
class ConversationState:
    table: Table
    turns: list = field(default_factory=list)

    @property
    def previous_lf(self):
        if self.turns:
            return self.turns[-1].chosen
        return None

    @property
    def previous_question(self):
        if self.turns:
            return self.turns[-1].question
        return None


@dataclass(frozen=True)
class ScoredParse:
    lf: LogicalForm
    actions: tuple
    sketch: Sketch
    score: float
    denotation: Denotation


def new_session(table: Table) -> ConversationState:
    return ConversationState(table=table)


def _log(p):
    return math.log(p) if p > 0 else -1e9


def _fill_sketch(sketch, state, question, weights, top_k):
    """Yield (actions, argument log-prob) combinations for one sketch."""
    table = state.table
    previous = state.previous_lf

    def column_choices(role):
        dist = score_column(weights, question, table, role)
        return dist.top(top_k)

    def finish_condition(prefix, logp, emitted):
        op_dist = score_operator(weights, question)
        for op, op_p in op_dist.top(top_k):
            if len(emitted) >= MAX_EXPANSIONS:
                return
            where_col = next(a.argument for a in reversed(prefix)
                             if a.tag is ActionTag.A2)
            if op.is_extremum:
                emitted.append((prefix + (Action(ActionTag.A3, op),),
                                logp + _log(op_p)))
            else:
                column = table.column(where_col)
                try:
                    val_dist = score_value(weights, weights.lam, question, column)
                except ConvTabError:
                    continue
                for value, val_p in val_dist.top(top_k):
                    if len(emitted) >= MAX_EXPANSIONS:
                        return
                    emitted.append((
                        prefix + (Action(ActionTag.A3, op),
                                  Action(ActionTag.A4, value)),
                        logp + _log(op_p) + _log(val_p)))

    emitted = []
    if sketch.id is SketchId.S_SELECT:
        for col, p in column_choices("select"):
            emitted.append(((Action(ActionTag.A1, col),), _log(p)))
    elif sketch.id is SketchId.S_SELECT_WHERE:
        for col, p in column_choices("select"):
            for wcol, wp in column_choices("where"):
                finish_condition((Action(ActionTag.A1, col),
                                  Action(ActionTag.A2, wcol)),
                                 _log(p) + _log(wp), emitted)
    elif sketch.id is SketchId.S_COPYSEL_WHERE:
        for wcol, wp in column_choices("where"):
            finish_condition((Action(ActionTag.A5), Action(ActionTag.A2, wcol)),
                             _log(wp), emitted)
    elif sketch.id is SketchId.S_COPYWHERE_SELECT:
        for col, p in column_choices("select"):
            emitted.append(((Action(ActionTag.A6), Action(ActionTag.A1, col)),
                            _log(p)))
    elif sketch.id is SketchId.S_COPYALL_WHERE:
        if previous is not None and len(previous.conditions) < 2:
            for wcol, wp in column_choices("where"):
                finish_condition((Action(ActionTag.A7), Action(ActionTag.A2, wcol)),
                                 _log(wp), emitted)
    return emitted[:MAX_EXPANSIONS]


def parse_turn(state: ConversationState, question: str, weights: ModelWeights,
               beam: int = 3, per_head_top_k: int = 1) -> ScoredParse:
    """Best-scoring executable parse for one question."""
    if beam < 1:
        raise ValueError("beam must be >= 1")
    previous = state.previous_lf
    has_previous = previous is not None
    features = featurize_controller(question, state.previous_question)
    sketch_dist = score_sketch(weights, features, has_previous)
    ranked = [(sid, p) for sid, p in sketch_dist.top(len(SKETCHES)) if p > 0.0]

    candidates = []  # (nonempty, score, -sketch_index, ScoredParse)
    for sketch_id, sketch_p in ranked[:beam]:
        sketch = SKETCH_BY_ID[sketch_id]
        sketch_index = SKETCHES.index(sketch)
        for actions, arg_logp in _fill_sketch(sketch, state, question,
                                              weights, per_head_top_k):
            try:
                lf = assemble(actions, previous)
                denotation = execute(lf, state.table)
            except ConvTabError:
                continue
            score = _log(sketch_p) + arg_logp
            parse = ScoredParse(lf=lf, actions=tuple(actions), sketch=sketch,
                                score=score, denotation=denotation)
            candidates.append((bool(denotation.values), score,
                               -sketch_index, parse))
    if not candidates:
        raise NoParseError(f"no executable parse for {question!r}")
    candidates.sort(key=lambda c: (c[0], c[1], c[2]), reverse=True)
    return candidates[0][3]


def answer(state: ConversationState, question: str, weights: ModelWeights,
           beam: int = 3, per_head_top_k: int = 1):
    """Parse, execute, and append the turn. Returns (denotation, parse, state)."""
    try:
        parse = parse_turn(state, question, weights, beam, per_head_top_k)
    except NoParseError:
        state.turns.append(Turn(question=question))
        raise
    state.turns.append(Turn(question=question, chosen=parse.lf,
                            denotation=parse.denotation, parse=parse))
    return parse.denotation, parse, state


def evaluate(dataset, weights: ModelWeights, beam: int = 3,
             gold_history: bool = False) -> dict:
    """ALL / SEQ / POS-k accuracy over conversations with gold answers.

    Each dataset entry: {"table": Table, "turns": [{"question", "answers",
    optional "gold_lf"}]}. With gold_history, the history threaded into the
    next turn is the turn's gold logical form (diagnostic mode).
    """
    n_questions = 0
    n_correct = 0
    n_sequences = 0
    n_sequences_correct = 0
    by_position = {}
    for conv in dataset:
        state = new_session(conv["table"])
        all_correct = True
        for position, turn in enumerate(conv["turns"], start=1):
            correct = False
            try:
                denotation, parse, state = answer(state, turn["question"],
                                                  weights, beam)
                correct = denotation_matches(
                    denotation, turn["answers"]) is MatchKind.EXACT
            except NoParseError:
                pass
            if gold_history and turn.get("gold_lf") is not None:
                state.turns[-1].chosen = turn["gold_lf"]
                state.turns[-1].denotation = execute(turn["gold_lf"],
                                                     conv["table"])
            n_questions += 1
            n_correct += 1 if correct else 0
            all_correct = all_correct and correct
            bucket = by_position.setdefault(position, [0, 0])
            bucket[0] += 1
            bucket[1] += 1 if correct else 0
        n_sequences += 1
        n_sequences_correct += 1 if all_correct else 0
    positions = [100.0 * by_position[p][1] / by_position[p][0]
                 for p in sorted(by_position)]
    return {
        "all": 100.0 * n_correct / n_questions if n_questions else 0.0,
        "seq": 100.0 * n_sequences_correct / n_sequences if n_sequences else 0.0,
        "pos": positions,
    }


def format_metrics(metrics: dict) -> str:
    """Plain-text accuracy table."""
    header = ["All", "Seq"] + [f"Pos {i + 1}" for i in range(len(metrics["pos"]))]
    values = [metrics["all"], metrics["seq"]] + metrics["pos"]
    widths = [max(len(h), 6) for h in header]
    lines = [
        "  ".join(h.rjust(w) for h, w in zip(header, widths)),
        "  ".join(f"{v:.1f}".rjust(w) for v, w in zip(values, widths)),
    ]
    return "\n".join(lines)
