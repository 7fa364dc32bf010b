"""Label generation by searching the logical-form space.

For each question we traverse the grammar's legal action sequences, prune
branches whose partial execution is disjoint from the gold answers, and keep
complete forms whose denotation matches. Two cleanup strategies follow:
S1 drops forms whose newly built WHERE value has no word overlap with the
question, S2 prefers copy-action forms when any survive.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .executor import MatchKind, denotation_matches, execute, execute_partial
from .logical_form import (
    COPY_TAGS,
    OPERATORS,
    Action,
    ActionTag,
    LogicalForm,
    Operator,
    SKETCHES,
    SketchId,
    actions_to_json,
    assemble,
    lf_from_json,
    lf_to_json,
    render,
)
from .table_model import Table, normalize_text, tokenize

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SearchConfig:
    max_candidates: int = 5000
    apply_s1: bool = True
    apply_s2: bool = True
    match_mode: str = "exact"  # or "overlap"
    prune_partial: bool = True
    previous_mode: str = "first"  # or "all"

    def __post_init__(self):
        if self.max_candidates < 1:
            raise ValueError("max_candidates must be >= 1")
        if self.match_mode not in ("exact", "overlap"):
            raise ValueError("match_mode must be 'exact' or 'overlap'")


@dataclass
class LabelResult:
    question: str
    candidates: list  # (LogicalForm, tuple of Action)
    covered: bool
    counts_by_stage: dict
    table_id: str = ""
    previous_question: str | None = None
    position: int = 1

    def to_json(self):
        return {
            "question": self.question,
            "tableId": self.table_id,
            "previousQuestion": self.previous_question,
            "position": self.position,
            "covered": self.covered,
            "countsByStage": dict(self.counts_by_stage),
            "candidates": [
                {"lf": render(lf), "lfJson": lf_to_json(lf),
                 "actions": actions_to_json(actions)}
                for lf, actions in self.candidates
            ],
        }

    @classmethod
    def from_json(cls, data):
        candidates = []
        for entry in data["candidates"]:
            lf = lf_from_json(entry["lfJson"])
            candidates.append((lf, tuple(_action_from_json(a)
                                         for a in entry["actions"])))
        return cls(question=data["question"], candidates=candidates,
                   covered=data["covered"],
                   counts_by_stage=dict(data["countsByStage"]),
                   table_id=data.get("tableId", ""),
                   previous_question=data.get("previousQuestion"),
                   position=data.get("position", 1))


_OP_BY_TEXT = {op.text: op for op in OPERATORS}


def _action_from_json(entry):
    tag = ActionTag(entry["tag"])
    arg = entry.get("argument")
    if tag is ActionTag.A3:
        arg = _OP_BY_TEXT[arg]
    return Action(tag, arg)


def distinct_cell_values(column):
    """Non-empty distinct raw cell texts of a column, in row order."""
    seen = set()
    out = []
    for cell in column.cells:
        key = normalize_text(cell.raw)
        if key and key not in seen:
            seen.add(key)
            out.append(cell.raw)
    return out


def enumerate_candidates(table, previous, gold, config: SearchConfig):
    """All grammar-legal forms whose denotation matches the gold answers.

    Deterministic order: sketch order, then column index, then operator
    enumeration order, then cell row order.
    """
    out = []

    def matches(denotation):
        return denotation_matches(denotation, gold)

    def keep_final(lf, actions):
        kind = matches(execute(lf, table))
        if config.match_mode == "exact":
            ok = kind is MatchKind.EXACT
        else:
            ok = kind is not MatchKind.DISJOINT
        if ok:
            out.append((lf, actions))

    def pruned(prefix):
        if not config.prune_partial:
            return False
        d = execute_partial(prefix, table, previous)
        return matches(d) is MatchKind.DISJOINT

    def expand_where(prefix):
        """Append A2/A3(/A4) in all ways and keep matching complete forms."""
        for col in table.columns:
            with_col = prefix + (Action(ActionTag.A2, col.header),)
            for op in OPERATORS:
                if op.is_extremum:
                    actions = with_col + (Action(ActionTag.A3, op),)
                    keep_final(assemble(actions, previous), actions)
                else:
                    with_op = with_col + (Action(ActionTag.A3, op),)
                    for value in distinct_cell_values(col):
                        actions = with_op + (Action(ActionTag.A4, value),)
                        keep_final(assemble(actions, previous), actions)

    for sketch in SKETCHES:
        if sketch.has_copy and previous is None:
            continue
        if sketch.id is SketchId.S_SELECT:
            for col in table.columns:
                actions = (Action(ActionTag.A1, col.header),)
                keep_final(assemble(actions, previous), actions)
        elif sketch.id is SketchId.S_SELECT_WHERE:
            for col in table.columns:
                prefix = (Action(ActionTag.A1, col.header),)
                if pruned(prefix):
                    continue
                expand_where(prefix)
        elif sketch.id is SketchId.S_COPYSEL_WHERE:
            if table.column(previous.select_column) is None:
                continue
            prefix = (Action(ActionTag.A5),)
            if not pruned(prefix):
                expand_where(prefix)
        elif sketch.id is SketchId.S_COPYWHERE_SELECT:
            for col in table.columns:
                actions = (Action(ActionTag.A6), Action(ActionTag.A1, col.header))
                keep_final(assemble(actions, previous), actions)
        elif sketch.id is SketchId.S_COPYALL_WHERE:
            # A7 appends one condition; skip when that would exceed two.
            if (table.column(previous.select_column) is None
                    or len(previous.conditions) >= 2):
                continue
            prefix = (Action(ActionTag.A7),)
            if not pruned(prefix):
                expand_where(prefix)

    if len(out) > config.max_candidates:
        log.warning("candidate overflow: %d survivors truncated to %d",
                    len(out), config.max_candidates)
        out = out[:config.max_candidates]
    return out


def _new_conditions(lf, actions):
    """Conditions built in this turn (copied ones are the prepended prefix)."""
    n_new = 1 if any(a.tag is ActionTag.A2 for a in actions) else 0
    if any(a.tag in COPY_TAGS for a in actions):
        return lf.conditions[len(lf.conditions) - n_new:] if n_new else ()
    return lf.conditions


def _value_overlaps(cond, question_tokens, question_folded):
    value_tokens = tokenize(cond.value)
    if set(value_tokens) & question_tokens:
        return True
    folded = normalize_text(cond.value)
    if any(ch.isdigit() for ch in folded) and folded and folded in question_folded:
        return True
    return False


def apply_s1(candidates, question):
    """Keep forms whose newly built comparison values overlap the question."""
    question_tokens = set(tokenize(question))
    question_folded = normalize_text(question)
    kept = []
    for lf, actions in candidates:
        ok = True
        for cond in _new_conditions(lf, actions):
            if cond.op.is_extremum:
                continue
            if not _value_overlaps(cond, question_tokens, question_folded):
                ok = False
                break
        if ok:
            kept.append((lf, actions))
    return kept


def apply_s2(candidates):
    """When any candidate copies from history, keep only those."""
    copies = [(lf, actions) for lf, actions in candidates
              if any(a.tag in COPY_TAGS for a in actions)]
    return copies if copies else list(candidates)


def search_labels(conversation, table: Table, config: SearchConfig):
    """Label every turn of a conversation; each turn's history is the first
    surviving candidate of the previous covered turn."""
    results = []
    previous = None        # first-mode history
    previous_all = []      # all-mode history
    prev_question = None
    for position, turn in enumerate(conversation, start=1):
        if isinstance(turn, dict):
            question, gold = turn["question"], turn["answers"]
        else:
            question, gold = turn
        if config.previous_mode == "all" and previous_all:
            raw = []
            seen = set()
            for prev_lf in previous_all:
                for cand in enumerate_candidates(table, prev_lf, gold, config):
                    key = (render(cand[0]), tuple(a.tag for a in cand[1]))
                    if key not in seen:
                        seen.add(key)
                        raw.append(cand)
            raw = raw[:config.max_candidates]
        else:
            raw = enumerate_candidates(table, previous, gold, config)
        after_s1 = apply_s1(raw, question) if config.apply_s1 else list(raw)
        after_s2 = apply_s2(after_s1) if config.apply_s2 else list(after_s1)
        covered = bool(after_s2)
        results.append(LabelResult(
            question=question, candidates=after_s2, covered=covered,
            counts_by_stage={"raw": len(raw), "afterS1": len(after_s1),
                             "afterS2": len(after_s2)},
            table_id=table.id, previous_question=prev_question,
            position=position))
        previous = after_s2[0][0] if covered else None
        previous_all = [lf for lf, _ in after_s2] if covered else []
        prev_question = question
    return results


def coverage_report(results, turn_positions=None):
    """Coverage percentages and per-stage average candidate counts by position."""
    if turn_positions is None:
        turn_positions = [r.position for r in results]
    report = {"nQuestions": len(results), "overall": 0.0,
              "byPosition": {}, "avgCandidates": {}}
    if not results:
        return report
    covered = sum(1 for r in results if r.covered)
    report["overall"] = 100.0 * covered / len(results)
    by_pos = {}
    for r, pos in zip(results, turn_positions):
        by_pos.setdefault(pos, []).append(r)
    for pos in sorted(by_pos):
        group = by_pos[pos]
        report["byPosition"][pos] = (
            100.0 * sum(1 for r in group if r.covered) / len(group))
    for stage in ("raw", "afterS1", "afterS2"):
        report["avgCandidates"][stage] = {
            pos: sum(r.counts_by_stage[stage] for r in group) / len(group)
            for pos, group in sorted(by_pos.items())}
    return report
