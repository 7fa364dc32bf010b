"""Action grammar and logical forms.

A logical form is one SELECT column plus at most two WHERE conditions. It is
generated by a sequence of actions: A1-A4 build SELECT/WHERE content from the
current question, A5-A7 copy segments of the previous turn's logical form.
Sketches are the argument-free templates of those sequences.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from decimal import Decimal
from enum import Enum

from .errors import (
    IllegalSequenceError,
    LogicalFormSyntaxError,
    MalformedConditionError,
    MissingPreviousError,
)


class Operator(Enum):
    EQ = "="
    NEQ = "!="
    GT = ">"
    GEQ = ">="
    LT = "<"
    LEQ = "<="
    ARGMIN = "argmin"
    ARGMAX = "argmax"

    @property
    def text(self):
        return self.value

    @property
    def is_extremum(self):
        return self in (Operator.ARGMIN, Operator.ARGMAX)


OPERATORS = list(Operator)
COMPARISON_OPERATORS = [op for op in OPERATORS if not op.is_extremum]
_OP_BY_TEXT = {op.value: op for op in OPERATORS}


class ActionTag(Enum):
    A1 = "A1"  # SELECT column
    A2 = "A2"  # WHERE column
    A3 = "A3"  # WHERE operator
    A4 = "A4"  # WHERE value
    A5 = "A5"  # copy previous SELECT
    A6 = "A6"  # copy previous WHERE
    A7 = "A7"  # copy previous SELECT + WHERE


COPY_TAGS = {ActionTag.A5, ActionTag.A6, ActionTag.A7}

START = "START"
END = "END"


def format_value(value) -> str:
    """Canonical text of a condition value."""
    if isinstance(value, Decimal):
        text = str(value)
        return text[:-2] if text.endswith(".0") else text
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


@dataclass(frozen=True)
class Action:
    tag: ActionTag
    argument: object = None

    def __post_init__(self):
        if self.tag in (ActionTag.A1, ActionTag.A2):
            if not isinstance(self.argument, str):
                raise MalformedConditionError(f"{self.tag.value} needs a column name")
        elif self.tag is ActionTag.A3:
            if not isinstance(self.argument, Operator):
                raise MalformedConditionError("A3 needs an operator")
        elif self.tag is ActionTag.A4:
            if self.argument is None:
                raise MalformedConditionError("A4 needs a value")
        elif self.argument is not None:
            raise MalformedConditionError(f"{self.tag.value} takes no argument")


@dataclass(frozen=True)
class Condition:
    column: str
    op: Operator
    value: str | None = None  # raw text; typed against the column at execution

    def __post_init__(self):
        if self.op.is_extremum and self.value is not None:
            raise MalformedConditionError(f"{self.op.text} takes no value")
        if not self.op.is_extremum and self.value is None:
            raise MalformedConditionError(f"{self.op.text} requires a value")


@dataclass(frozen=True)
class LogicalForm:
    select_column: str
    conditions: tuple = ()

    def __post_init__(self):
        if len(self.conditions) > 2:
            raise MalformedConditionError("at most two conditions")


class SketchId(Enum):
    S_SELECT = "S_SELECT"
    S_SELECT_WHERE = "S_SELECT_WHERE"
    S_COPYSEL_WHERE = "S_COPYSEL_WHERE"
    S_COPYWHERE_SELECT = "S_COPYWHERE_SELECT"
    S_COPYALL_WHERE = "S_COPYALL_WHERE"


@dataclass(frozen=True)
class Sketch:
    id: SketchId
    action_tags: tuple

    @property
    def has_copy(self):
        return any(t in COPY_TAGS for t in self.action_tags)


SKETCHES = (
    Sketch(SketchId.S_SELECT, (ActionTag.A1,)),
    Sketch(SketchId.S_SELECT_WHERE,
           (ActionTag.A1, ActionTag.A2, ActionTag.A3, ActionTag.A4)),
    Sketch(SketchId.S_COPYSEL_WHERE,
           (ActionTag.A5, ActionTag.A2, ActionTag.A3, ActionTag.A4)),
    Sketch(SketchId.S_COPYWHERE_SELECT, (ActionTag.A6, ActionTag.A1)),
    Sketch(SketchId.S_COPYALL_WHERE,
           (ActionTag.A7, ActionTag.A2, ActionTag.A3, ActionTag.A4)),
)
SKETCH_BY_ID = {s.id: s for s in SKETCHES}

TRANSITIONS = {
    START: {ActionTag.A1, ActionTag.A5, ActionTag.A6, ActionTag.A7},
    ActionTag.A1: {ActionTag.A2, END},
    ActionTag.A2: {ActionTag.A3},
    ActionTag.A3: {ActionTag.A4, END},
    ActionTag.A4: {END},
    ActionTag.A5: {ActionTag.A2},
    ActionTag.A6: {ActionTag.A1},
    ActionTag.A7: {ActionTag.A2},
}


def legal_successors(state, has_previous, pending_op=None, after_copy_where=False):
    """Allowed next steps (action tags plus END) from a single grammar state.

    `pending_op` is the operator chosen by A3 when state is A3: extremum
    operators terminate the condition, comparisons require A4. The A6 path
    constrains its A1 to end immediately; callers walking a sequence signal
    that with `after_copy_where`.
    """
    successors = set(TRANSITIONS.get(state, set()))
    if not has_previous:
        successors -= COPY_TAGS
    if state is ActionTag.A3:
        if pending_op is not None and pending_op.is_extremum:
            successors = {END}
        elif pending_op is not None:
            successors = {ActionTag.A4}
    if state is ActionTag.A1 and after_copy_where:
        successors = {END}
    return successors


def is_legal_sequence(actions, has_previous):
    """Step `legal_successors` over a complete action sequence."""
    state = START
    after_copy_where = False
    pending_op = None
    for action in actions:
        allowed = legal_successors(state, has_previous, pending_op, after_copy_where)
        if action.tag not in allowed:
            return False
        if state is ActionTag.A6:
            after_copy_where = True
        pending_op = action.argument if action.tag is ActionTag.A3 else None
        state = action.tag
    return END in legal_successors(state, has_previous, pending_op, after_copy_where)


def sketch_of(actions) -> Sketch:
    """Map an assembled action sequence back to its sketch.

    Sequences whose condition ends at an extremum operator (no A4) fold into
    the corresponding four-tag sketch.
    """
    tags = tuple(a.tag for a in actions)
    if tags and tags[-1] is ActionTag.A3:
        tags = tags + (ActionTag.A4,)
    for sketch in SKETCHES:
        if sketch.action_tags == tags:
            return sketch
    raise IllegalSequenceError(f"no sketch for tags {[t.value for t in tags]}")


def assemble(actions, previous=None) -> LogicalForm:
    """Build a LogicalForm from a legal START-to-END action sequence."""
    for action in actions:
        if action.tag in COPY_TAGS and previous is None:
            raise MissingPreviousError(f"{action.tag.value} without history")
    if not is_legal_sequence(actions, has_previous=previous is not None):
        raise IllegalSequenceError(
            "illegal action sequence: " + " ".join(a.tag.value for a in actions))

    select_column = None
    conditions = []
    pending_col = None
    pending_op = None
    for action in actions:
        if action.tag is ActionTag.A1:
            select_column = action.argument
        elif action.tag is ActionTag.A2:
            pending_col = action.argument
        elif action.tag is ActionTag.A3:
            pending_op = action.argument
            if pending_op.is_extremum:
                conditions.append(Condition(pending_col, pending_op))
                pending_col = pending_op = None
        elif action.tag is ActionTag.A4:
            conditions.append(
                Condition(pending_col, pending_op, format_value(action.argument)))
            pending_col = pending_op = None
        elif action.tag is ActionTag.A5:
            select_column = previous.select_column
        elif action.tag is ActionTag.A6:
            conditions.extend(previous.conditions)
        elif action.tag is ActionTag.A7:
            select_column = previous.select_column
            conditions.extend(previous.conditions)
    if pending_op is not None or pending_col is not None:
        raise MalformedConditionError("unfinished WHERE condition")
    return LogicalForm(select_column=select_column, conditions=tuple(conditions))


def _quote(text: str) -> str:
    if text == "" or re.search(r"\s|\"", text):
        return '"' + text.replace('"', '\\"') + '"'
    return text


def render(lf: LogicalForm) -> str:
    """Canonical text: SELECT <col> [WHERE <col> <op> <val> [AND ...]]."""
    parts = ["SELECT", _quote(lf.select_column)]
    if lf.conditions:
        parts.append("WHERE")
        for i, cond in enumerate(lf.conditions):
            if i:
                parts.append("AND")
            parts.append(_quote(cond.column))
            parts.append(cond.op.text)
            if cond.value is not None:
                parts.append(_quote(cond.value))
    return " ".join(parts)


_LF_TOKEN_RE = re.compile(r'\s*(?:"((?:[^"\\]|\\.)*)"|(\S+))')


def _tokenize_lf(text):
    tokens = []  # (value, was_quoted, offset)
    pos = 0
    while pos < len(text):
        m = _LF_TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            if text[pos:].strip():
                raise LogicalFormSyntaxError("unterminated token", pos)
            break
        if m.group(1) is not None:
            tokens.append((m.group(1).replace('\\"', '"'), True, m.start()))
        else:
            tokens.append((m.group(2), False, m.start()))
        pos = m.end()
    return tokens


def parse_lf(text: str) -> LogicalForm:
    """Inverse of render. Raises LogicalFormSyntaxError with a byte offset."""
    tokens = _tokenize_lf(text)
    i = 0

    def need(what):
        if i >= len(tokens):
            raise LogicalFormSyntaxError(f"expected {what}", len(text))
        return tokens[i]

    tok, quoted, off = need("SELECT")
    if quoted or tok.upper() != "SELECT":
        raise LogicalFormSyntaxError("expected SELECT", off)
    i += 1
    col, _, _ = need("column name")
    i += 1
    conditions = []
    if i < len(tokens):
        tok, quoted, off = tokens[i]
        if quoted or tok.upper() != "WHERE":
            raise LogicalFormSyntaxError("expected WHERE", off)
        i += 1
        while True:
            ccol, _, _ = need("condition column")
            i += 1
            optok, opq, opoff = need("operator")
            op = None if opq else _OP_BY_TEXT.get(optok.lower())
            if op is None:
                raise LogicalFormSyntaxError(f"unknown operator {optok!r}", opoff)
            i += 1
            if op.is_extremum:
                conditions.append(Condition(ccol, op))
            else:
                val, _, _ = need("condition value")
                i += 1
                conditions.append(Condition(ccol, op, val))
            if i >= len(tokens):
                break
            tok, quoted, off = tokens[i]
            if quoted or tok.upper() != "AND":
                raise LogicalFormSyntaxError("expected AND", off)
            i += 1
    if i < len(tokens):
        raise LogicalFormSyntaxError("trailing tokens", tokens[i][2])
    if len(conditions) > 2:
        raise LogicalFormSyntaxError("more than two conditions", len(text))
    return LogicalForm(select_column=col, conditions=tuple(conditions))


def lf_to_json(lf: LogicalForm) -> dict:
    conditions = []
    for cond in lf.conditions:
        entry = {"col": cond.column, "op": cond.op.text}
        if cond.value is not None:
            entry["value"] = cond.value
        conditions.append(entry)
    return {"select": lf.select_column, "conditions": conditions}


def lf_from_json(data: dict) -> LogicalForm:
    conditions = tuple(
        Condition(c["col"], _OP_BY_TEXT[c["op"]], c.get("value"))
        for c in data.get("conditions", []))
    return LogicalForm(select_column=data["select"], conditions=conditions)


def actions_to_json(actions) -> list:
    out = []
    for a in actions:
        entry = {"tag": a.tag.value}
        if a.argument is not None:
            entry["argument"] = (a.argument.text if isinstance(a.argument, Operator)
                                 else format_value(a.argument))
        out.append(entry)
    return out
