"""Execution of complete and partial logical forms against a table.

Comparisons are typed per column: numeric for NUMBER/YEAR/UNIT, calendar
order for DATE, normalized string equality elsewhere. Ordering operators on
text-like columns match nothing, by design.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal
from enum import Enum

from .errors import MissingPreviousError, UnknownColumnError
from .logical_form import ActionTag, Condition, LogicalForm, Operator, format_value
from .table_model import (
    Cell,
    CellType,
    Column,
    Table,
    normalize_text,
    normalize_value,
    _NUMBER_RE,
    _parse_decimal,
)

NUMERIC_TYPES = {CellType.NUMBER, CellType.YEAR, CellType.UNIT}


class MatchKind(Enum):
    EXACT = "exact"
    OVERLAP = "overlap"
    DISJOINT = "disjoint"


@dataclass(frozen=True)
class Denotation:
    values: tuple  # (row index, raw cell text), row order
    source_column: str

    @property
    def texts(self):
        return [text for _, text in self.values]

    def to_json(self):
        return {"column": self.source_column,
                "values": [{"row": r, "text": t} for r, t in self.values]}


def _cell_numeric(cell: Cell):
    v = cell.normalized
    if isinstance(v, bool):
        return None
    if isinstance(v, Decimal):
        return v
    if isinstance(v, int):
        return Decimal(v)
    return None


def _date_key(value):
    if isinstance(value, tuple) and len(value) == 3:
        return tuple(part if part is not None else 0 for part in value)
    return None


def _require_column(table: Table, name: str) -> Column:
    col = table.column(name)
    if col is None:
        raise UnknownColumnError(f"unknown column {name!r} in table {table.id!r}")
    return col


def eval_condition(table: Table, cond: Condition) -> set:
    """Row indices satisfying one condition."""
    col = _require_column(table, cond.column)
    if cond.op.is_extremum:
        numeric = [(i, _cell_numeric(cell)) for i, cell in enumerate(col.cells)]
        numeric = [(i, v) for i, v in numeric if v is not None]
        if not numeric:
            return set()
        vals = [v for _, v in numeric]
        target = max(vals) if cond.op is Operator.ARGMAX else min(vals)
        return {i for i, v in numeric if v == target}

    target = normalize_value(cond.value, col.type)
    rows = set()
    if col.type in NUMERIC_TYPES:
        if isinstance(target, str):
            return set()  # value did not coerce to the column's type
        target_num = Decimal(target) if isinstance(target, int) else target
        for i, cell in enumerate(col.cells):
            v = _cell_numeric(cell)
            if v is not None and _compare(cond.op, v, target_num):
                rows.add(i)
    elif col.type is CellType.DATE:
        target_key = _date_key(target)
        if target_key is None:
            return set()
        for i, cell in enumerate(col.cells):
            key = _date_key(cell.normalized)
            if key is not None and _compare(cond.op, key, target_key):
                rows.add(i)
    else:
        # Text-like columns: equality only; ordering matches nothing.
        if cond.op not in (Operator.EQ, Operator.NEQ):
            return set()
        target_text = target if isinstance(target, str) else normalize_text(cond.value)
        for i, cell in enumerate(col.cells):
            cell_text = (cell.normalized if isinstance(cell.normalized, str)
                         else normalize_text(cell.raw))
            equal = cell_text == target_text
            if (cond.op is Operator.EQ) == equal:
                rows.add(i)
    return rows


def _compare(op: Operator, left, right) -> bool:
    if op is Operator.EQ:
        return left == right
    if op is Operator.NEQ:
        return left != right
    if op is Operator.GT:
        return left > right
    if op is Operator.GEQ:
        return left >= right
    if op is Operator.LT:
        return left < right
    if op is Operator.LEQ:
        return left <= right
    raise AssertionError(op)


def _project(table: Table, name: str, rows) -> Denotation:
    col = _require_column(table, name)
    values = tuple((i, col.cells[i].raw) for i in sorted(rows))
    return Denotation(values=values, source_column=col.header)


def execute(lf: LogicalForm, table: Table) -> Denotation:
    """Run a complete logical form: intersect condition rows, project SELECT."""
    rows = set(range(table.n_rows))
    for cond in lf.conditions:
        rows &= eval_condition(table, cond)
    return _project(table, lf.select_column, rows)


def execute_partial(prefix, table: Table, previous=None) -> Denotation:
    """Evaluate a legal action-sequence prefix.

    The prefix is completed minimally: an unfinished condition (prefix ending
    after A2 or A3 with a comparison operator) is dropped; copy actions
    resolve against `previous` first. The prefix must already determine a
    SELECT column (i.e. contain A1, A5, or A7).
    """
    select_column = None
    conditions = []
    pending_col = None
    pending_op = None
    for action in prefix:
        if action.tag in (ActionTag.A5, ActionTag.A6, ActionTag.A7):
            if previous is None:
                raise MissingPreviousError(f"{action.tag.value} without history")
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
    if select_column is None:
        raise ValueError("prefix does not determine a SELECT column")
    rows = set(range(table.n_rows))
    for cond in conditions:
        rows &= eval_condition(table, cond)
    return _project(table, select_column, rows)


def normalize_answer(text: str) -> str:
    """Comparison key for answers: numeric canonicalization else folded text."""
    folded = normalize_text(text)
    if _NUMBER_RE.match(folded.replace(" ", "")):
        value = _parse_decimal(folded)
        if value is not None:
            if value == value.to_integral_value():
                return str(int(value))
            return format(value.normalize(), "f")
    return folded


def denotation_matches(denotation, gold) -> MatchKind:
    """Compare a denotation against gold answers as normalized multisets."""
    texts = denotation.texts if isinstance(denotation, Denotation) else list(denotation)
    mine = {}
    for t in texts:
        k = normalize_answer(t)
        mine[k] = mine.get(k, 0) + 1
    theirs = {}
    for t in gold:
        k = normalize_answer(t)
        theirs[k] = theirs.get(k, 0) + 1
    if mine == theirs:
        return MatchKind.EXACT
    if set(mine) & set(theirs):
        return MatchKind.OVERLAP
    return MatchKind.DISJOINT
