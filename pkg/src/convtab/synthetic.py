"""Deterministic synthetic tables and conversations with gold logical forms.

The generator keeps every cell value distinct within a table (disjoint value
pools per column) so that any exact-match candidate surviving the search is
row-set equivalent to the gold form; that keeps multi-turn label search and
copy resolution well behaved. Questions are templated with distinct lead
phrases per sketch so the feature-based scorer can learn each decision.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path

from .executor import execute
from .logical_form import (
    Action,
    ActionTag,
    LogicalForm,
    Operator,
    assemble,
    render,
    sketch_of,
)
from .table_model import Table, load_table


@dataclass(frozen=True)
class SyntheticSpec:
    n_tables: int = 20
    row_range: tuple = (3, 6)
    col_range: tuple = (3, 5)
    turns_range: tuple = (2, 4)
    copy_turn_fraction: float = 0.5
    seed: int = 0

    def __post_init__(self):
        for lo, hi in (self.row_range, self.col_range, self.turns_range):
            if lo < 1 or hi < lo:
                raise ValueError("bounds must be positive and ordered")
        if not 0.0 <= self.copy_turn_fraction <= 1.0:
            raise ValueError("copy_turn_fraction must be in [0, 1]")


_CITIES = (
    "Athens", "Beijing", "London", "Sydney", "Atlanta", "Barcelona", "Seoul",
    "Moscow", "Montreal", "Munich", "Tokyo", "Rome", "Helsinki", "Oslo",
    "Calgary", "Nagano", "Turin", "Vancouver", "Sochi", "Lillehammer",
    "Grenoble", "Innsbruck", "Sapporo", "Sarajevo", "Albertville", "Paris",
    "Amsterdam", "Antwerp", "Stockholm", "Melbourne",
)
_TEAMS = (
    "Falcons", "Tigers", "Rovers", "Wanderers", "Hornets", "Pirates",
    "Comets", "Rangers", "Saints", "Wolves", "Eagles", "Sharks", "Bulls",
    "Hawks", "Panthers", "Giants", "Dragons", "Knights", "Chiefs", "Storm",
)
_PLAYERS = (
    "Smith", "Johnson", "Garcia", "Miller", "Davis", "Martinez", "Lopez",
    "Wilson", "Anderson", "Thomas", "Taylor", "Moore", "Jackson", "Martin",
    "Lee", "Perez", "Thompson", "White", "Harris", "Clark",
)
_COUNTRIES = (
    "Greece", "China", "France", "Japan", "Brazil", "Canada", "Germany",
    "Italy", "Spain", "Norway", "Sweden", "Finland", "Russia", "Mexico",
    "Kenya", "Ghana", "India", "Peru", "Chile", "Egypt", "Poland",
    "Austria", "Hungary", "Portugal", "Ireland", "Denmark", "Morocco",
    "Turkey", "Argentina", "Australia",
)
_TEXT_COLUMNS = (("city", _CITIES), ("team", _TEAMS), ("player", _PLAYERS))
_NUMBER_HEADERS = ("nations", "points", "medals", "goals", "wins")


def _make_table(rng: random.Random, spec: SyntheticSpec, index: int) -> Table:
    n_rows = rng.randint(*spec.row_range)
    n_cols = rng.randint(*spec.col_range)
    text_header, text_pool = _TEXT_COLUMNS[rng.randrange(len(_TEXT_COLUMNS))]
    columns = [
        ("year", [str(y) for y in rng.sample(range(1950, 2051), n_rows)]),
        (text_header, list(rng.sample(text_pool, n_rows))),
        (_NUMBER_HEADERS[0],
         [str(v) for v in rng.sample(range(100, 200), n_rows)]),
    ]
    extras = n_cols - len(columns)
    if extras >= 1:
        columns.append(("country", list(rng.sample(_COUNTRIES, n_rows))))
    if extras >= 2:
        columns.append((_NUMBER_HEADERS[1],
                        [str(v) for v in rng.sample(range(200, 300), n_rows)]))
    headers = [h for h, _ in columns]
    lines = [",".join(headers)]
    for r in range(n_rows):
        lines.append(",".join(values[r] for _, values in columns))
    return load_table("\n".join(lines) + "\n", fmt="csv",
                      table_id=f"synthetic-{index}")


def _numeric_columns(table: Table):
    return [col for col in table.columns
            if all(not isinstance(cell.normalized, str) for cell in col.cells)]


def _extremum_rows(table: Table):
    """Rows that are the extremum of any numeric column (spurious-form bait)."""
    rows = set()
    for col in _numeric_columns(table):
        values = [cell.normalized for cell in col.cells]
        rows.add(values.index(max(values)))
        rows.add(values.index(min(values)))
    return rows


def _pick_row(rng, table, avoid_extremum=True, tries=10):
    bad = _extremum_rows(table) if avoid_extremum else set()
    choices = [r for r in range(table.n_rows) if r not in bad]
    if not choices:
        choices = list(range(table.n_rows))
    return rng.choice(choices)


def _eq_actions(sel, wcol, value):
    return (Action(ActionTag.A1, sel), Action(ActionTag.A2, wcol),
            Action(ActionTag.A3, Operator.EQ), Action(ActionTag.A4, value))


def _fresh_turn(rng, table: Table):
    """A context-independent turn: (question, gold action tuple)."""
    kind = rng.random()
    columns = list(table.columns)
    number_cols = [c for c in columns if c.header in _NUMBER_HEADERS]
    if kind < 0.15:
        col = rng.choice(columns)
        return f"show all {col.header} entries .", (Action(ActionTag.A1, col.header),)
    if kind < 0.40:
        # Retry so the extremum row is not also an extremum of another
        # numeric column; that keeps spurious extremum forms out of search.
        for _ in range(10):
            sel = rng.choice(columns)
            wcol = rng.choice([c for c in number_cols if c.header != sel.header]
                              or number_cols)
            op = rng.choice((Operator.ARGMAX, Operator.ARGMIN))
            values = [cell.normalized for cell in wcol.cells]
            row = (values.index(max(values)) if op is Operator.ARGMAX
                   else values.index(min(values)))
            others = set()
            for col in _numeric_columns(table):
                if col.header != wcol.header:
                    vals = [cell.normalized for cell in col.cells]
                    others.add(vals.index(max(vals)))
                    others.add(vals.index(min(vals)))
            if row not in others:
                break
        cue = "most" if op is Operator.ARGMAX else "fewest"
        question = f"which {sel.header} has the {cue} {wcol.header} ?"
        return question, (Action(ActionTag.A1, sel.header),
                          Action(ActionTag.A2, wcol.header),
                          Action(ActionTag.A3, op))
    row = _pick_row(rng, table)
    wcol = rng.choice(columns)
    others = [c for c in columns if c.header != wcol.header]
    sel = rng.choice(others)
    value = wcol.cells[row].raw
    if kind < 0.60 and sel.header in _NUMBER_HEADERS:
        question = f"how many {sel.header} does the {wcol.header} {value} have ?"
    else:
        question = f"which {sel.header} has {wcol.header} {value} ?"
    return question, _eq_actions(sel.header, wcol.header, value)


def _copy_turn(rng, table: Table, previous: LogicalForm):
    """A turn whose gold sketch copies from `previous`."""
    columns = list(table.columns)
    kinds = []
    if previous.conditions:
        kinds.append("copy_where")
    kinds.append("copy_select")
    if len(previous.conditions) == 1:
        prev_rows = _condition_rows(table, previous)
        if prev_rows:
            kinds.append("copy_all")
    kind = rng.choice(kinds)
    if kind == "copy_where":
        newsel = rng.choice([c for c in columns
                             if c.header != previous.select_column])
        question = f"and the {newsel.header} of that one ?"
        return question, (Action(ActionTag.A6), Action(ActionTag.A1, newsel.header))
    if kind == "copy_select":
        row = _pick_row(rng, table)
        wcol = rng.choice([c for c in columns
                           if c.header != previous.select_column] or columns)
        value = wcol.cells[row].raw
        question = f"what about when {wcol.header} is {value} ?"
        return question, (Action(ActionTag.A5), Action(ActionTag.A2, wcol.header),
                          Action(ActionTag.A3, Operator.EQ),
                          Action(ActionTag.A4, value))
    prev_rows = sorted(_condition_rows(table, previous))
    row = rng.choice(prev_rows)
    used = {c.column for c in previous.conditions} | {previous.select_column}
    wcol = rng.choice([c for c in columns if c.header not in used] or columns)
    value = wcol.cells[row].raw
    question = f"of those , which one has {wcol.header} {value} ?"
    return question, (Action(ActionTag.A7), Action(ActionTag.A2, wcol.header),
                      Action(ActionTag.A3, Operator.EQ),
                      Action(ActionTag.A4, value))


def _condition_rows(table: Table, lf: LogicalForm):
    from .executor import eval_condition
    rows = set(range(table.n_rows))
    for cond in lf.conditions:
        rows &= eval_condition(table, cond)
    return rows


def gen_synthetic(spec: SyntheticSpec):
    """Generate conversations: [{"id", "table", "turns": [...]}], seeded."""
    rng = random.Random(spec.seed)
    conversations = []
    for i in range(spec.n_tables):
        table = _make_table(rng, spec, i)
        n_turns = rng.randint(*spec.turns_range)
        turns = []
        previous = None
        for t in range(n_turns):
            for _attempt in range(20):
                if previous is not None and rng.random() < spec.copy_turn_fraction:
                    question, actions = _copy_turn(rng, table, previous)
                else:
                    question, actions = _fresh_turn(rng, table)
                lf = assemble(actions, previous)
                denotation = execute(lf, table)
                if denotation.values:
                    break
            if not denotation.values:
                continue
            turns.append({
                "question": question,
                "answers": denotation.texts,
                "gold_lf": lf,
                "gold_actions": actions,
                "sketch": sketch_of(actions).id.value,
            })
            previous = lf
        conversations.append({"id": f"conv-{i}", "table": table, "turns": turns})
    return conversations


def write_corpus(conversations, out_dir):
    """Write tables/, conversations.jsonl (answers only), gold.jsonl."""
    out = Path(out_dir)
    (out / "tables").mkdir(parents=True, exist_ok=True)
    tables_written = {}
    conv_lines = []
    gold_lines = []
    for conv in conversations:
        table = conv["table"]
        if table.id not in tables_written:
            rel = f"tables/{table.id}.csv"
            lines = [",".join(col.header for col in table.columns)]
            for r in range(table.n_rows):
                lines.append(",".join(col.cells[r].raw for col in table.columns))
            (out / rel).write_text("\n".join(lines) + "\n", encoding="utf-8")
            tables_written[table.id] = rel
        conv_lines.append(json.dumps({
            "id": conv["id"],
            "tableFile": tables_written[table.id],
            "turns": [{"question": t["question"], "answers": t["answers"]}
                      for t in conv["turns"]],
        }, sort_keys=True))
        gold_lines.append(json.dumps({
            "id": conv["id"],
            "turns": [{"lf": render(t["gold_lf"]), "sketch": t["sketch"]}
                      for t in conv["turns"]],
        }, sort_keys=True))
    (out / "conversations.jsonl").write_text("\n".join(conv_lines) + "\n",
                                             encoding="utf-8")
    (out / "gold.jsonl").write_text("\n".join(gold_lines) + "\n",
                                    encoding="utf-8")
    return out / "conversations.jsonl"
