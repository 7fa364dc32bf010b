import random

import pytest
from hypothesis import given, strategies as st

from convtab.errors import (
    IllegalSequenceError,
    LogicalFormSyntaxError,
    MalformedConditionError,
    MissingPreviousError,
)
from convtab.logical_form import (
    Action,
    ActionTag,
    Condition,
    LogicalForm,
    Operator,
    SKETCHES,
    SketchId,
    START,
    END,
    assemble,
    is_legal_sequence,
    legal_successors,
    parse_lf,
    render,
    sketch_of,
)

A1, A2, A3, A4 = ActionTag.A1, ActionTag.A2, ActionTag.A3, ActionTag.A4
A5, A6, A7 = ActionTag.A5, ActionTag.A6, ActionTag.A7

PREV = LogicalForm("City", (Condition("Year", Operator.EQ, "2008"),))


def test_operator_inventory():
    assert len(Operator) == 8
    assert [op.text for op in Operator] == [
        "=", "!=", ">", ">=", "<", "<=", "argmin", "argmax"]


def test_sketch_inventory():
    assert [s.action_tags for s in SKETCHES] == [
        (A1,), (A1, A2, A3, A4), (A5, A2, A3, A4), (A6, A1), (A7, A2, A3, A4)]


def test_condition_arity():
    with pytest.raises(MalformedConditionError):
        Condition("Year", Operator.ARGMAX, "2008")
    with pytest.raises(MalformedConditionError):
        Condition("Year", Operator.EQ, None)


def test_successors_start_without_history():
    assert legal_successors(START, has_previous=False) == {A1}


def test_successors_start_with_history():
    assert legal_successors(START, has_previous=True) == {A1, A5, A6, A7}


def test_successors_after_extremum():
    assert legal_successors(A3, True, pending_op=Operator.ARGMAX) == {END}
    assert legal_successors(A3, True, pending_op=Operator.EQ) == {A4}


def test_successors_a1_after_copy_where_ends():
    assert legal_successors(A1, True, after_copy_where=True) == {END}
    assert legal_successors(A1, True) == {A2, END}


def test_assemble_paper_example():
    lf = assemble([Action(A1, "City"), Action(A2, "Year"),
                   Action(A3, Operator.EQ), Action(A4, 2008)])
    assert render(lf) == "SELECT City WHERE Year = 2008"


def test_assemble_copy_where():
    lf = assemble([Action(A6), Action(A1, "Nations")], previous=PREV)
    assert render(lf) == "SELECT Nations WHERE Year = 2008"
    assert lf.conditions == PREV.conditions


def test_assemble_copy_select():
    lf = assemble([Action(A5), Action(A2, "Gold"), Action(A3, Operator.GT),
                   Action(A4, 0)], previous=PREV)
    assert lf.select_column == "City"
    assert render(lf) == "SELECT City WHERE Gold > 0"


def test_assemble_copy_all_appends():
    lf = assemble([Action(A7), Action(A2, "Gold"), Action(A3, Operator.GT),
                   Action(A4, 0)], previous=PREV)
    assert lf.select_column == "City"
    assert lf.conditions[0] == PREV.conditions[0]
    assert lf.conditions[1] == Condition("Gold", Operator.GT, "0")


def test_assemble_missing_previous():
    with pytest.raises(MissingPreviousError):
        assemble([Action(A5), Action(A2, "Gold"), Action(A3, Operator.GT),
                  Action(A4, 0)])


def test_assemble_illegal_sequences():
    with pytest.raises(IllegalSequenceError):
        assemble([Action(A2, "Year")])
    with pytest.raises(IllegalSequenceError):
        assemble([Action(A1, "City"), Action(A3, Operator.EQ)])
    # extremum must not take A4
    with pytest.raises(IllegalSequenceError):
        assemble([Action(A1, "City"), Action(A2, "Year"),
                  Action(A3, Operator.ARGMAX), Action(A4, 1)])
    # comparison op requires A4
    with pytest.raises(IllegalSequenceError):
        assemble([Action(A1, "City"), Action(A2, "Year"),
                  Action(A3, Operator.EQ)])
    # A6's A1 must end the sequence
    with pytest.raises(IllegalSequenceError):
        assemble([Action(A6), Action(A1, "City"), Action(A2, "Year"),
                  Action(A3, Operator.EQ), Action(A4, 1)], previous=PREV)


def test_assemble_extremum_condition():
    lf = assemble([Action(A1, "City"), Action(A2, "Nations"),
                   Action(A3, Operator.ARGMAX)])
    assert render(lf) == "SELECT City WHERE Nations argmax"


def test_sketch_of_folds_extremum():
    actions = [Action(A1, "City"), Action(A2, "Nations"),
               Action(A3, Operator.ARGMAX)]
    assert sketch_of(actions).id is SketchId.S_SELECT_WHERE


def test_every_sketch_is_a_legal_path():
    args = {A1: "c", A2: "c", A3: Operator.EQ, A4: "v"}
    for sketch in SKETCHES:
        actions = [Action(t, args.get(t)) for t in sketch.action_tags]
        assert is_legal_sequence(actions, has_previous=True)
        assert sketch_of(actions).id is sketch.id


@pytest.mark.parametrize("text,expected", [
    ("SELECT City WHERE Year = 2008", "SELECT City WHERE Year = 2008"),
    ("SELECT City", "SELECT City"),
    ("SELECT City WHERE Nations argmax", "SELECT City WHERE Nations argmax"),
    ('SELECT "Host City" WHERE Nations argmax',
     'SELECT "Host City" WHERE Nations argmax'),
    ("select city where year = 2008", "SELECT city WHERE year = 2008"),
])
def test_parse_render(text, expected):
    assert render(parse_lf(text)) == expected


def test_parse_quoted_column():
    lf = parse_lf('SELECT "Host City" WHERE Nations argmax')
    assert lf.select_column == "Host City"
    assert lf.conditions[0].op is Operator.ARGMAX


def test_parse_errors_carry_offset():
    with pytest.raises(LogicalFormSyntaxError) as err:
        parse_lf("SELECT City WHERE")
    assert err.value.offset >= 0
    with pytest.raises(LogicalFormSyntaxError):
        parse_lf("City WHERE Year = 2008")
    with pytest.raises(LogicalFormSyntaxError):
        parse_lf("SELECT City WHERE Year ~ 2008")


_col = st.text(alphabet="abcXYZ 9", min_size=1, max_size=8).map(str.strip).filter(bool)
_val = st.text(alphabet="ab9 .%", min_size=1, max_size=8).map(str.strip).filter(bool)


@st.composite
def logical_forms(draw):
    select = draw(_col)
    conditions = []
    for _ in range(draw(st.integers(0, 2))):
        op = draw(st.sampled_from(list(Operator)))
        if op.is_extremum:
            conditions.append(Condition(draw(_col), op))
        else:
            conditions.append(Condition(draw(_col), op, draw(_val)))
    return LogicalForm(select, tuple(conditions))


@given(logical_forms())
def test_round_trip(lf):
    assert parse_lf(render(lf)) == lf


def test_path_soundness_exhaustive_small():
    """assemble accepts exactly the sequences legal_successors accepts."""
    alphabet = ([Action(A1, "c0"), Action(A2, "c1"),
                 Action(A3, Operator.EQ), Action(A3, Operator.ARGMAX),
                 Action(A4, "v"), Action(A5), Action(A6), Action(A7)])
    for has_prev in (False, True):
        previous = PREV if has_prev else None
        for n in range(1, 4):
            stack = [()]
            for _ in range(n):
                stack = [s + (a,) for s in stack for a in alphabet]
            for seq in stack:
                legal = is_legal_sequence(list(seq), has_prev)
                try:
                    assemble(list(seq), previous)
                    accepted = True
                except (IllegalSequenceError, MissingPreviousError,
                        MalformedConditionError):
                    accepted = False
                assert accepted == legal, [a.tag.value for a in seq]
