"""Conversational table question answering.

Maps multi-turn natural-language questions over a single web table to
SQL-like logical forms, executes them for answers, and learns its scoring
modules from question-answer pairs via search-based label generation.
"""

from .executor import Denotation, MatchKind, denotation_matches, execute
from .logical_form import (
    Action,
    ActionTag,
    Condition,
    LogicalForm,
    Operator,
    Sketch,
    SketchId,
    assemble,
    parse_lf,
    render,
)
from .pipeline import ConversationState, ScoredParse, answer, evaluate, new_session, parse_turn
from .scorer import ModelWeights, TrainConfig, train
from .search import LabelResult, SearchConfig, coverage_report, enumerate_candidates, search_labels
from .table_model import Cell, CellType, Column, Table, infer_cell_type, infer_header_type, load_table, normalize_value

__version__ = "0.1.0"
