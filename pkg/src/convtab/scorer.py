"""Feature-based log-linear decision modules.

Five heads mirror the decision structure of parsing: sketch controller,
SELECT-column, WHERE-column, operator, and WHERE-value prediction. Each head
is a softmax over sparse feature dot products. The value head linearly
combines its learned distribution with a normalized word-overlap score.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field

from .errors import EmptyColumnError, EmptyTableError, NoCoveredLabelsError
from .logical_form import (
    ActionTag,
    OPERATORS,
    Operator,
    SKETCHES,
    SketchId,
    sketch_of,
)
from .search import distinct_cell_values
from .table_model import CellType, Column, Table, normalize_text, tokenize

MODEL_VERSION = "convtab-loglinear-1"
DEFAULT_LAMBDA = 0.7

HEAD_NAMES = ("controller", "selectCol", "whereCol", "operator", "value")

NUMERIC_TYPES = {CellType.NUMBER, CellType.YEAR, CellType.UNIT}

COREF_CUES = ("that", "those", "ones", "of them", "it")
START_NGRAMS = ("how many", "how much", "which", "what", "who", "when", "show")

_SUFFIXES = ("ing", "ed", "es", "s")


def stem(token: str) -> str:
    """Tiny deterministic suffix stripper; not a linguistic stemmer."""
    for suffix in _SUFFIXES:
        if token.endswith(suffix) and len(token) - len(suffix) >= 3:
            return token[: -len(suffix)]
    return token


@dataclass
class ModelWeights:
    """Sparse per-head weights. controller/operator heads are class-keyed."""

    version: str = MODEL_VERSION
    lam: float = DEFAULT_LAMBDA
    heads: dict = field(default_factory=dict)

    def __post_init__(self):
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError("lambda must be in [0, 1]")
        for name in HEAD_NAMES:
            self.heads.setdefault(name, {})
        for sketch in SKETCHES:
            self.heads["controller"].setdefault(sketch.id.value, {})
        for op in OPERATORS:
            self.heads["operator"].setdefault(op.name, {})

    @classmethod
    def zero(cls, lam: float = DEFAULT_LAMBDA):
        return cls(lam=lam)

    def copy(self):
        return ModelWeights(version=self.version, lam=self.lam,
                            heads=json.loads(json.dumps(self.heads)))

    def to_json(self):
        return {"version": self.version, "lambda": self.lam, "heads": self.heads}

    @classmethod
    def from_json(cls, data):
        return cls(version=data["version"], lam=data["lambda"],
                   heads=data["heads"])

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json(), fh, sort_keys=True, indent=1)

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(json.load(fh))


@dataclass(frozen=True)
class DecisionDistribution:
    choices: tuple
    probs: tuple

    @property
    def argmax(self):
        best = max(range(len(self.probs)), key=lambda i: (self.probs[i], -i))
        return self.choices[best]

    def prob_of(self, choice):
        for c, p in zip(self.choices, self.probs):
            if c == choice:
                return p
        return 0.0

    def top(self, k):
        order = sorted(range(len(self.probs)),
                       key=lambda i: (-self.probs[i], i))
        return [(self.choices[i], self.probs[i]) for i in order[:k]]


def dot(weights: dict, features: dict) -> float:
    return sum(weights.get(k, 0.0) * v for k, v in features.items())


def softmax(scores):
    m = max(scores)
    exps = [math.exp(s - m) for s in scores]
    z = sum(exps)
    return [e / z for e in exps]


# ---------------------------------------------------------------- featurizers

def featurize_controller(current: str, previous: str | None) -> dict:
    """Question-level features for sketch classification."""
    features = {"bias": 1.0}
    tokens = tokenize(current)
    folded = normalize_text(current)
    for tok in tokens:
        features[f"uni={tok}"] = 1.0
    for a, b in zip(tokens, tokens[1:]):
        features[f"bi={a}_{b}"] = 1.0
    for cue in COREF_CUES:
        if (cue in folded.split() if " " not in cue else cue in folded):
            features[f"cue={cue.replace(' ', '_')}"] = 1.0
    for ngram in START_NGRAMS:
        if folded.startswith(ngram):
            features[f"start={ngram.replace(' ', '_')}"] = 1.0
    if previous is not None:
        features["has_prev"] = 1.0
        prev_tokens = set(tokenize(previous))
        if tokens:
            overlap = len(prev_tokens & set(tokens)) / len(tokens)
            features["prev_overlap"] = overlap
    return features


def column_features(question: str, table: Table, column: Column) -> dict:
    """Per-column features shared by the select and where heads."""
    q_tokens = tokenize(question)
    q_set = set(q_tokens)
    q_stems = {stem(t) for t in q_tokens}
    folded = normalize_text(question)
    header = list(column.header_tokens)
    exact = sum(1 for t in header if t in q_set)
    stems = sum(1 for t in header if stem(t) in q_stems)
    features = {
        "header_exact": float(exact),
        "header_stem": float(stems),
        "header_frac": exact / len(header) if header else 0.0,
    }
    # Position of the first matching header token, scaled so earlier is larger.
    if q_tokens:
        for i, tok in enumerate(q_tokens):
            if tok in header or stem(tok) in {stem(h) for h in header}:
                features["header_pos"] = 1.0 - i / len(q_tokens)
                if i > 0:
                    prev = q_tokens[i - 1]
                    if prev in ("which", "what", "show", "all"):
                        features["follows_wh"] = 1.0
                    if prev in ("most", "fewest", "least", "highest", "lowest",
                                "largest", "smallest"):
                        features["follows_sup"] = 1.0
                    if prev in ("when", "where"):
                        features["follows_when"] = 1.0
                break
    if column.type in NUMERIC_TYPES and ("how many" in folded
                                         or "how much" in folded):
        features["type_howmany"] = 1.0
    if column.type in (CellType.DATE, CellType.YEAR) and (
            "when" in q_set or "year" in q_set):
        features["type_when"] = 1.0
    if column.cells:
        appearing = sum(
            1 for cell in column.cells
            if cell.raw.strip() and overlap_score(cell.raw, question) >= 1.0)
        features["cell_frac"] = appearing / len(column.cells)
    return features


def operator_features(question: str) -> dict:
    folded = normalize_text(question)
    tokens = set(tokenize(question))
    features = {"bias": 1.0}
    cues = {
        "cue_max": any(w in tokens for w in
                       ("most", "largest", "highest", "biggest", "maximum", "best")),
        "cue_min": any(w in tokens for w in
                       ("least", "fewest", "smallest", "lowest", "minimum")),
        "cue_gt": any(p in folded for p in
                      ("more than", "greater than", "over", "after", "above")),
        "cue_geq": "at least" in folded or "or more" in folded,
        "cue_lt": any(p in folded for p in
                      ("less than", "fewer than", "under", "before", "below")),
        "cue_leq": "at most" in folded or "or less" in folded or "or fewer" in folded,
        "cue_neq": "not" in tokens or "other than" in folded
                   or "except" in tokens or "besides" in tokens,
    }
    for name, fired in cues.items():
        if fired:
            features[name] = 1.0
    return features


def overlap_score(cell_text: str, question: str) -> float:
    """Fraction of the cell's tokens present in the question, in [0, 1]."""
    cell_tokens = tokenize(cell_text)
    if not cell_tokens:
        return 0.0
    q_set = set(tokenize(question))
    folded = normalize_text(question)
    hit = 0
    for tok in cell_tokens:
        if tok in q_set:
            hit += 1
        elif tok.isdigit() and tok in folded:
            hit += 1
    return hit / len(cell_tokens)


def value_features(value_text: str, column: Column, question: str) -> dict:
    count = sum(1 for cell in column.cells
                if normalize_text(cell.raw) == normalize_text(value_text))
    rep = next((cell for cell in column.cells
                if normalize_text(cell.raw) == normalize_text(value_text)), None)
    return {
        "overlap": overlap_score(value_text, question),
        "type_match": 1.0 if rep is not None and rep.type is column.type else 0.0,
        "freq": count / len(column.cells) if column.cells else 0.0,
    }


# ------------------------------------------------------------------- scoring

def score_sketch(weights: ModelWeights, features: dict,
                 has_previous: bool) -> DecisionDistribution:
    """Softmax over the five sketches; copy sketches masked without history."""
    allowed = [s for s in SKETCHES if has_previous or not s.has_copy]
    scores = [dot(weights.heads["controller"][s.id.value], features)
              for s in allowed]
    probs = softmax(scores)
    prob_by_id = dict(zip((s.id for s in allowed), probs))
    return DecisionDistribution(
        choices=tuple(s.id for s in SKETCHES),
        probs=tuple(prob_by_id.get(s.id, 0.0) for s in SKETCHES))


def score_column(weights: ModelWeights, question: str, table: Table,
                 role: str) -> DecisionDistribution:
    """Distribution over columns for SELECT ('select') or WHERE ('where')."""
    if not table.columns:
        raise EmptyTableError(f"table {table.id!r} has no columns")
    head = weights.heads["selectCol" if role == "select" else "whereCol"]
    vectors = [column_features(question, table, col) for col in table.columns]
    probs = softmax([dot(head, vec) for vec in vectors])
    return DecisionDistribution(
        choices=tuple(col.header for col in table.columns), probs=tuple(probs))


def score_operator(weights: ModelWeights, question: str) -> DecisionDistribution:
    features = operator_features(question)
    scores = [dot(weights.heads["operator"][op.name], features)
              for op in OPERATORS]
    return DecisionDistribution(choices=tuple(OPERATORS),
                                probs=tuple(softmax(scores)))


def score_value(weights: ModelWeights, lam: float, question: str,
                column: Column) -> DecisionDistribution:
    """lam * learned softmax + (1 - lam) * softmax of overlap scores."""
    values = distinct_cell_values(column)
    if not values:
        raise EmptyColumnError(f"column {column.header!r} has no usable cells")
    vectors = [value_features(v, column, question) for v in values]
    learned = softmax([dot(weights.heads["value"], vec) for vec in vectors])
    overlap = softmax([overlap_score(v, question) for v in values])
    probs = [lam * p + (1.0 - lam) * a for p, a in zip(learned, overlap)]
    return DecisionDistribution(choices=tuple(values), probs=tuple(probs))


# ------------------------------------------------------------------ training

@dataclass(frozen=True)
class ClasswiseEvent:
    """Gold class among fixed classes, each with its own weight map."""
    head: str
    classes: tuple
    features: dict
    gold: str
    weight: float = 1.0


@dataclass(frozen=True)
class CandidateEvent:
    """Gold candidate among per-candidate feature vectors sharing one map."""
    head: str
    vectors: tuple
    gold: int
    weight: float = 1.0


def _event_probs(event, heads):
    if isinstance(event, ClasswiseEvent):
        scores = [dot(heads[event.head][c], event.features)
                  for c in event.classes]
    else:
        scores = [dot(heads[event.head], vec) for vec in event.vectors]
    return softmax(scores)


def log_likelihood(events, weights: ModelWeights) -> float:
    total = 0.0
    for event in events:
        probs = _event_probs(event, weights.heads)
        if isinstance(event, ClasswiseEvent):
            gold = event.classes.index(event.gold)
        else:
            gold = event.gold
        total += event.weight * math.log(max(probs[gold], 1e-300))
    return total


def gradient(events, weights: ModelWeights) -> dict:
    """Sparse gradient of the summed log-likelihood, keyed like `heads`."""
    grads = {name: {} for name in HEAD_NAMES}
    for sketch in SKETCHES:
        grads["controller"][sketch.id.value] = {}
    for op in OPERATORS:
        grads["operator"][op.name] = {}

    def bump(target, features, scale):
        for k, v in features.items():
            target[k] = target.get(k, 0.0) + scale * v

    for event in events:
        probs = _event_probs(event, weights.heads)
        if isinstance(event, ClasswiseEvent):
            for cls, p in zip(event.classes, probs):
                indicator = 1.0 if cls == event.gold else 0.0
                bump(grads[event.head][cls], event.features,
                     event.weight * (indicator - p))
        else:
            target = grads[event.head]
            for i, (vec, p) in enumerate(zip(event.vectors, probs)):
                indicator = 1.0 if i == event.gold else 0.0
                bump(target, vec, event.weight * (indicator - p))
    return grads


def build_events(labels, tables):
    """Decompose covered label results into per-head training events.

    `tables` maps table_id to Table. Multiple surviving candidates share
    weight 1/n so spurious survivors are soft-weighted.
    """
    events = []
    for label in labels:
        if not label.covered or not label.candidates:
            continue
        table = tables[label.table_id]
        share = 1.0 / len(label.candidates)
        has_prev = label.previous_question is not None
        ctrl_features = featurize_controller(label.question,
                                             label.previous_question)
        col_vectors = None
        for lf, actions in label.candidates:
            sketch = sketch_of(actions)
            if sketch.has_copy and not has_prev:
                continue
            events.append(ClasswiseEvent(
                head="controller",
                classes=tuple(s.id.value for s in SKETCHES
                              if has_prev or not s.has_copy),
                features=ctrl_features, gold=sketch.id.value, weight=share))
            where_col = None
            for action in actions:
                if action.tag is ActionTag.A1:
                    idx = table.column_index(action.argument)
                    if idx is not None:
                        if col_vectors is None:
                            col_vectors = tuple(
                                column_features(label.question, table, col)
                                for col in table.columns)
                        events.append(CandidateEvent(
                            head="selectCol", vectors=col_vectors,
                            gold=idx, weight=share))
                elif action.tag is ActionTag.A2:
                    where_col = action.argument
                    idx = table.column_index(action.argument)
                    if idx is not None:
                        if col_vectors is None:
                            col_vectors = tuple(
                                column_features(label.question, table, col)
                                for col in table.columns)
                        events.append(CandidateEvent(
                            head="whereCol", vectors=col_vectors,
                            gold=idx, weight=share))
                elif action.tag is ActionTag.A3:
                    events.append(ClasswiseEvent(
                        head="operator",
                        classes=tuple(op.name for op in OPERATORS),
                        features=operator_features(label.question),
                        gold=action.argument.name, weight=share))
                elif action.tag is ActionTag.A4:
                    column = table.column(where_col)
                    values = distinct_cell_values(column)
                    keys = [normalize_text(v) for v in values]
                    target = normalize_text(str(action.argument))
                    if target in keys:
                        events.append(CandidateEvent(
                            head="value",
                            vectors=tuple(value_features(v, column,
                                                         label.question)
                                          for v in values),
                            gold=keys.index(target), weight=share))
    return events


@dataclass
class TrainConfig:
    epochs: int = 15
    learning_rate: float = 0.5
    l2: float = 1e-4
    seed: int = 0
    heldout_fraction: float = 0.1
    lam: float = DEFAULT_LAMBDA


def train(labels, tables, config: TrainConfig | None = None,
          init: ModelWeights | None = None):
    """Gradient ascent on summed per-decision log-likelihood with L2.

    Returns (ModelWeights, per-head held-out accuracy dict). Deterministic
    for a fixed seed.
    """
    config = config or TrainConfig()
    events = build_events(labels, tables)
    if not events:
        raise NoCoveredLabelsError("no covered labels to train on")
    weights = (init.copy() if init is not None
               else ModelWeights.zero(lam=config.lam))
    weights.lam = config.lam

    rng = random.Random(config.seed)
    shuffled = list(events)
    rng.shuffle(shuffled)
    n_held = int(len(shuffled) * config.heldout_fraction)
    heldout = shuffled[:n_held]
    training = shuffled[n_held:] or shuffled

    for epoch in range(config.epochs):
        order = list(training)
        random.Random(config.seed * 7919 + epoch).shuffle(order)
        for event in order:
            grads = gradient([event], weights)
            _sgd_step(weights.heads, grads, config.learning_rate, config.l2)

    accuracy = heldout_accuracy(heldout or training, weights)
    return weights, accuracy


def _sgd_step(heads, grads, lr, l2):
    for head, value in grads.items():
        if head in ("controller", "operator"):
            for cls, grad in value.items():
                target = heads[head][cls]
                for k, g in grad.items():
                    target[k] = target.get(k, 0.0) + lr * (g - l2 * target.get(k, 0.0))
        else:
            target = heads[head]
            for k, g in value.items():
                target[k] = target.get(k, 0.0) + lr * (g - l2 * target.get(k, 0.0))


def heldout_accuracy(events, weights: ModelWeights) -> dict:
    """Per-head argmax accuracy over a set of events."""
    hits = {}
    totals = {}
    for event in events:
        probs = _event_probs(event, weights.heads)
        best = max(range(len(probs)), key=lambda i: (probs[i], -i))
        if isinstance(event, ClasswiseEvent):
            correct = event.classes[best] == event.gold
        else:
            correct = best == event.gold
        totals[event.head] = totals.get(event.head, 0) + 1
        hits[event.head] = hits.get(event.head, 0) + (1 if correct else 0)
    return {head: hits[head] / totals[head] for head in totals}


def majority_baseline(events) -> dict:
    """Accuracy of always predicting each head's most frequent gold class."""
    golds = {}
    for event in events:
        gold = (event.gold if isinstance(event, ClasswiseEvent)
                else str(event.gold))
        golds.setdefault(event.head, []).append(gold)
    out = {}
    for head, values in golds.items():
        counts = {}
        for v in values:
            counts[v] = counts.get(v, 0) + 1
        out[head] = max(counts.values()) / len(values)
    return out
