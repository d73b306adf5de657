"""Set-based extraction quality metrics.

Predicted and gold triples are compared as exact canonicalized strings; a
triple is either right or wrong, there is no partial credit. Accuracy here
is hits over the union of predictions and gold (tp / (tp + fp + fn)), which
is the same quantity as 1 / (1/P + 1/R - 1) whenever P and R are nonzero.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from ..errors import CorpusFormatError
from ..graph.normalize import normalize_entity_name
from ..relations import parse_relation

Triple = tuple[str, str, str]


def canonical_triple(subject: str, predicate: str, obj: str) -> Triple:
    """Canonical comparison form: normalized names, canonical relation surface.

    An unknown predicate is kept folded-as-given so that mismatched
    predicates compare unequal rather than exploding.
    """
    relation = parse_relation(predicate)
    surface = relation.value if relation is not None else predicate.strip()
    return (normalize_entity_name(subject), surface, normalize_entity_name(obj))


@dataclass(frozen=True)
class ExtractionMetrics:
    tp: int
    fp: int
    fn: int
    precision: float
    recall: float
    f1: float
    accuracy: float
    degenerate: bool = False

    def as_dict(self) -> dict:
        return {
            "tp": self.tp,
            "fp": self.fp,
            "fn": self.fn,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "accuracy": self.accuracy,
            "degenerate": self.degenerate,
        }


def _metrics_from_counts(tp: int, fp: int, fn: int) -> ExtractionMetrics:
    degenerate = False
    if tp + fp > 0:
        precision = tp / (tp + fp)
    else:
        precision, degenerate = 1.0, True
    if tp + fn > 0:
        recall = tp / (tp + fn)
    else:
        recall, degenerate = 1.0, True
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    if tp + fp + fn > 0:
        accuracy = tp / (tp + fp + fn)
    else:
        accuracy, degenerate = 1.0, True
    return ExtractionMetrics(
        tp=tp,
        fp=fp,
        fn=fn,
        precision=precision,
        recall=recall,
        f1=f1,
        accuracy=accuracy,
        degenerate=degenerate,
    )


def extraction_metrics(predicted: Iterable[Triple], gold: Iterable[Triple]) -> ExtractionMetrics:
    """Compare two canonicalized triple sets.

    Zero-denominator convention: a metric whose denominator is empty is 1.0
    and the result is flagged degenerate.
    """
    predicted_set = set(predicted)
    gold_set = set(gold)
    tp = len(predicted_set & gold_set)
    fp = len(predicted_set - gold_set)
    fn = len(gold_set - predicted_set)
    return _metrics_from_counts(tp, fp, fn)


def accuracy_from_pr(precision: float, recall: float) -> float:
    """Accuracy implied by (P, R): 1 / (1/P + 1/R - 1).

    Holds for any tp/fp/fn realizing the given precision and recall.
    """
    if not 0 < precision <= 1:
        raise ValueError(f"precision must be in (0, 1], got {precision}")
    if not 0 < recall <= 1:
        raise ValueError(f"recall must be in (0, 1], got {recall}")
    return 1.0 / (1.0 / precision + 1.0 / recall - 1.0)


@dataclass(frozen=True)
class GoldAnnotation:
    """One audited item: what the extractor said vs. what the annotator says."""

    item_id: str
    predicted: frozenset[Triple]
    gold: frozenset[Triple]
    chunk_id: str = ""


def aggregate_metrics(annotations: Sequence[GoldAnnotation]) -> ExtractionMetrics:
    """Micro-average over items: sum tp/fp/fn, then apply the formulas once."""
    tp = fp = fn = 0
    for annotation in annotations:
        tp += len(annotation.predicted & annotation.gold)
        fp += len(annotation.predicted - annotation.gold)
        fn += len(annotation.gold - annotation.predicted)
    return _metrics_from_counts(tp, fp, fn)


def load_triple_file(path: str | Path) -> set[Triple]:
    """Read a line-delimited JSON triple file into a canonical set.

    Each line is an object with subject/predicate/object string fields;
    blank lines are ignored.
    """
    triples: set[Triple] = set()
    text = Path(path).read_text(encoding="utf-8")
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CorpusFormatError(f"{path}:{line_no}: not valid JSON ({exc.msg})") from exc
        if not isinstance(record, dict):
            raise CorpusFormatError(f"{path}:{line_no}: record is not an object")
        try:
            subject, predicate, obj = record["subject"], record["predicate"], record["object"]
        except KeyError as exc:
            raise CorpusFormatError(f"{path}:{line_no}: missing field {exc}") from exc
        if not all(isinstance(v, str) and v.strip() for v in (subject, predicate, obj)):
            raise CorpusFormatError(f"{path}:{line_no}: triple fields must be non-empty strings")
        triples.add(canonical_triple(subject, predicate, obj))
    return triples
