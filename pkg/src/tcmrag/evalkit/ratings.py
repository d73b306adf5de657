"""Expert rating metrics over an items-by-raters matrix of 1..5 scores.

Agreement is Fleiss' kappa computed on ratings binarized at the correctness
threshold (score >= 3 counts as correct), giving a chance-corrected value in
[-1, 1]. Means and accuracies are plain cell statistics.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from ..errors import RatingsError

VALID_SCORES = frozenset({1, 2, 3, 4, 5})
DEFAULT_THRESHOLD = 3


@dataclass(frozen=True)
class RatingMatrix:
    """Complete grid: scores[i][j] is rater j's score for item i."""

    item_ids: tuple[str, ...]
    rater_ids: tuple[str, ...]
    scores: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if len(self.scores) != len(self.item_ids):
            raise RatingsError(
                f"{len(self.item_ids)} items but {len(self.scores)} score rows"
            )
        for item_id, row in zip(self.item_ids, self.scores):
            if len(row) != len(self.rater_ids):
                raise RatingsError(
                    f"item {item_id!r} has {len(row)} scores for {len(self.rater_ids)} raters"
                )
            for score in row:
                if score not in VALID_SCORES:
                    raise RatingsError(
                        f"item {item_id!r} has score {score!r}, expected an integer in 1..5"
                    )

    @property
    def n_items(self) -> int:
        return len(self.item_ids)

    @property
    def n_raters(self) -> int:
        return len(self.rater_ids)

    def cells(self) -> Iterable[int]:
        for row in self.scores:
            yield from row

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "RatingMatrix":
        """Build from bare score rows, synthesizing item and rater ids."""
        n_raters = len(rows[0]) if rows else 0
        return cls(
            item_ids=tuple(f"item{i + 1}" for i in range(len(rows))),
            rater_ids=tuple(f"rater{j + 1}" for j in range(n_raters)),
            scores=tuple(tuple(row) for row in rows),
        )

    @classmethod
    def from_records(cls, records: Iterable[tuple[str, str, int]]) -> "RatingMatrix":
        """Build from (item, rater, score) records; the grid must be complete."""
        item_ids: list[str] = []
        rater_ids: list[str] = []
        cells: dict[tuple[str, str], int] = {}
        for item, rater, score in records:
            if item not in item_ids:
                item_ids.append(item)
            if rater not in rater_ids:
                rater_ids.append(rater)
            if (item, rater) in cells:
                raise RatingsError(f"duplicate rating for item {item!r} by rater {rater!r}")
            cells[(item, rater)] = score
        missing = [
            (i, r) for i in item_ids for r in rater_ids if (i, r) not in cells
        ]
        if missing:
            i, r = missing[0]
            raise RatingsError(
                f"incomplete rating grid: no score for item {i!r} by rater {r!r} "
                f"({len(missing)} missing in total)"
            )
        return cls(
            item_ids=tuple(item_ids),
            rater_ids=tuple(rater_ids),
            scores=tuple(tuple(cells[(i, r)] for r in rater_ids) for i in item_ids),
        )


def load_ratings(path: str | Path) -> RatingMatrix:
    """Read line-delimited JSON records {"item":, "rater":, "score":}."""
    records: list[tuple[str, str, int]] = []
    text = Path(path).read_text(encoding="utf-8")
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise RatingsError(f"{path}:{line_no}: not valid JSON ({exc.msg})") from exc
        if not isinstance(record, dict):
            raise RatingsError(f"{path}:{line_no}: record is not an object")
        item, rater, score = record.get("item"), record.get("rater"), record.get("score")
        if not isinstance(item, str) or not isinstance(rater, str):
            raise RatingsError(f"{path}:{line_no}: 'item' and 'rater' must be strings")
        if not isinstance(score, int) or isinstance(score, bool):
            raise RatingsError(f"{path}:{line_no}: 'score' must be an integer")
        records.append((item, rater, score))
    if not records:
        raise RatingsError(f"{path}: no rating records")
    return RatingMatrix.from_records(records)


def mean_expert_score(matrix: RatingMatrix) -> float:
    """Arithmetic mean over every cell."""
    if matrix.n_items == 0 or matrix.n_raters == 0:
        raise RatingsError("rating matrix is empty")
    cells = list(matrix.cells())
    return sum(cells) / len(cells)


def response_accuracy(
    matrix: RatingMatrix, threshold: int = DEFAULT_THRESHOLD, *, per_item: bool = False
) -> float:
    """Fraction of ratings at or above the threshold.

    With ``per_item`` set, an item counts as correct when at least half of
    its ratings clear the threshold, and the fraction is over items.
    """
    if matrix.n_items == 0 or matrix.n_raters == 0:
        raise RatingsError("rating matrix is empty")
    if per_item:
        correct = sum(
            1
            for row in matrix.scores
            if sum(1 for s in row if s >= threshold) * 2 >= len(row)
        )
        return correct / matrix.n_items
    cells = list(matrix.cells())
    return sum(1 for s in cells if s >= threshold) / len(cells)


def inter_rater_agreement(matrix: RatingMatrix, threshold: int = DEFAULT_THRESHOLD) -> float:
    """Fleiss' kappa over ratings binarized at the threshold.

    Unanimity across all cells makes expected and observed agreement both 1;
    that case is defined as 1.0.
    """
    if matrix.n_raters < 2:
        raise RatingsError(f"agreement needs at least 2 raters, got {matrix.n_raters}")
    if matrix.n_items < 1:
        raise RatingsError("agreement needs at least 1 item")
    n = matrix.n_items
    r = matrix.n_raters

    # Per-item counts in the two categories (correct / not correct).
    per_item_agreement = []
    correct_total = 0
    for row in matrix.scores:
        correct = sum(1 for s in row if s >= threshold)
        correct_total += correct
        wrong = r - correct
        per_item_agreement.append((correct * correct + wrong * wrong - r) / (r * (r - 1)))

    observed = sum(per_item_agreement) / n
    p_correct = correct_total / (n * r)
    expected = p_correct * p_correct + (1 - p_correct) * (1 - p_correct)
    if expected == 1.0:
        return 1.0
    return (observed - expected) / (1 - expected)
