"""Evaluation formulas: extraction set metrics and expert rating metrics."""

from .extraction import (
    ExtractionMetrics,
    GoldAnnotation,
    accuracy_from_pr,
    aggregate_metrics,
    canonical_triple,
    extraction_metrics,
    load_triple_file,
)
from .ratings import (
    RatingMatrix,
    inter_rater_agreement,
    load_ratings,
    mean_expert_score,
    response_accuracy,
)
from .report import (
    EXTRACTION_TARGETS,
    RATING_TARGETS,
    consistency_report,
    render_consistency_report,
)

__all__ = [
    "ExtractionMetrics",
    "GoldAnnotation",
    "accuracy_from_pr",
    "aggregate_metrics",
    "canonical_triple",
    "extraction_metrics",
    "load_triple_file",
    "RatingMatrix",
    "inter_rater_agreement",
    "load_ratings",
    "mean_expert_score",
    "response_accuracy",
    "EXTRACTION_TARGETS",
    "RATING_TARGETS",
    "consistency_report",
    "render_consistency_report",
]
