"""
Classification metrics over a confusion matrix.

All metrics read a ``ConfusionMatrix`` whose entry (t, p) counts samples of
true class t predicted as p. Classes whose denominator is zero are excluded
from unweighted means and the exclusion is logged.
"""

from dataclasses import dataclass, field
from typing import Dict, List

import numpy as np

from ..core.exceptions import MetricError
from ..core.logging_config import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class ConfusionMatrix:
    counts: np.ndarray

    def __post_init__(self):
        counts = np.asarray(self.counts)
        if counts.ndim != 2 or counts.shape[0] != counts.shape[1] or counts.shape[0] == 0:
            raise MetricError(f"confusion matrix must be square and non-empty, got shape {counts.shape}")
        if np.any(counts < 0) or np.any(counts != np.round(counts)):
            raise MetricError("confusion matrix entries must be non-negative integers")
        object.__setattr__(self, 'counts', counts.astype(np.int64))

    @classmethod
    def from_predictions(cls, true: np.ndarray, predicted: np.ndarray, n_classes: int) -> "ConfusionMatrix":
        true = np.asarray(true, dtype=np.int64)
        predicted = np.asarray(predicted, dtype=np.int64)
        if true.shape != predicted.shape:
            raise MetricError(f"{true.size} labels but {predicted.size} predictions")
        counts = np.zeros((n_classes, n_classes), dtype=np.int64)
        np.add.at(counts, (true, predicted), 1)
        return cls(counts)

    @property
    def n_classes(self) -> int:
        return self.counts.shape[0]

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def true_totals(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    @property
    def predicted_totals(self) -> np.ndarray:
        return self.counts.sum(axis=0)

    def permuted(self, order: np.ndarray) -> "ConfusionMatrix":
        """Relabel classes, permuting rows and columns together."""
        order = np.asarray(order)
        return ConfusionMatrix(self.counts[np.ix_(order, order)])


def _require_samples(cm: ConfusionMatrix) -> None:
    if cm.total == 0:
        raise MetricError("confusion matrix has no samples")


def overall_accuracy(cm: ConfusionMatrix) -> float:
    _require_samples(cm)
    return float(np.trace(cm.counts) / cm.total)


def average_accuracy(cm: ConfusionMatrix) -> float:
    """Mean per-class recall over classes that have at least one true sample."""
    _require_samples(cm)
    rows = cm.true_totals
    populated = rows > 0
    if not populated.all():
        logger.info("classes_excluded", metric="aa", classes=np.flatnonzero(~populated).tolist())
    recall = np.diag(cm.counts)[populated] / rows[populated]
    return float(recall.mean())


@dataclass(frozen=True)
class KappaResult:
    value: float
    degenerate: bool = False

    def __float__(self) -> float:
        return self.value


def kappa_report(cm: ConfusionMatrix) -> KappaResult:
    """
    Cohen's kappa with its degeneracy flag.

    Evaluated in exact integer arithmetic as
    (N*trace - sum_t row_t*col_t) / (N^2 - sum_t row_t*col_t).
    When chance agreement is total (p_e = 1) kappa is defined as 0 and flagged.
    """
    _require_samples(cm)
    total = cm.total
    trace = int(np.trace(cm.counts))
    chance = sum(int(r) * int(c) for r, c in zip(cm.true_totals, cm.predicted_totals))
    denominator = total * total - chance
    if denominator == 0:
        logger.warning("kappa_degenerate", total=total)
        return KappaResult(0.0, degenerate=True)
    return KappaResult((total * trace - chance) / denominator)


def kappa(cm: ConfusionMatrix) -> float:
    return kappa_report(cm).value


@dataclass
class ClassMetricsReport:
    """Per-class IoU, precision and recall (NaN where excluded) plus aggregates."""

    iou: np.ndarray
    precision: np.ndarray
    recall: np.ndarray
    mean_iou: float
    mean_precision: float
    mean_recall: float
    weighted_iou: float
    overall_iou: float
    excluded: Dict[str, List[int]] = field(default_factory=dict)


def _ratio(numerator: np.ndarray, denominator: np.ndarray):
    defined = denominator > 0
    values = np.full(numerator.shape, np.nan)
    values[defined] = numerator[defined] / denominator[defined]
    return values, defined


def per_class_iou_precision_recall(cm: ConfusionMatrix) -> ClassMetricsReport:
    _require_samples(cm)
    tp = np.diag(cm.counts).astype(np.float64)
    fp = cm.predicted_totals - tp
    fn = cm.true_totals - tp

    iou, iou_defined = _ratio(tp, tp + fp + fn)
    precision, precision_defined = _ratio(tp, tp + fp)
    recall, recall_defined = _ratio(tp, tp + fn)

    excluded = {}
    for name, defined in (('iou', iou_defined), ('precision', precision_defined), ('recall', recall_defined)):
        if not defined.all():
            excluded[name] = np.flatnonzero(~defined).tolist()
    if excluded:
        logger.info("classes_excluded", **excluded)

    frequency = cm.true_totals / cm.total
    weighted_mask = iou_defined & (frequency > 0)
    weighted_iou = float(np.sum(frequency[weighted_mask] * iou[weighted_mask]) / np.sum(frequency[weighted_mask]))

    return ClassMetricsReport(
        iou=iou,
        precision=precision,
        recall=recall,
        mean_iou=float(np.mean(iou[iou_defined])),
        mean_precision=float(np.mean(precision[precision_defined])),
        mean_recall=float(np.mean(recall[recall_defined])),
        weighted_iou=weighted_iou,
        overall_iou=float(tp.sum() / (tp + fp + fn).sum()),
        excluded=excluded,
    )


def metric_table(cm: ConfusionMatrix) -> Dict[str, float]:
    """Every scalar metric of the suite, keyed by its report name."""
    classes = per_class_iou_precision_recall(cm)
    return {
        'oa': overall_accuracy(cm),
        'aa': average_accuracy(cm),
        'kappa': kappa(cm),
        'mean_iou': classes.mean_iou,
        'overall_iou': classes.overall_iou,
        'weighted_iou': classes.weighted_iou,
        'mean_precision': classes.mean_precision,
        'mean_recall': classes.mean_recall,
    }


def evaluate(true: np.ndarray, predicted: np.ndarray, n_classes: int) -> Dict[str, float]:
    return metric_table(ConfusionMatrix.from_predictions(true, predicted, n_classes))
