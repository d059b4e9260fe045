"""
Metrics, band-count curves and CSV reports.
"""
from .bands_curve import BandsCurve, bands_auc, selection_stability
from .metrics import (
    ClassMetricsReport,
    ConfusionMatrix,
    KappaResult,
    average_accuracy,
    evaluate,
    kappa,
    kappa_report,
    metric_table,
    overall_accuracy,
    per_class_iou_precision_recall,
)
