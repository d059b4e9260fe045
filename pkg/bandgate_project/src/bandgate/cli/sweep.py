"""
Band-count sweeps: k-fold cross-validation for every (method, k) pair.

All fold jobs of a sweep share one bounded worker pool. Rows are written in
canonical order, so the CSV bytes do not depend on the worker count.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import pandas as pd

from ..config.constants import METHODS
from ..config.settings import settings
from ..core.exceptions import ConfigurationError
from ..core.logging_config import get_logger
from ..core.rng import Rng
from ..data.dataset import Dataset
from ..evaluation.reports import auc_rows, mean_curves, metric_frame, write_metric_csv, write_selection_csv
from ..training.config import TrainConfig
from ..training.cross_validation import STREAM_FOLDS, CrossValidationReport, FoldResult, fold_indices, run_fold

logger = get_logger(__name__)


@dataclass(frozen=True)
class SweepSpec:
    """Methods, band counts and folds of one sweep plus its output paths."""

    methods: Tuple[str, ...]
    ks: Tuple[int, ...]
    folds: int
    base: TrainConfig = field(default_factory=TrainConfig)
    out: Optional[Path] = None
    selections_out: Optional[Path] = None

    def validate(self, n_bands: int) -> "SweepSpec":
        if not self.methods:
            raise ConfigurationError("sweep needs at least one method")
        unknown = [m for m in self.methods if m not in METHODS]
        if unknown:
            raise ConfigurationError(f"unknown methods {unknown}, expected a subset of {METHODS}")
        if not self.ks:
            raise ConfigurationError("sweep needs at least one k")
        bad = [k for k in self.ks if not 1 <= k <= n_bands]
        if bad:
            raise ConfigurationError(f"k values {bad} outside [1, {n_bands}]")
        if self.folds < 2:
            raise ConfigurationError(f"folds must be >= 2, got {self.folds}")
        return self

    def selections_path(self) -> Optional[Path]:
        if self.selections_out is not None:
            return Path(self.selections_out)
        if self.out is None:
            return None
        out = Path(self.out)
        return out.with_name(f"{out.stem}_selections{out.suffix or '.csv'}")


@dataclass
class SweepResult:
    metrics: pd.DataFrame
    selections: pd.DataFrame
    aucs: Dict[str, float]
    reports: List[CrossValidationReport]


def run_sweep(spec: SweepSpec, data: Dataset, max_workers: Optional[int] = None) -> SweepResult:
    """
    Cross-validate every (method, k) and append one bands-AUC row per method.

    Args:
        spec: Sweep description
        data: Dataset shared by every job
        max_workers: Worker cap; defaults to BANDGATE_THREADS or the physical core count

    Returns:
        SweepResult with canonical metric and selection tables
    """
    spec.validate(data.n_bands)
    configs = [
        replace(spec.base, method=method, k=k).validate(data.n_bands, data.n_classes)
        for method in spec.methods
        for k in sorted(set(spec.ks))
    ]
    splits = fold_indices(data.n_samples, spec.folds, Rng(spec.base.seed).substream(STREAM_FOLDS))
    jobs = [(config, fold, idx) for config in configs for fold, idx in enumerate(splits)]

    workers = max(1, min(max_workers or settings.thread_cap(), len(jobs)))
    logger.info("sweep_start", methods=list(spec.methods), ks=sorted(set(spec.ks)), folds=spec.folds,
                jobs=len(jobs), workers=workers)
    if workers == 1:
        results: Sequence[FoldResult] = [run_fold(config, data, idx, fold) for config, fold, idx in jobs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(run_fold, config, data, idx, fold) for config, fold, idx in jobs]
            results = [future.result() for future in futures]

    reports = []
    for start, config in zip(range(0, len(results), spec.folds), configs):
        reports.append(CrossValidationReport(config, list(results[start:start + spec.folds])))

    metric_rows = [row for report in reports for row in report.metric_rows()]
    curves = mean_curves(pd.DataFrame(metric_rows), metric='oa')
    summary = auc_rows(curves)
    aucs = {row['method']: row['value'] for row in summary}

    selection_rows = [row for report in reports for row in report.selection_rows()]
    if spec.out is not None:
        metrics = write_metric_csv(metric_rows + summary, spec.out)
        selections = write_selection_csv(selection_rows, spec.selections_path())
    else:
        metrics = metric_frame(metric_rows + summary)
        selections = pd.DataFrame(selection_rows)

    logger.info("sweep_complete", rows=len(metrics), aucs=aucs)
    return SweepResult(metrics, selections, aucs, reports)
