"""
k-fold cross-validation with a bounded worker pool.

Folds come from one seeded permutation split into near-equal parts; each fold
trains from its own Rng substream, so the aggregated result does not depend
on how many workers ran or in which order they finished.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional

import numpy as np
import pandas as pd

from ..config.constants import FOLD_METRICS
from ..config.settings import settings
from ..core.exceptions import DatasetError
from ..core.logging_config import get_logger
from ..core.rng import Rng
from ..data.dataset import Dataset
from ..selection.band_selection import BandSelection
from .config import TrainConfig
from .trainer import train

logger = get_logger(__name__)

STREAM_FOLDS = 100
STREAM_FOLD_RUN = 101


def fold_indices(n_samples: int, folds: int, rng: Rng) -> List[np.ndarray]:
    """Test indices per fold; the first ``n_samples % folds`` folds get one extra sample."""
    if folds < 2:
        raise DatasetError(f"cross-validation needs at least 2 folds, got {folds}")
    if n_samples < folds:
        raise DatasetError(f"{n_samples} samples are too few for {folds} folds")
    return np.array_split(rng.permutation(n_samples), folds)


@dataclass(frozen=True)
class FoldResult:
    fold: int
    metrics: Dict[str, float]
    selection: BandSelection
    test_size: int


@dataclass
class CrossValidationReport:
    config: TrainConfig
    folds: List[FoldResult]

    def table(self) -> pd.DataFrame:
        """One row per fold, one column per metric."""
        rows = [{'fold': f.fold, **{m: f.metrics[m] for m in FOLD_METRICS}} for f in self.folds]
        return pd.DataFrame(rows, columns=['fold', *FOLD_METRICS]).set_index('fold')

    def summary(self) -> pd.DataFrame:
        """Mean and sample standard deviation of every metric across folds."""
        table = self.table()
        return pd.DataFrame({'mean': table.mean(axis=0), 'std': table.std(axis=0, ddof=1)})

    def metric_rows(self, method: Optional[str] = None) -> List[Dict]:
        method = method or self.config.method
        return [
            {'method': method, 'k': self.config.k, 'fold': f.fold, 'metric': name, 'value': f.metrics[name]}
            for f in self.folds
            for name in FOLD_METRICS
        ]

    def selection_rows(self, method: Optional[str] = None) -> List[Dict]:
        method = method or self.config.method
        return [
            {'method': method, 'k': self.config.k, 'fold': f.fold, 'selected_bands': f.selection.joined()}
            for f in self.folds
        ]


def run_fold(config: TrainConfig, data: Dataset, test_idx: np.ndarray, fold: int) -> FoldResult:
    """Train on every sample outside ``test_idx`` and score the held-out fold."""
    mask = np.ones(data.n_samples, dtype=bool)
    mask[test_idx] = False
    train_data = data.subset(np.flatnonzero(mask))
    test_data = data.subset(np.sort(test_idx))

    result = train(config, train_data, rng=Rng(config.seed).substream(STREAM_FOLD_RUN, fold))
    metrics = result.pipeline.evaluate(test_data)
    metrics['distinct_bands'] = float(result.selection.k)
    logger.info("fold_complete", method=config.method, k=config.k, fold=fold,
                oa=metrics['oa'], selection=result.selection.as_list())
    return FoldResult(fold, metrics, result.selection, test_data.n_samples)


def kfold_cross_validate(
    config: TrainConfig,
    data: Dataset,
    folds: int,
    max_workers: Optional[int] = None,
) -> CrossValidationReport:
    """
    Run every fold of a seeded k-fold split.

    Args:
        config: Training configuration shared by all folds
        data: Full dataset
        folds: Number of folds (>= 2)
        max_workers: Worker cap; defaults to BANDGATE_THREADS or the physical core count

    Returns:
        CrossValidationReport with folds in index order
    """
    config.validate(data.n_bands, data.n_classes)
    splits = fold_indices(data.n_samples, folds, Rng(config.seed).substream(STREAM_FOLDS))
    workers = max(1, min(max_workers or settings.thread_cap(), folds))

    if workers == 1:
        results = [run_fold(config, data, idx, fold) for fold, idx in enumerate(splits)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(run_fold, config, data, idx, fold) for fold, idx in enumerate(splits)]
            results = [future.result() for future in futures]

    return CrossValidationReport(config, sorted(results, key=lambda r: r.fold))
