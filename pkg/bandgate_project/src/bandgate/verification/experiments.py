"""
Planted-band recovery and selector-collapse experiments.

Both run one training job per seed on synthetic data whose informative bands
are known, and fan seeds out over a bounded thread pool.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple, TypeVar

import numpy as np

from ..config.settings import settings
from ..core.exceptions import ConfigurationError
from ..core.logging_config import get_logger
from ..data.synthetic import SyntheticSpec, generate
from ..evaluation.bands_curve import BandsCurve, bands_auc
from ..selection.band_selection import BandSelection
from ..training.config import TrainConfig
from ..training.cross_validation import kfold_cross_validate
from ..training.trainer import train

logger = get_logger(__name__)

T = TypeVar('T')

PLANTED_BANDS = (3, 11, 19, 27)
COLLAPSE_BANDS = (12, 13, 14, 15, 16, 17)
AUC_KS = (2, 3, 4, 5, 6)


def recovery_score(selected: Iterable[int], planted: Iterable[int]) -> float:
    """Fraction of the planted bands present in the selection."""
    planted = set(int(b) for b in planted)
    if not planted:
        raise ConfigurationError("planted band set must be non-empty")
    return len(planted & set(int(b) for b in selected)) / len(planted)


def _map_seeds(job: Callable[[int], T], seeds: Sequence[int], max_workers: Optional[int]) -> List[T]:
    workers = max(1, min(max_workers or settings.thread_cap(), len(seeds)))
    if workers == 1:
        return [job(seed) for seed in seeds]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(job, seeds))


def planted_spec(seed: int, samples: int = 2000) -> SyntheticSpec:
    return SyntheticSpec(
        n_bands=30,
        n_classes=4,
        samples=samples,
        informative=PLANTED_BANDS,
        class_signature_gap=1.0,
        noise_std=0.3,
        correlation_width=2,
        seed=seed,
    )


def planted_config(method: str, seed: int) -> TrainConfig:
    """Short, high learning-rate run sized for the 30-band planted scenario."""
    return TrainConfig(
        method=method,
        k=len(PLANTED_BANDS),
        epochs=10,
        batch_size=64,
        learning_rate=1e-2,
        hidden=(32,),
        lambda0=0.02,
        validation_fraction=0.2,
        seed=seed,
    )


@dataclass(frozen=True)
class RecoveryOutcome:
    seed: int
    method: str
    selection: BandSelection
    score: float
    val_oa: float


def recovery_experiment(
    method: str,
    seeds: Sequence[int],
    base_config: Optional[TrainConfig] = None,
    samples: int = 2000,
    max_workers: Optional[int] = None,
) -> List[RecoveryOutcome]:
    """
    Train ``method`` once per seed on the planted scenario and score the selection.

    Args:
        method: Selection method name
        seeds: Seeds; each drives both the dataset and the training run
        base_config: Overrides the scenario's training config (method and seed are still set per run)
        samples: Dataset size
        max_workers: Worker cap

    Returns:
        One RecoveryOutcome per seed, in seed order
    """

    def job(seed: int) -> RecoveryOutcome:
        data = generate(planted_spec(seed, samples))
        config = (replace(base_config, method=method, seed=seed) if base_config
                  else planted_config(method, seed))
        result = train(config, data)
        score = recovery_score(result.selection, PLANTED_BANDS)
        logger.info("recovery_run", method=method, seed=seed, score=score, selection=result.selection.as_list())
        return RecoveryOutcome(seed, method, result.selection, score, result.report.epochs[-1].val_oa)

    return _map_seeds(job, list(seeds), max_workers)


def mean_val_oa(outcomes: Sequence[RecoveryOutcome]) -> float:
    return float(np.mean([o.val_oa for o in outcomes]))


def planted_auc_experiment(
    methods: Sequence[str],
    seed: int = 0,
    ks: Sequence[int] = AUC_KS,
    folds: int = 3,
    max_workers: Optional[int] = None,
) -> Dict[str, float]:
    """
    Bands-AUC of mean fold OA per method on one planted dataset.

    Every method sees the same dataset and the same fold split.
    """
    data = generate(planted_spec(seed))
    aucs = {}
    for method in methods:
        points = []
        for k in sorted(set(ks)):
            config = replace(planted_config(method, seed), k=k)
            report = kfold_cross_validate(config, data, folds, max_workers=max_workers)
            points.append((k, float(report.table()['oa'].mean())))
        aucs[method] = bands_auc(BandsCurve.from_points(points))
        logger.info("planted_auc", method=method, seed=seed, auc=aucs[method])
    return aucs


@dataclass(frozen=True)
class CollapseScenario:
    """
    n=30 bands, k=6, with all informative bands packed into one contiguous run.

    The run 12..17 spans only the third and fourth segments of a segmented
    init, so rows of a plain init are all pulled toward the same few bands.
    The temperature decays from ``tau0`` to ``final_tau`` over the whole run
    and the learning rate is small enough that segmented rows stay near the
    segment they start in.
    """

    n_bands: int = 30
    k: int = 6
    informative: Tuple[int, ...] = COLLAPSE_BANDS
    samples: int = 1500
    n_classes: int = 3
    correlation_width: int = 2
    epochs: int = 10
    learning_rate: float = 5e-4
    batch_size: int = 64
    tau0: float = 1.5
    final_tau: float = 0.05

    @property
    def batches(self) -> int:
        """Total training batches; the scenario trains without a validation split."""
        return self.epochs * math.ceil(self.samples / self.batch_size)

    @property
    def alpha(self) -> float:
        """Per-batch decay that takes tau0 to final_tau on the last batch."""
        return (self.final_tau / self.tau0) ** (1.0 / self.batches)

    def dataset_spec(self, seed: int) -> SyntheticSpec:
        return SyntheticSpec(
            n_bands=self.n_bands,
            n_classes=self.n_classes,
            samples=self.samples,
            informative=self.informative,
            class_signature_gap=1.0,
            noise_std=0.3,
            correlation_width=self.correlation_width,
            seed=seed,
        )

    def config(self, seed: int, init: str) -> TrainConfig:
        return TrainConfig(
            method='chbs',
            k=self.k,
            epochs=self.epochs,
            batch_size=self.batch_size,
            learning_rate=self.learning_rate,
            tau0=self.tau0,
            alpha=self.alpha,
            init=init,
            hidden=(32,),
            validation_fraction=0.0,
            seed=seed,
        )


def collapse_experiment(
    seeds: Sequence[int],
    init: str,
    scenario: Optional[CollapseScenario] = None,
    max_workers: Optional[int] = None,
) -> List[int]:
    """Distinct selected-band count per seed for CHBS with the given logits init."""
    if init not in ('segmented', 'plain'):
        raise ConfigurationError(f"collapse experiment compares segmented and plain init, got '{init}'")
    scenario = scenario or CollapseScenario()

    def job(seed: int) -> int:
        data = generate(scenario.dataset_spec(seed))
        result = train(scenario.config(seed, init), data)
        distinct = result.selection.k
        logger.info("collapse_run", init=init, seed=seed, distinct=distinct, k=scenario.k,
                    final_tau=result.report.final_tau)
        return distinct

    return _map_seeds(job, list(seeds), max_workers)


def mean_distinct(counts: Sequence[int]) -> float:
    return float(np.mean(counts))
