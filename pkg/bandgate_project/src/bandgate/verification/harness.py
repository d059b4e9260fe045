"""
Verification harness: runs every oracle check and reports a TAP stream plus a CSV.
"""

from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Callable, List, Optional, Sequence, Union

import numpy as np
import pandas as pd
from scipy import integrate

from ..config.constants import FLOAT_FORMAT, GRADIENT_TOLERANCE
from ..core.base_classes import BaseComponent
from ..core.numerics import sample_gumbel, softmax_row, std_normal_cdf, std_normal_pdf
from ..core.rng import Rng
from ..evaluation.bands_curve import BandsCurve, bands_auc
from ..evaluation.metrics import ConfusionMatrix, kappa, per_class_iou_precision_recall
from ..selection.concrete import ConcreteLayer
from .experiments import (
    collapse_experiment,
    mean_distinct,
    mean_val_oa,
    planted_auc_experiment,
    recovery_experiment,
)
from .gradient_check import (
    check_classifier_gradient,
    check_concrete_gradient,
    check_gate_gradient,
    check_regularizer_gradient,
)

OUTCOME_COLUMNS = ['check', 'quantity', 'value', 'threshold', 'passed']


@dataclass(frozen=True)
class CheckOutcome:
    check: str
    quantity: str
    value: float
    threshold: float
    passed: bool


def _at_most(check: str, quantity: str, value: float, threshold: float) -> CheckOutcome:
    return CheckOutcome(check, quantity, float(value), float(threshold), bool(value <= threshold))


def _at_least(check: str, quantity: str, value: float, threshold: float) -> CheckOutcome:
    return CheckOutcome(check, quantity, float(value), float(threshold), bool(value >= threshold))


def check_cdf_quadrature() -> CheckOutcome:
    points = (-3.0, -1.0, -0.25, 0.0, 0.7, 1.0, 2.5)
    error = max(abs(std_normal_cdf(x) - (0.5 + integrate.quad(std_normal_pdf, 0.0, x)[0])) for x in points)
    return _at_most('normal_cdf_quadrature', 'max_abs_error', error, 1e-7)


def check_simplex_rows(draws: int = 1000, seed: int = 0) -> CheckOutcome:
    rng = Rng(seed)
    logits = np.asarray(rng.substream(0).normal(1.0, (4, 12)))
    noise = rng.substream(1)
    worst = 0.0
    for _ in range(draws):
        m = softmax_row(logits + sample_gumbel(noise, 0.15, logits.shape), 1.5)
        worst = max(worst, float(np.max(np.abs(m.sum(axis=1) - 1.0))))
    return _at_most('concrete_rows_on_simplex', 'max_row_sum_error', worst, 1e-12)


def check_annealing(epochs: int = 3, batches: int = 7) -> CheckOutcome:
    layer = ConcreteLayer(12, 3, tau0=1.5, alpha=0.99998)
    for _ in range(epochs * batches):
        layer.on_batch_end()
    expected = 1.5 * 0.99998 ** (epochs * batches)
    return _at_most('temperature_schedule', 'relative_error', abs(layer.tau - expected) / expected, 1e-9)


def check_metric_oracles() -> List[CheckOutcome]:
    cm = ConfusionMatrix(np.array([[45, 5], [15, 35]]))
    classes = per_class_iou_precision_recall(cm)
    iou_error = max(abs(classes.iou[0] - 45 / 65), abs(classes.iou[1] - 35 / 55))
    return [
        _at_most('kappa_hand_example', 'abs_error', abs(kappa(cm) - 0.6), 0.0),
        _at_most('bands_auc_constant', 'abs_error',
                 abs(bands_auc(BandsCurve((3, 5, 8), (0.9, 0.9, 0.9))) - 0.9), 1e-12),
        _at_most('iou_hand_example', 'max_abs_error', iou_error, 1e-12),
    ]


class VerificationHarness(BaseComponent):
    """
    Ordered collection of verification checks.

    The fast checks (gradients, simplex, annealing, metric oracles) always
    run; the training experiments run when ``include_experiments`` is set.
    """

    def __init__(self, seeds: Sequence[int] = tuple(range(10)), include_experiments: bool = False,
                 max_workers: Optional[int] = None):
        super().__init__("VerificationHarness")
        self.seeds = list(seeds)
        self.include_experiments = include_experiments
        self.max_workers = max_workers

    def _gradient_checks(self) -> List[CheckOutcome]:
        return [
            _at_most('gradient_concrete_selector', 'max_relative_error', check_concrete_gradient(), GRADIENT_TOLERANCE),
            _at_most('gradient_concrete_selector_5_bands', 'max_relative_error',
                     check_concrete_gradient(n_bands=5, k=3), GRADIENT_TOLERANCE),
            _at_most('gradient_stochastic_gates', 'max_relative_error', check_gate_gradient(), GRADIENT_TOLERANCE),
            _at_most('gradient_classifier', 'max_relative_error', check_classifier_gradient(), GRADIENT_TOLERANCE),
            _at_most('gradient_gate_regularizer', 'max_relative_error', check_regularizer_gradient(), 1e-6),
        ]

    def _experiment_checks(self) -> List[CheckOutcome]:
        chbs = recovery_experiment('chbs', self.seeds, max_workers=self.max_workers)
        ehbs = recovery_experiment('ehbs', self.seeds, max_workers=self.max_workers)
        # accuracy dominance over random-k uses the first five seeds
        random_k = recovery_experiment('random-k', self.seeds[:5], max_workers=self.max_workers)
        aucs = planted_auc_experiment(('chbs', 'random-k'), max_workers=self.max_workers)
        segmented = collapse_experiment(self.seeds, 'segmented', max_workers=self.max_workers)
        plain = collapse_experiment(self.seeds, 'plain', max_workers=self.max_workers)
        n = len(self.seeds)
        return [
            _at_least('planted_recovery_chbs', 'seed_fraction_score_ge_0.75',
                      sum(o.score >= 0.75 for o in chbs) / n, 0.8),
            _at_least('planted_recovery_ehbs', 'seed_fraction_score_ge_0.5',
                      sum(o.score >= 0.5 for o in ehbs) / n, 0.7),
            _at_least('collapse_segmented_distinct', 'seed_fraction_all_distinct',
                      sum(c == 6 for c in segmented) / n, 0.8),
            _at_least('collapse_segmented_vs_plain', 'mean_distinct_difference',
                      mean_distinct(segmented) - mean_distinct(plain), 0.0),
            _at_least('planted_chbs_vs_random_k', 'mean_val_oa_difference',
                      mean_val_oa(chbs[:5]) - mean_val_oa(random_k), 0.05),
            _at_least('planted_auc_chbs_vs_random_k', 'bands_auc_difference',
                      aucs['chbs'] - aucs['random-k'], 0.0),
        ]

    def checks(self) -> List[Callable[[], List[CheckOutcome]]]:
        steps = [
            self._gradient_checks,
            lambda: [check_cdf_quadrature()],
            lambda: [check_simplex_rows()],
            lambda: [check_annealing()],
            check_metric_oracles,
        ]
        if self.include_experiments:
            steps.append(self._experiment_checks)
        return steps

    def run(self) -> List[CheckOutcome]:
        outcomes = []
        for step in self.checks():
            for outcome in step():
                self.logger.info("verification_check", check=outcome.check, value=outcome.value,
                                 threshold=outcome.threshold, passed=outcome.passed)
                outcomes.append(outcome)
        return outcomes


def format_tap(outcomes: Sequence[CheckOutcome]) -> str:
    lines = ["TAP version 13", f"1..{len(outcomes)}"]
    for number, outcome in enumerate(outcomes, start=1):
        status = "ok" if outcome.passed else "not ok"
        lines.append(f"{status} {number} - {outcome.check} # {outcome.quantity}={outcome.value:.6g} "
                     f"threshold={outcome.threshold:.6g}")
    return "\n".join(lines) + "\n"


def write_outcomes_csv(outcomes: Sequence[CheckOutcome], path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame([asdict(o) for o in outcomes], columns=OUTCOME_COLUMNS)
    with path.open('w', newline='', encoding='utf-8') as handle:
        frame.to_csv(handle, index=False, float_format=FLOAT_FORMAT, lineterminator='\n')
    return path
