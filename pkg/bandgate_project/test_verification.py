"""
Gradient oracles, verification harness and the statistical training experiments.

The experiment tests train dozens of small networks; run them with
``pytest --run-slow``.
"""

import numpy as np
import pytest

from bandgate.core.exceptions import ConfigurationError
from bandgate.verification import (
    CheckOutcome, VerificationHarness, check_classifier_gradient, check_concrete_gradient,
    check_gate_gradient, check_regularizer_gradient, collapse_experiment, finite_diff_check,
    format_tap, recovery_experiment, recovery_score, relative_errors, write_outcomes_csv,
)
from bandgate.verification.experiments import (
    CollapseScenario, mean_distinct, mean_val_oa, planted_auc_experiment,
)


def test_finite_differences_on_a_quadratic():
    point = np.array([1.0, -2.0, 0.5])
    error = finite_diff_check(lambda p: float(np.sum(p ** 3)), point, 3.0 * point ** 2)
    assert error < 1e-8


def test_relative_error_floor():
    errors = relative_errors(np.array([1e-10, 2.0]), np.array([0.0, 2.002]))
    assert errors[0] == pytest.approx(1e-10)
    assert errors[1] == pytest.approx(0.002 / 2.002)


def test_wrong_gradient_is_caught():
    point = np.array([0.3, 0.7])
    assert finite_diff_check(lambda p: float(np.sum(p ** 2)), point, point) > 0.4


@pytest.mark.parametrize("n_bands, k", [(12, 5), (5, 3), (5, 5)])
def test_concrete_selector_gradient(n_bands, k):
    assert check_concrete_gradient(n_bands=n_bands, k=k) <= 1e-5


def test_concrete_selector_gradient_at_low_temperature():
    assert check_concrete_gradient(tau=0.5) <= 1e-5


def test_gate_gradient():
    assert check_gate_gradient() <= 1e-5


def test_classifier_gradient_with_class_weights():
    assert check_classifier_gradient() <= 1e-5
    assert check_classifier_gradient(weights=np.array([1.0, 2.5, 0.5])) <= 1e-5


def test_regularizer_gradient():
    assert check_regularizer_gradient() <= 1e-6


def test_recovery_score():
    assert recovery_score([3, 11, 20, 27], [3, 11, 19, 27]) == 0.75
    with pytest.raises(ConfigurationError):
        recovery_score([1], [])


def test_fast_harness_passes_and_reports(tmp_path):
    outcomes = VerificationHarness(include_experiments=False).run()
    assert outcomes and all(o.passed for o in outcomes), [o for o in outcomes if not o.passed]
    tap = format_tap(outcomes).splitlines()
    assert tap[:2] == ["TAP version 13", f"1..{len(outcomes)}"]
    path = write_outcomes_csv(outcomes, tmp_path / "checks.csv")
    assert path.read_text().splitlines()[0] == "check,quantity,value,threshold,passed"


def test_tap_marks_failures():
    tap = format_tap([CheckOutcome('demo', 'q', 2.0, 1.0, False)])
    assert tap.splitlines()[2] == "not ok 1 - demo # q=2 threshold=1"


def test_collapse_schedule_anneals_to_final_temperature():
    scenario = CollapseScenario()
    assert scenario.batches == 10 * 24
    assert scenario.tau0 * scenario.alpha ** scenario.batches == pytest.approx(scenario.final_tau)
    assert scenario.config(0, 'segmented').validate(30, 3).alpha == scenario.alpha
    assert list(scenario.informative) == list(range(12, 18))


def test_single_row_selector_never_collapses():
    scenario = CollapseScenario(k=1, samples=120, epochs=1)
    for init in ('segmented', 'plain'):
        assert collapse_experiment([0, 1], init, scenario, max_workers=1) == [1, 1]


@pytest.mark.slow
def test_concrete_selector_recovers_planted_bands():
    outcomes = recovery_experiment('chbs', range(10))
    assert sum(o.score >= 0.75 for o in outcomes) >= 8


@pytest.mark.slow
def test_gates_recover_planted_bands():
    outcomes = recovery_experiment('ehbs', range(10))
    assert sum(o.score >= 0.5 for o in outcomes) >= 7


@pytest.mark.slow
def test_segmented_init_avoids_collapse():
    segmented = collapse_experiment(range(10), 'segmented')
    plain = collapse_experiment(range(10), 'plain')
    assert sum(c == 6 for c in segmented) >= 8
    assert mean_distinct(segmented) >= mean_distinct(plain)


@pytest.mark.slow
def test_concrete_selector_beats_random_bands():
    chbs = recovery_experiment('chbs', range(5))
    random_k = recovery_experiment('random-k', range(5))
    assert mean_val_oa(chbs) >= mean_val_oa(random_k) + 0.05


@pytest.mark.slow
def test_concrete_selector_auc_dominates_random_bands():
    aucs = planted_auc_experiment(('chbs', 'random-k'))
    assert aucs['chbs'] >= aucs['random-k']
