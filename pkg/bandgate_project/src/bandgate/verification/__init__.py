"""
Gradient oracles, recovery and collapse experiments, and the verification harness.
"""
from .experiments import (
    COLLAPSE_BANDS,
    PLANTED_BANDS,
    CollapseScenario,
    RecoveryOutcome,
    collapse_experiment,
    mean_distinct,
    mean_val_oa,
    planted_auc_experiment,
    recovery_experiment,
    recovery_score,
)
from .gradient_check import (
    check_classifier_gradient,
    check_concrete_gradient,
    check_gate_gradient,
    check_regularizer_gradient,
    finite_diff_check,
    numerical_gradient,
    relative_errors,
)
from .harness import CheckOutcome, VerificationHarness, format_tap, write_outcomes_csv
