"""
Weighted softmax cross-entropy.
"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy import special

from ..core.exceptions import ConfigurationError, ShapeMismatchError


@dataclass(frozen=True)
class LossSpec:
    """Per-class weights of the cross-entropy loss."""

    class_weights: np.ndarray

    def __post_init__(self):
        weights = np.asarray(self.class_weights, dtype=np.float64)
        if weights.ndim != 1 or weights.size == 0:
            raise ConfigurationError("class weights must be a non-empty vector")
        if not np.all(np.isfinite(weights)) or np.any(weights <= 0):
            raise ConfigurationError(f"class weights must be finite and > 0, got {weights}")
        object.__setattr__(self, 'class_weights', weights)

    @property
    def n_classes(self) -> int:
        return int(self.class_weights.size)

    @classmethod
    def uniform(cls, n_classes: int) -> "LossSpec":
        return cls(np.ones(n_classes))

    @classmethod
    def inverse_frequency(cls, labels: np.ndarray, n_classes: int) -> "LossSpec":
        """w_c = m / (n_classes * count_c); classes absent from ``labels`` get weight 1."""
        counts = np.bincount(np.asarray(labels, dtype=np.int64), minlength=n_classes).astype(np.float64)
        weights = np.ones(n_classes)
        present = counts > 0
        weights[present] = counts.sum() / (n_classes * counts[present])
        return cls(weights)


def _check_labels(labels: np.ndarray, n_classes: int) -> None:
    if np.any(labels < 0) or np.any(labels >= n_classes):
        raise ConfigurationError(f"labels must lie in [0, {n_classes})")


def weighted_cross_entropy(logits: np.ndarray, label: int, spec: LossSpec) -> Tuple[float, np.ndarray]:
    """
    Loss and logit gradient for one sample.

    loss = -w_label * log softmax(logits)_label,
    grad = w_label * (softmax(logits) - onehot(label)).
    """
    logits = np.asarray(logits, dtype=np.float64)
    if logits.shape != (spec.n_classes,):
        raise ShapeMismatchError(f"expected {spec.n_classes} logits, got shape {logits.shape}")
    _check_labels(np.asarray([label]), spec.n_classes)
    log_probs = special.log_softmax(logits)
    weight = spec.class_weights[label]
    grad = np.exp(log_probs)
    grad[label] -= 1.0
    return float(-weight * log_probs[label]), weight * grad


def batch_weighted_cross_entropy(logits: np.ndarray, labels: np.ndarray,
                                 spec: LossSpec) -> Tuple[float, np.ndarray]:
    """Mean weighted cross-entropy over a batch and its gradient w.r.t. the logits."""
    logits = np.asarray(logits, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    if logits.ndim != 2 or logits.shape[1] != spec.n_classes or logits.shape[0] != labels.shape[0]:
        raise ShapeMismatchError(
            f"logits shape {logits.shape} incompatible with {labels.shape[0]} labels "
            f"and {spec.n_classes} classes"
        )
    _check_labels(labels, spec.n_classes)
    batch = labels.shape[0]
    rows = np.arange(batch)
    log_probs = special.log_softmax(logits, axis=1)
    weights = spec.class_weights[labels]
    loss = float(-np.sum(weights * log_probs[rows, labels]) / batch)
    grad = np.exp(log_probs)
    grad[rows, labels] -= 1.0
    grad *= (weights / batch)[:, None]
    return loss, grad
