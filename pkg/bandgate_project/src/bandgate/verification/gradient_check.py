"""
Central finite-difference oracle and the selector/classifier objectives it checks.

Every objective here freezes its noise (gate epsilon, Gumbel matrix) so it is
a deterministic function of the parameter vector under test.
"""

from typing import Callable, Optional, Tuple, Union

import numpy as np

from ..config.constants import FD_ABSOLUTE_FLOOR, FD_STEP
from ..core.exceptions import GradientCheckError, ShapeMismatchError
from ..core.numerics import sample_gaussian, sample_gumbel
from ..core.rng import Rng
from ..network.classifier import Classifier
from ..network.loss import LossSpec, batch_weighted_cross_entropy
from ..selection.concrete import ConcreteLayer
from ..selection.gates import GateLayer

Objective = Callable[[np.ndarray], float]
Analytic = Union[np.ndarray, Callable[[np.ndarray], np.ndarray]]

# kink margin for clamp and rectifier boundaries
_KINK_MARGIN = 1e-3


def numerical_gradient(objective: Objective, point: np.ndarray, step: float = FD_STEP) -> np.ndarray:
    point = np.asarray(point, dtype=np.float64)
    grad = np.zeros_like(point)
    flat = grad.reshape(-1)
    for i in range(point.size):
        plus = point.copy().reshape(-1)
        minus = point.copy().reshape(-1)
        plus[i] += step
        minus[i] -= step
        f_plus = objective(plus.reshape(point.shape))
        f_minus = objective(minus.reshape(point.shape))
        if not (np.isfinite(f_plus) and np.isfinite(f_minus)):
            raise GradientCheckError(f"objective is not finite around coordinate {i}")
        flat[i] = (f_plus - f_minus) / (2.0 * step)
    return grad


def relative_errors(analytic: np.ndarray, numeric: np.ndarray) -> np.ndarray:
    """|a - n| / max(|a|, |n|), falling back to |a - n| where both are below the floor."""
    analytic = np.asarray(analytic, dtype=np.float64)
    numeric = np.asarray(numeric, dtype=np.float64)
    if analytic.shape != numeric.shape:
        raise ShapeMismatchError(f"analytic gradient {analytic.shape} vs numeric {numeric.shape}")
    diff = np.abs(analytic - numeric)
    scale = np.maximum(np.abs(analytic), np.abs(numeric))
    return np.where(scale < FD_ABSOLUTE_FLOOR, diff, diff / np.maximum(scale, FD_ABSOLUTE_FLOOR))


def finite_diff_check(objective: Objective, point: np.ndarray, analytic: Analytic, step: float = FD_STEP) -> float:
    """
    Max relative error between an analytic gradient and central differences.

    Args:
        objective: Deterministic scalar function of the parameter array
        point: Where to check
        analytic: Gradient at ``point``, or a callable producing it
        step: Central-difference step

    Returns:
        Largest per-coordinate relative error
    """
    point = np.asarray(point, dtype=np.float64)
    if not np.isfinite(objective(point)):
        raise GradientCheckError("objective is not finite at the check point")
    expected = analytic(point) if callable(analytic) else analytic
    numeric = numerical_gradient(objective, point, step)
    return float(np.max(relative_errors(expected, numeric)))


def _toy_batch(rng: Rng, batch: int, n_bands: int, n_classes: int) -> Tuple[np.ndarray, np.ndarray]:
    x = np.asarray(rng.normal(1.0, (batch, n_bands)))
    y = np.arange(batch) % n_classes
    return x, y


def _data_loss(classifier: Classifier, selected: np.ndarray, y: np.ndarray, loss_spec: LossSpec):
    logits, cache = classifier.forward(selected)
    loss, grad_logits = batch_weighted_cross_entropy(logits, y, loss_spec)
    return loss, cache, grad_logits


def concrete_objective(layer: ConcreteLayer, classifier: Classifier, x: np.ndarray, y: np.ndarray,
                       loss_spec: LossSpec, g: np.ndarray) -> Tuple[Objective, Callable[[np.ndarray], np.ndarray]]:
    """Total loss as a function of the logits matrix, and its analytic gradient."""

    def objective(logits: np.ndarray) -> float:
        saved = layer.logits.copy()
        layer.logits[...] = logits
        try:
            selected, _ = layer.forward_with_noise(x, g)
            return _data_loss(classifier, selected, y, loss_spec)[0]
        finally:
            layer.logits[...] = saved

    def gradient(logits: np.ndarray) -> np.ndarray:
        saved = layer.logits.copy()
        layer.logits[...] = logits
        try:
            selected, record = layer.forward_with_noise(x, g)
            _, cache, grad_logits = _data_loss(classifier, selected, y, loss_spec)
            _, grad_selected = classifier.backward(cache, grad_logits)
            return layer.backward(record, x, grad_selected)['logits']
        finally:
            layer.logits[...] = saved

    return objective, gradient


def gate_objective(layer: GateLayer, classifier: Classifier, x: np.ndarray, y: np.ndarray,
                   loss_spec: LossSpec, epsilon: np.ndarray) -> Tuple[Objective, Callable[[np.ndarray], np.ndarray]]:
    """Data loss plus regularizer as a function of the gate means, and its analytic gradient."""

    def objective(mu: np.ndarray) -> float:
        saved = layer.mu.copy()
        layer.mu[...] = mu
        try:
            selected, _ = layer.forward_with_noise(x, epsilon)
            return _data_loss(classifier, selected, y, loss_spec)[0] + layer.regularizer()
        finally:
            layer.mu[...] = saved

    def gradient(mu: np.ndarray) -> np.ndarray:
        saved = layer.mu.copy()
        layer.mu[...] = mu
        try:
            selected, record = layer.forward_with_noise(x, epsilon)
            _, cache, grad_logits = _data_loss(classifier, selected, y, loss_spec)
            _, grad_selected = classifier.backward(cache, grad_logits)
            return layer.backward(record, x, grad_selected)['mu']
        finally:
            layer.mu[...] = saved

    return objective, gradient


def check_concrete_gradient(n_bands: int = 12, k: int = 5, n_classes: int = 3, batch: int = 4,
                            seed: int = 0, tau: float = 1.5, beta: float = 0.15) -> float:
    """CHBS selector composed with a small classifier: max relative error over L."""
    rng = Rng(seed)
    layer = ConcreteLayer(n_bands, k, tau0=tau, beta=beta, init='plain', rng=rng.substream(0))
    classifier = Classifier(k, n_classes, hidden=(6,), rng=rng.substream(1))
    x, y = _toy_batch(rng.substream(2), batch, n_bands, n_classes)
    g = np.asarray(sample_gumbel(rng.substream(3), beta, layer.logits.shape))
    objective, gradient = concrete_objective(layer, classifier, x, y, LossSpec.uniform(n_classes), g)
    return finite_diff_check(objective, layer.logits.copy(), gradient)


def _away_from_kinks(mu: np.ndarray, epsilon: np.ndarray) -> np.ndarray:
    """Shift means whose mu + eps sits within the margin of a clamp edge."""
    mu = mu.copy()
    for edge in (0.0, 1.0):
        near = np.abs(mu + epsilon - edge) < _KINK_MARGIN
        mu[near] += 10.0 * _KINK_MARGIN
    return mu


def check_gate_gradient(n_bands: int = 5, n_classes: int = 3, batch: int = 4, seed: int = 0,
                        sigma: float = 0.5, reg_lambda: float = 1.0) -> float:
    """EHBS gates (regularizer included) composed with a small classifier: max relative error over mu."""
    rng = Rng(seed)
    layer = GateLayer(n_bands, sigma=sigma, reg_lambda=reg_lambda)
    epsilon = np.asarray(sample_gaussian(rng.substream(0), sigma, n_bands))
    mu = np.asarray(rng.substream(1).uniform(-0.5, 1.5, n_bands))
    layer.mu[...] = _away_from_kinks(mu, epsilon)
    classifier = Classifier(n_bands, n_classes, hidden=(6,), rng=rng.substream(2))
    x, y = _toy_batch(rng.substream(3), batch, n_bands, n_classes)
    objective, gradient = gate_objective(layer, classifier, x, y, LossSpec.uniform(n_classes), epsilon)
    return finite_diff_check(objective, layer.mu.copy(), gradient)


def check_classifier_gradient(input_width: int = 5, n_classes: int = 3, batch: int = 4, seed: int = 0,
                              weights: Optional[np.ndarray] = None) -> float:
    """Weighted cross-entropy through the classifier: max relative error over all parameters."""
    rng = Rng(seed)
    classifier = Classifier(input_width, n_classes, hidden=(7, 4), rng=rng.substream(0))
    x, y = _toy_batch(rng.substream(1), batch, input_width, n_classes)
    loss_spec = LossSpec(weights) if weights is not None else LossSpec.inverse_frequency(y, n_classes)
    params = classifier.parameters()
    keys = list(params)
    shapes = [params[key].shape for key in keys]
    sizes = [params[key].size for key in keys]
    point = np.concatenate([params[key].ravel() for key in keys])

    def load(vector: np.ndarray) -> None:
        offset = 0
        for key, shape, size in zip(keys, shapes, sizes):
            params[key][...] = vector[offset:offset + size].reshape(shape)
            offset += size

    def objective(vector: np.ndarray) -> float:
        load(vector)
        try:
            return _data_loss(classifier, x, y, loss_spec)[0]
        finally:
            load(point)

    def gradient(vector: np.ndarray) -> np.ndarray:
        load(vector)
        try:
            _, cache, grad_logits = _data_loss(classifier, x, y, loss_spec)
            grads, _ = classifier.backward(cache, grad_logits)
            return np.concatenate([grads[key].ravel() for key in keys])
        finally:
            load(point)

    return finite_diff_check(objective, point, gradient)


def check_regularizer_gradient(n_bands: int = 6, seed: int = 0, sigma: float = 0.5, reg_lambda: float = 1.5) -> float:
    """Regularizer alone against its closed-form gradient."""
    layer = GateLayer(n_bands, sigma=sigma, reg_lambda=reg_lambda)
    layer.mu[...] = np.asarray(Rng(seed).uniform(-1.0, 1.0, n_bands))

    def objective(mu: np.ndarray) -> float:
        saved = layer.mu.copy()
        layer.mu[...] = mu
        try:
            return layer.regularizer()
        finally:
            layer.mu[...] = saved

    return finite_diff_check(objective, layer.mu.copy(), layer.regularizer_gradient())
