"""
Scalar and row-wise numerics shared by the selectors and the classifier.

All functions accept scalars or numpy arrays and are pure given their
arguments (and the state of the ``Rng`` they are handed).
"""

import math
from typing import Optional, Tuple, Union

import numpy as np
from scipy import special

from ..config.constants import GUMBEL_U_FLOOR
from .exceptions import ConfigurationError
from .rng import Rng

ArrayLike = Union[float, np.ndarray]
Size = Optional[Union[int, Tuple[int, ...]]]

_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


def _as_output(value: np.ndarray) -> ArrayLike:
    return float(value) if np.ndim(value) == 0 else value


def std_normal_cdf(x: ArrayLike) -> ArrayLike:
    """Standard normal CDF Φ, erf-based (scipy ``ndtr``)."""
    return _as_output(special.ndtr(np.asarray(x, dtype=np.float64)))


def std_normal_pdf(x: ArrayLike) -> ArrayLike:
    """Standard normal density φ(x) = exp(-x²/2)/√(2π)."""
    x = np.asarray(x, dtype=np.float64)
    return _as_output(np.exp(-0.5 * x * x) * _INV_SQRT_2PI)


def sample_gaussian(rng: Rng, sigma: float, size: Size = None) -> ArrayLike:
    """
    Draw zero-mean Gaussian noise with standard deviation ``sigma``.

    Raises:
        ConfigurationError: if sigma is not strictly positive
    """
    if not sigma > 0:
        raise ConfigurationError(f"sigma must be > 0, got {sigma}")
    return _as_output(np.asarray(rng.normal(sigma, size)))


def gumbel_transform(u: ArrayLike) -> ArrayLike:
    """Map uniform draws to Gumbel noise, -log(-log(u)), with u floored away from 0."""
    u = np.maximum(np.asarray(u, dtype=np.float64), GUMBEL_U_FLOOR)
    return _as_output(-np.log(-np.log(u)))


def sample_gumbel(rng: Rng, beta: float, size: Size = None) -> ArrayLike:
    """
    Draw Gumbel noise from u ~ Uniform(0, beta).

    The scale enters through the support of u, so every sample is bounded
    above by -log(-log(beta)).

    Raises:
        ConfigurationError: if beta lies outside (0, 1)
    """
    if not 0.0 < beta < 1.0:
        raise ConfigurationError(f"beta must lie in (0, 1), got {beta}")
    return gumbel_transform(rng.uniform(0.0, beta, size))


def clamp01(x: ArrayLike) -> ArrayLike:
    """max(0, min(x, 1)) elementwise."""
    return _as_output(np.clip(np.asarray(x, dtype=np.float64), 0.0, 1.0))


def softmax_row(logits: np.ndarray, tau: float) -> np.ndarray:
    """
    Temperature softmax over the last axis.

    The row maximum is subtracted before scaling, so adding a constant to a
    row leaves the result unchanged.

    Args:
        logits: array of shape (..., n)
        tau: temperature, strictly positive

    Returns:
        Array of the same shape whose rows are probability vectors
    """
    if not tau > 0:
        raise ConfigurationError(f"tau must be > 0, got {tau}")
    logits = np.asarray(logits, dtype=np.float64)
    shifted = (logits - logits.max(axis=-1, keepdims=True)) / tau
    weights = np.exp(shifted)
    return weights / weights.sum(axis=-1, keepdims=True)
