"""
Stochastic-gate band selection layer.

Each band j owns a gate z_j = clamp01(mu_j + eps_j), eps_j ~ N(0, sigma²),
that multiplies the band during training. The penalty
lambda * sum_j Phi(mu_j / sigma) is a smooth surrogate for the number of
open gates. After training the k bands with the largest mu are kept, in
spectral order.
"""

from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np

from ..config.constants import EHBS_LAMBDA0, EHBS_MU0, EHBS_SIGMA
from ..core.base_classes import BaseSelector
from ..core.exceptions import ConfigurationError, ShapeMismatchError
from ..core.numerics import clamp01, sample_gaussian, std_normal_cdf, std_normal_pdf
from ..core.rng import Rng
from .band_selection import BandSelection


@dataclass(frozen=True)
class GateForwardRecord:
    """Realized gates of one training forward pass."""

    z: np.ndarray
    epsilon: np.ndarray
    active: np.ndarray


def lambda_for_k(lambda0: float, n: int, k: int) -> float:
    """
    Regularization weight for a target of k bands out of n.

    Returns lambda0 * n / k, so smaller targets get stronger sparsity.
    """
    if not lambda0 > 0:
        raise ConfigurationError(f"lambda0 must be > 0, got {lambda0}")
    if not 1 <= k <= n:
        raise ConfigurationError(f"k must lie in [1, {n}], got {k}")
    return float(lambda0) * n / k


def top_k_indices(scores: np.ndarray, k: int) -> BandSelection:
    """The k largest scores (ties to the lower index), returned in ascending index order."""
    scores = np.asarray(scores, dtype=np.float64)
    n = scores.shape[0]
    if not 1 <= k <= n:
        raise ConfigurationError(f"k must lie in [1, {n}], got {k}")
    order = np.lexsort((np.arange(n), -scores))
    return BandSelection(tuple(sorted(int(i) for i in order[:k])))


class GateLayer(BaseSelector):
    """Learnable per-band stochastic gates."""

    def __init__(
        self,
        n_bands: int,
        sigma: float = EHBS_SIGMA,
        reg_lambda: float = EHBS_LAMBDA0,
        mu0: float = EHBS_MU0,
        k: Optional[int] = None,
    ):
        super().__init__("GateLayer", n_bands)
        if not sigma > 0:
            raise ConfigurationError(f"sigma must be > 0, got {sigma}")
        if reg_lambda < 0:
            raise ConfigurationError(f"lambda must be >= 0, got {reg_lambda}")
        if k is not None and not 1 <= k <= n_bands:
            raise ConfigurationError(f"k must lie in [1, {n_bands}], got {k}")
        self._sigma = float(sigma)
        self.reg_lambda = float(reg_lambda)
        self.k = k
        self.mu = np.full(self.n_bands, float(mu0), dtype=np.float64)

    @property
    def sigma(self) -> float:
        return self._sigma

    @property
    def output_width(self) -> int:
        return self.n_bands

    def parameters(self) -> Dict[str, np.ndarray]:
        return {'mu': self.mu}

    def forward_with_noise(self, x: np.ndarray, epsilon: np.ndarray) -> Tuple[np.ndarray, GateForwardRecord]:
        """Gate ``x`` with a given noise vector (one realization shared across a batch)."""
        x = self._check_width(x)
        epsilon = np.asarray(epsilon, dtype=np.float64)
        if epsilon.shape != self.mu.shape:
            raise ShapeMismatchError(f"noise must have shape {self.mu.shape}, got {epsilon.shape}")
        pre = self.mu + epsilon
        z = clamp01(pre)
        active = (pre > 0.0) & (pre < 1.0)
        return x * z, GateForwardRecord(z=z, epsilon=epsilon.copy(), active=active)

    def forward_train(self, x: np.ndarray, rng: Rng) -> Tuple[np.ndarray, GateForwardRecord]:
        epsilon = np.asarray(sample_gaussian(rng, self._sigma, self.n_bands))
        return self.forward_with_noise(x, epsilon)

    def forward_infer(self, x: np.ndarray) -> np.ndarray:
        """Noise-free gating, z = clamp01(mu)."""
        x = self._check_width(x)
        return x * clamp01(self.mu)

    def regularizer(self) -> float:
        """lambda * sum_j Phi(mu_j / sigma)."""
        return float(self.reg_lambda * np.sum(std_normal_cdf(self.mu / self._sigma)))

    def regularizer_gradient(self) -> np.ndarray:
        return self.reg_lambda * std_normal_pdf(self.mu / self._sigma) / self._sigma

    def backward(self, record: GateForwardRecord, x: np.ndarray, grad_out: np.ndarray) -> Dict[str, np.ndarray]:
        """
        Gradient over mu of (data loss + regularizer).

        The clamp passes gradient only where 0 < mu + eps < 1.
        """
        x = self._check_width(x)
        grad_out = np.asarray(grad_out, dtype=np.float64)
        if record.z.shape != self.mu.shape:
            raise ShapeMismatchError("stale gate record: band count changed since forward pass")
        if grad_out.shape != x.shape:
            raise ShapeMismatchError(f"grad_out shape {grad_out.shape} does not match input {x.shape}")
        data_term = grad_out * x
        if data_term.ndim == 2:
            data_term = data_term.sum(axis=0)
        grad_mu = np.where(record.active, data_term, 0.0) + self.regularizer_gradient()
        return {'mu': grad_mu}

    def select_top_k(self, k: int) -> BandSelection:
        """The k bands with the largest mu, in ascending band order."""
        return top_k_indices(self.mu, k)

    def current_selection(self) -> BandSelection:
        return self.select_top_k(self.k or self.n_bands)

    def open_gate_count(self) -> float:
        """Expected number of open gates, sum_j Phi(mu_j / sigma)."""
        return float(np.sum(std_normal_cdf(self.mu / self._sigma)))
