"""
Concrete selector layer: differentiable k-of-n band selection.

Row i of the logits matrix L (k x n) is a relaxed categorical choice of one
band. Training passes sample M = softmax_row((L + G) / tau) with Gumbel noise
G and emit M @ x; the temperature decays by alpha after every batch.
Inference replaces each row by the one-hot vector at its argmax.
"""

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..config.constants import (
    CONCRETE_INITS,
    REMOTE_SENSING_CONCRETE,
    SEEDED_BOOST_FRACTION,
    SEGMENT_OFFSET_FRACTION,
)
from ..core.base_classes import BaseSelector
from ..core.exceptions import ConfigurationError, ShapeMismatchError
from ..core.numerics import sample_gumbel, softmax_row
from ..core.rng import Rng
from .band_selection import BandSelection


def _check_kn(k: int, n: int) -> None:
    if not 1 <= k <= n:
        raise ConfigurationError(f"k must lie in [1, {n}], got {k}")


def xavier_bound(k: int, n: int) -> float:
    return float(np.sqrt(6.0 / (n + k)))


def segment_bounds(k: int, n: int) -> List[Tuple[int, int]]:
    """
    Contiguous segments [start, end) of size floor(n / k); the last one
    absorbs the remaining n - k * floor(n / k) bands.
    """
    _check_kn(k, n)
    size = n // k
    bounds = [(i * size, (i + 1) * size) for i in range(k)]
    bounds[-1] = (bounds[-1][0], n)
    return bounds


def init_plain_xavier(k: int, n: int, rng: Rng) -> np.ndarray:
    """Xavier-uniform logits on [-sqrt(6/(n+k)), +sqrt(6/(n+k))]."""
    _check_kn(k, n)
    bound = xavier_bound(k, n)
    return np.asarray(rng.uniform(-bound, bound, (k, n)), dtype=np.float64)


def init_segmented_xavier(k: int, n: int, rng: Rng) -> np.ndarray:
    """
    Xavier-uniform logits with row i biased toward spectral segment i.

    Entries inside the segment are shifted by +delta (half the Xavier bound),
    entries outside by -delta * s / (n - s) with s the segment length, so the
    offsets of every row average to exactly zero.
    """
    logits = init_plain_xavier(k, n, rng)
    delta = SEGMENT_OFFSET_FRACTION * xavier_bound(k, n)
    for row, (start, end) in enumerate(segment_bounds(k, n)):
        size = end - start
        outside = delta * size / (n - size) if size < n else 0.0
        offsets = np.full(n, -outside)
        offsets[start:end] = delta
        logits[row] += offsets
    return logits


def init_seeded_logits(k: int, n: int, prior_bands: Sequence[int], rng: Rng) -> np.ndarray:
    """
    Xavier-uniform logits with row i boosted at ``prior_bands[i]``.

    Used to start the selector from bands picked by another method.
    """
    _check_kn(k, n)
    priors = [int(b) for b in prior_bands]
    if len(priors) > k:
        raise ConfigurationError(f"at most {k} prior bands allowed, got {len(priors)}")
    for band in priors:
        if not 0 <= band < n:
            raise ConfigurationError(f"prior band {band} outside [0, {n})")
    logits = init_plain_xavier(k, n, rng)
    boost = SEEDED_BOOST_FRACTION * xavier_bound(k, n)
    for row, band in enumerate(priors):
        logits[row, band] += boost
    return logits


@dataclass(frozen=True)
class ConcreteForwardRecord:
    """Sampled selection matrix and the Gumbel noise behind it."""

    m: np.ndarray
    g: np.ndarray
    tau: float


@dataclass(frozen=True)
class SelectionReport:
    """Row-wise argmax picks of a concrete layer, deduplicated."""

    selection: BandSelection
    picks: Tuple[int, ...]

    @property
    def distinct_count(self) -> int:
        return self.selection.k

    @property
    def has_duplicates(self) -> bool:
        return self.distinct_count < len(self.picks)


class ConcreteLayer(BaseSelector):
    """Gumbel-softmax selector with per-batch temperature annealing."""

    def __init__(
        self,
        n_bands: int,
        k: int,
        tau0: float = REMOTE_SENSING_CONCRETE['tau0'],
        alpha: float = REMOTE_SENSING_CONCRETE['alpha'],
        beta: float = REMOTE_SENSING_CONCRETE['beta'],
        init: str = 'segmented',
        rng: Optional[Rng] = None,
        prior_bands: Optional[Sequence[int]] = None,
    ):
        super().__init__("ConcreteLayer", n_bands)
        _check_kn(k, n_bands)
        if not tau0 > 0:
            raise ConfigurationError(f"tau0 must be > 0, got {tau0}")
        if not 0.0 < alpha < 1.0:
            raise ConfigurationError(f"alpha must lie in (0, 1), got {alpha}")
        if not 0.0 < beta < 1.0:
            raise ConfigurationError(f"beta must lie in (0, 1), got {beta}")
        if init not in CONCRETE_INITS:
            raise ConfigurationError(f"unknown init '{init}', expected one of {CONCRETE_INITS}")
        self.k = int(k)
        self.tau = float(tau0)
        self.alpha = float(alpha)
        self.beta = float(beta)
        self.init = init
        rng = rng or Rng(0)
        if init == 'segmented':
            self.logits = init_segmented_xavier(self.k, self.n_bands, rng)
        elif init == 'plain':
            self.logits = init_plain_xavier(self.k, self.n_bands, rng)
        else:
            if not prior_bands:
                raise ConfigurationError("seeded init needs prior_bands")
            self.logits = init_seeded_logits(self.k, self.n_bands, prior_bands, rng)

    @property
    def output_width(self) -> int:
        return self.k

    def parameters(self) -> Dict[str, np.ndarray]:
        return {'logits': self.logits}

    def forward_with_noise(self, x: np.ndarray, g: np.ndarray) -> Tuple[np.ndarray, ConcreteForwardRecord]:
        """Compress ``x`` with a given Gumbel noise matrix."""
        x = self._check_width(x)
        g = np.asarray(g, dtype=np.float64)
        if g.shape != self.logits.shape:
            raise ShapeMismatchError(f"noise must have shape {self.logits.shape}, got {g.shape}")
        m = softmax_row(self.logits + g, self.tau)
        return x @ m.T, ConcreteForwardRecord(m=m, g=g.copy(), tau=self.tau)

    def forward_train(self, x: np.ndarray, rng: Rng) -> Tuple[np.ndarray, ConcreteForwardRecord]:
        g = np.asarray(sample_gumbel(rng, self.beta, self.logits.shape))
        return self.forward_with_noise(x, g)

    def forward_infer(self, x: np.ndarray) -> np.ndarray:
        """x at the row-wise argmax of L; no noise, no temperature."""
        x = self._check_width(x)
        return x[..., self.row_picks()]

    def backward(self, record: ConcreteForwardRecord, x: np.ndarray, grad_out: np.ndarray) -> Dict[str, np.ndarray]:
        """
        Gradient over L with the noise held fixed.

        dL_ir = (1/tau) * M_ir * (dM_ir - sum_j dM_ij M_ij), dM = grad_out^T x.
        """
        x = self._check_width(x)
        grad_out = np.asarray(grad_out, dtype=np.float64)
        if record.m.shape != self.logits.shape:
            raise ShapeMismatchError("stale concrete record: layer shape changed since forward pass")
        if grad_out.shape[-1] != self.k or grad_out.ndim != x.ndim:
            raise ShapeMismatchError(f"grad_out shape {grad_out.shape} does not match k={self.k}")
        if x.ndim == 1:
            grad_m = np.outer(grad_out, x)
        else:
            if grad_out.shape[0] != x.shape[0]:
                raise ShapeMismatchError("grad_out and input batch sizes differ")
            grad_m = grad_out.T @ x
        m = record.m
        inner = np.sum(grad_m * m, axis=1, keepdims=True)
        return {'logits': m * (grad_m - inner) / record.tau}

    def anneal_temperature(self) -> "ConcreteLayer":
        """tau <- tau * alpha; called once per training batch."""
        self.tau *= self.alpha
        return self

    def on_batch_end(self) -> None:
        self.anneal_temperature()

    def row_picks(self) -> np.ndarray:
        return np.argmax(self.logits, axis=1)

    def selected_bands(self) -> SelectionReport:
        picks = tuple(int(i) for i in self.row_picks())
        return SelectionReport(selection=BandSelection.from_indices(picks), picks=picks)

    def current_selection(self) -> BandSelection:
        return self.selected_bands().selection
