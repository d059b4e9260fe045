"""
Fixed band subsets used by the all-bands, random-k and variance-k methods,
and by the EHBS fine-tuning phase.
"""

from typing import Dict, Tuple

import numpy as np

from ..core.base_classes import BaseSelector
from ..core.exceptions import ConfigurationError, ShapeMismatchError
from ..core.rng import Rng
from .band_selection import BandSelection


class FixedSelector(BaseSelector):
    """Passes a fixed, spectrally ordered subset of bands; nothing to train."""

    def __init__(self, n_bands: int, selection: BandSelection):
        super().__init__("FixedSelector", n_bands)
        if selection.k == 0:
            raise ConfigurationError("a fixed selection needs at least one band")
        if selection.indices[-1] >= n_bands:
            raise ConfigurationError(
                f"band {selection.indices[-1]} outside a {n_bands}-band spectrum"
            )
        self.selection = selection
        self._index = np.asarray(selection.indices, dtype=np.intp)

    @property
    def output_width(self) -> int:
        return self.selection.k

    def forward_train(self, x: np.ndarray, rng: Rng) -> Tuple[np.ndarray, None]:
        return self.forward_infer(x), None

    def forward_infer(self, x: np.ndarray) -> np.ndarray:
        x = self._check_width(x)
        return x[..., self._index]

    def backward(self, record: None, x: np.ndarray, grad_out: np.ndarray) -> Dict[str, np.ndarray]:
        if np.shape(grad_out)[-1] != self.output_width:
            raise ShapeMismatchError(
                f"grad_out width {np.shape(grad_out)[-1]} does not match {self.output_width} bands"
            )
        return {}

    def current_selection(self) -> BandSelection:
        return self.selection


def all_bands(n_bands: int) -> BandSelection:
    return BandSelection(tuple(range(n_bands)))


def random_k(n_bands: int, k: int, rng: Rng) -> BandSelection:
    """k distinct bands drawn uniformly without replacement."""
    if not 1 <= k <= n_bands:
        raise ConfigurationError(f"k must lie in [1, {n_bands}], got {k}")
    return BandSelection.from_indices(rng.choice(n_bands, k, replace=False))


def variance_k(variance_order: np.ndarray, k: int) -> BandSelection:
    """The first k entries of a descending-variance ranking, in spectral order."""
    if not 1 <= k <= len(variance_order):
        raise ConfigurationError(f"k must lie in [1, {len(variance_order)}], got {k}")
    return BandSelection.from_indices(variance_order[:k])
