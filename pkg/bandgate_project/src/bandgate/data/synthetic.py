"""
Synthetic spectra with planted informative bands.

Only the planted bands carry class information: each class sits at its own
level on every informative band, every other band is class-independent
background. The background is smoothed across neighbouring bands to mimic
spectral contiguity.
"""

from dataclasses import dataclass, field
from typing import Tuple

import numpy as np
from scipy.ndimage import uniform_filter1d

from ..core.exceptions import ConfigurationError
from ..core.logging_config import get_logger
from ..core.rng import Rng
from .dataset import Dataset

logger = get_logger(__name__)

# substream ids
_LABELS, _LEVELS, _BACKGROUND, _NOISE = 0, 1, 2, 3


@dataclass(frozen=True)
class SyntheticSpec:
    n_bands: int
    n_classes: int
    samples: int
    informative: Tuple[int, ...] = field(default_factory=tuple)
    class_signature_gap: float = 1.0
    noise_std: float = 0.1
    correlation_width: int = 0
    seed: int = 0
    background_std: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, 'informative', tuple(int(b) for b in self.informative))
        self.validate()

    def validate(self) -> None:
        if self.n_bands < 1:
            raise ConfigurationError(f"n_bands must be >= 1, got {self.n_bands}")
        if self.n_classes < 2:
            raise ConfigurationError(f"n_classes must be >= 2, got {self.n_classes}")
        if self.samples < 1:
            raise ConfigurationError(f"samples must be >= 1, got {self.samples}")
        if len(set(self.informative)) != len(self.informative):
            raise ConfigurationError(f"informative bands must be distinct, got {list(self.informative)}")
        bad = [b for b in self.informative if not 0 <= b < self.n_bands]
        if bad:
            raise ConfigurationError(f"informative bands {bad} outside [0, {self.n_bands})")
        if not self.class_signature_gap > 0:
            raise ConfigurationError(f"class_signature_gap must be > 0, got {self.class_signature_gap}")
        if self.noise_std < 0 or self.background_std < 0:
            raise ConfigurationError("noise_std and background_std must be >= 0")
        if self.correlation_width < 0:
            raise ConfigurationError(f"correlation_width must be >= 0, got {self.correlation_width}")


def reflectance_curve(n_bands: int) -> np.ndarray:
    """Smooth, positive mean spectrum shared by every class."""
    position = np.linspace(0.0, 1.0, n_bands)
    return 0.35 + 0.15 * np.sin(2.0 * np.pi * position) + 0.1 * position


def generate(spec: SyntheticSpec) -> Dataset:
    """Draw a dataset; identical specs give bitwise-identical datasets."""
    spec.validate()
    root = Rng(spec.seed)
    m, n, c = spec.samples, spec.n_bands, spec.n_classes

    labels = np.arange(m) % c
    labels = labels[root.substream(_LABELS).permutation(m)]

    spectra = np.tile(reflectance_curve(n), (m, 1))

    background = np.asarray(root.substream(_BACKGROUND).normal(spec.background_std, (m, n)))
    if spec.correlation_width > 0:
        background = uniform_filter1d(background, size=2 * spec.correlation_width + 1, axis=1, mode='nearest')
    informative = np.asarray(spec.informative, dtype=np.int64)
    background[:, informative] = 0.0
    spectra += background

    levels_rng = root.substream(_LEVELS)
    for band in informative:
        levels = levels_rng.permutation(c) * spec.class_signature_gap
        spectra[:, band] += levels[labels]

    if spec.noise_std > 0:
        spectra += np.asarray(root.substream(_NOISE).normal(spec.noise_std, (m, n)))

    logger.info(
        "dataset_generated",
        samples=m,
        bands=n,
        classes=c,
        informative=informative.tolist(),
        seed=spec.seed,
    )
    return Dataset(spectra, labels, c)
