"""
In-memory labelled spectra, per-band standardization and splits.
"""

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from ..core.exceptions import DatasetError
from ..core.rng import Rng


@dataclass
class Dataset:
    """
    m labelled spectra of n bands.

    Attributes:
        spectra: (m, n) reflectance matrix
        labels: (m,) class indices in [0, n_classes)
        n_classes: number of classes
        spatial_shape: optional (h, w) of the scene the pixels came from
    """

    spectra: np.ndarray
    labels: np.ndarray
    n_classes: int
    spatial_shape: Optional[Tuple[int, int]] = None

    def __post_init__(self):
        self.spectra = np.asarray(self.spectra, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        self.n_classes = int(self.n_classes)
        if self.spectra.ndim != 2 or self.spectra.shape[0] == 0 or self.spectra.shape[1] == 0:
            raise DatasetError(f"spectra must be a non-empty (m, n) matrix, got shape {self.spectra.shape}")
        if self.labels.shape != (self.spectra.shape[0],):
            raise DatasetError(f"{self.labels.size} labels for {self.spectra.shape[0]} spectra")
        if self.n_classes < 1:
            raise DatasetError(f"class count must be >= 1, got {self.n_classes}")
        if np.any(self.labels < 0) or np.any(self.labels >= self.n_classes):
            raise DatasetError(f"labels must lie in [0, {self.n_classes})")
        if not np.all(np.isfinite(self.spectra)):
            raise DatasetError("spectra contain non-finite values")

    @property
    def n_samples(self) -> int:
        return self.spectra.shape[0]

    @property
    def n_bands(self) -> int:
        return self.spectra.shape[1]

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.n_classes)

    def subset(self, indices: Sequence[int]) -> "Dataset":
        idx = np.asarray(indices, dtype=np.int64)
        return Dataset(self.spectra[idx], self.labels[idx], self.n_classes, self.spatial_shape)

    def select_bands(self, bands: Sequence[int]) -> "Dataset":
        return Dataset(self.spectra[:, np.asarray(bands, dtype=np.int64)], self.labels, self.n_classes)

    def __len__(self) -> int:
        return self.n_samples


class Standardizer:
    """Per-band z-score fitted on one set of spectra and applied to others."""

    def __init__(self):
        self.mean: Optional[np.ndarray] = None
        self.scale: Optional[np.ndarray] = None

    def fit(self, spectra: np.ndarray) -> "Standardizer":
        spectra = np.asarray(spectra, dtype=np.float64)
        self.mean = spectra.mean(axis=0)
        scale = spectra.std(axis=0)
        # constant bands pass through centred
        scale[scale == 0.0] = 1.0
        self.scale = scale
        return self

    def transform(self, spectra: np.ndarray) -> np.ndarray:
        if self.mean is None:
            raise DatasetError("standardizer used before fit")
        return (np.asarray(spectra, dtype=np.float64) - self.mean) / self.scale

    def fit_transform(self, spectra: np.ndarray) -> np.ndarray:
        return self.fit(spectra).transform(spectra)


def variance_rank(data: Dataset) -> np.ndarray:
    """Band indices by descending population variance, ties broken by lower index."""
    if data.n_samples < 2:
        raise DatasetError(f"variance ranking needs at least 2 samples, got {data.n_samples}")
    variance = data.spectra.var(axis=0)
    return np.lexsort((np.arange(data.n_bands), -variance))


def holdout_split(
    data: Dataset,
    fractions: Tuple[float, float, float] = (0.7, 0.1, 0.2),
    rng: Optional[Rng] = None,
) -> Tuple[Dataset, Dataset, Dataset]:
    """
    Seeded train/validation/test split.

    Args:
        data: Dataset to split
        fractions: train, validation and test shares, summing to 1
        rng: Stream for the shuffling permutation

    Returns:
        Tuple of (train, validation, test) datasets, each non-empty
    """
    shares = np.asarray(fractions, dtype=np.float64)
    if shares.shape != (3,) or np.any(shares <= 0) or not np.isclose(shares.sum(), 1.0):
        raise DatasetError(f"split fractions must be three positive shares summing to 1, got {fractions}")
    if data.n_samples < 3:
        raise DatasetError(f"hold-out split needs at least 3 samples, got {data.n_samples}")
    order = (rng or Rng(0)).permutation(data.n_samples)
    n_train = max(1, int(round(shares[0] * data.n_samples)))
    n_val = max(1, int(round(shares[1] * data.n_samples)))
    n_train = min(n_train, data.n_samples - n_val - 1)
    train_idx = order[:n_train]
    val_idx = order[n_train:n_train + n_val]
    test_idx = order[n_train + n_val:]
    return data.subset(train_idx), data.subset(val_idx), data.subset(test_idx)
