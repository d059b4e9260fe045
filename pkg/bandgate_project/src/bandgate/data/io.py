"""
Dataset CSV reader and writer.

Layout: a header line ``bands=<n> classes=<c>`` followed by one
``label,v0,...,v_{n-1}`` row per sample.
"""

import io
import re
from pathlib import Path
from typing import Union

import numpy as np
import pandas as pd

from ..config.constants import FLOAT_FORMAT
from ..core.exceptions import DataFormatError, DatasetError
from ..core.logging_config import get_logger
from .dataset import Dataset

logger = get_logger(__name__)

HEADER_PATTERN = re.compile(r'^\s*bands=(\d+)\s+classes=(\d+)\s*$')


def save_csv(dataset: Dataset, path: Union[str, Path]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame(dataset.spectra)
    frame.insert(0, 'label', dataset.labels)
    with path.open('w', newline='') as handle:
        handle.write(f"bands={dataset.n_bands} classes={dataset.n_classes}\n")
        frame.to_csv(handle, header=False, index=False, float_format=FLOAT_FORMAT, lineterminator='\n')
    logger.info("dataset_saved", path=str(path), samples=dataset.n_samples, bands=dataset.n_bands)


def load_csv(path: Union[str, Path]) -> Dataset:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise DatasetError(f"cannot read dataset {path}: {e}")

    lines = text.splitlines()
    if not any(line.strip() for line in lines):
        raise DatasetError(f"empty dataset: {path} has no content")

    match = HEADER_PATTERN.match(lines[0])
    if match is None:
        raise DataFormatError(f"{path}:1: malformed header {lines[0]!r}, expected 'bands=<n> classes=<c>'")
    n_bands, n_classes = int(match.group(1)), int(match.group(2))
    if n_bands < 1 or n_classes < 1:
        raise DataFormatError(f"{path}:1: header declares {n_bands} bands and {n_classes} classes")

    body = []
    for line_no, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        fields = line.count(',') + 1
        if fields != n_bands + 1:
            raise DataFormatError(
                f"{path}:{line_no}: ragged row with {fields} fields, expected {n_bands + 1} "
                f"(label plus {n_bands} bands)"
            )
        body.append(line)
    if not body:
        raise DatasetError(f"empty dataset: {path} has a header but no samples")

    try:
        frame = pd.read_csv(io.StringIO('\n'.join(body)), header=None, dtype=np.float64,
                            float_precision='round_trip')
    except ValueError as e:
        raise DataFormatError(f"{path}: non-numeric value: {e}")
    values = frame.to_numpy()

    labels = values[:, 0]
    spectra = values[:, 1:]
    non_finite = np.flatnonzero(~np.isfinite(values).all(axis=1))
    if non_finite.size:
        raise DataFormatError(f"{path}: sample {int(non_finite[0]) + 1} contains a non-finite value")
    if np.any(labels != np.round(labels)):
        row = int(np.flatnonzero(labels != np.round(labels))[0])
        raise DataFormatError(f"{path}: sample {row + 1} has a non-integer label {labels[row]!r}")
    out_of_range = np.flatnonzero((labels < 0) | (labels >= n_classes))
    if out_of_range.size:
        row = int(out_of_range[0])
        raise DataFormatError(f"{path}: sample {row + 1} label {int(labels[row])} outside [0, {n_classes})")

    dataset = Dataset(spectra, labels.astype(np.int64), n_classes)
    logger.info("dataset_loaded", path=str(path), samples=dataset.n_samples, bands=n_bands)
    return dataset
