"""
Dataset, synthetic generator and CSV exchange format tests.
"""

import numpy as np
import pytest

from bandgate.core.exceptions import ConfigurationError, DataFormatError, DatasetError
from bandgate.core.rng import Rng
from bandgate.data import (
    Dataset, Standardizer, SyntheticSpec, generate, holdout_split, load_csv, save_csv, variance_rank,
)


def test_dataset_validation():
    with pytest.raises(DatasetError):
        Dataset(np.ones((3, 2)), np.array([0, 1]), 2)
    with pytest.raises(DatasetError):
        Dataset(np.ones((2, 2)), np.array([0, 2]), 2)
    with pytest.raises(DatasetError):
        Dataset(np.array([[1.0, np.nan]]), np.array([0]), 2)


def test_subset_and_band_selection(tiny_dataset):
    sub = tiny_dataset.subset([1, 3])
    np.testing.assert_array_equal(sub.labels, [1, 1])
    bands = tiny_dataset.select_bands([2])
    assert bands.n_bands == 1
    np.testing.assert_allclose(bands.spectra[:, 0], [0.3, 0.6, 0.9, 1.2])
    np.testing.assert_array_equal(tiny_dataset.class_counts(), [2, 2])


def test_standardizer_handles_constant_bands():
    spectra = np.array([[1.0, 5.0], [3.0, 5.0]])
    out = Standardizer().fit_transform(spectra)
    np.testing.assert_allclose(out[:, 0], [-1.0, 1.0])
    np.testing.assert_allclose(out[:, 1], [0.0, 0.0])


def test_variance_rank_breaks_ties_by_index():
    spectra = np.array([[0.0, 1.0, 0.0, 5.0], [2.0, 3.0, 0.0, 5.0]])
    order = variance_rank(Dataset(spectra, np.array([0, 1]), 2))
    np.testing.assert_array_equal(order, [0, 1, 2, 3])
    with pytest.raises(DatasetError):
        variance_rank(Dataset(spectra[:1], np.array([0]), 2))


def test_variance_rank_puts_scaled_copy_first():
    base = np.asarray(Rng(6).normal(1.0, (50, 1)))
    spectra = np.hstack([base, 3.0 * base, np.asarray(Rng(7).normal(0.1, (50, 3)))])
    order = variance_rank(Dataset(spectra, np.zeros(50, dtype=np.int64), 1)).tolist()
    assert order.index(1) < order.index(0)


def test_variance_rank_matches_two_pass_variance(small_planted):
    spectra = small_planted.spectra
    means = spectra.sum(axis=0) / spectra.shape[0]
    variance = ((spectra - means) ** 2).sum(axis=0) / spectra.shape[0]
    expected = sorted(range(spectra.shape[1]), key=lambda band: (-variance[band], band))
    assert variance_rank(small_planted).tolist() == expected


def test_holdout_split_partitions_samples(small_planted):
    train, val, test = holdout_split(small_planted, rng=Rng(4))
    assert train.n_samples + val.n_samples + test.n_samples == small_planted.n_samples
    assert min(train.n_samples, val.n_samples, test.n_samples) > 0
    with pytest.raises(DatasetError):
        holdout_split(small_planted, fractions=(0.5, 0.5, 0.0))


def test_generator_is_deterministic_and_balanced():
    spec = SyntheticSpec(n_bands=8, n_classes=4, samples=100, informative=(1, 5), seed=9)
    a, b = generate(spec), generate(spec)
    np.testing.assert_array_equal(a.spectra, b.spectra)
    np.testing.assert_array_equal(a.labels, b.labels)
    np.testing.assert_array_equal(a.class_counts(), [25, 25, 25, 25])


def test_informative_band_separates_classes(separable_dataset):
    band = separable_dataset.spectra[:, 0]
    means = [band[separable_dataset.labels == c].mean() for c in range(2)]
    assert abs(means[0] - means[1]) == pytest.approx(1.0)
    # without noise the informative band carries one value per class
    for c in range(2):
        assert np.ptp(band[separable_dataset.labels == c]) < 1e-12


def nearest_mean_accuracy(data: Dataset) -> float:
    half = data.n_samples // 2
    fit, held = data.subset(np.arange(half)), data.subset(np.arange(half, data.n_samples))
    centroids = np.stack([fit.spectra[fit.labels == c].mean(axis=0) for c in range(data.n_classes)])
    distances = ((held.spectra[:, None, :] - centroids[None]) ** 2).sum(axis=2)
    return float(np.mean(distances.argmin(axis=1) == held.labels))


def test_uninformative_data_stays_at_chance():
    data = generate(SyntheticSpec(n_bands=8, n_classes=4, samples=4000, informative=(), seed=2))
    assert nearest_mean_accuracy(data) == pytest.approx(0.25, abs=0.05)


def test_stump_on_one_informative_band():
    data = generate(SyntheticSpec(n_bands=10, n_classes=2, samples=2000, informative=(3, 8),
                                  class_signature_gap=1.0, noise_std=0.2, correlation_width=2, seed=4))
    band = data.spectra[:, 3]
    means = [band[data.labels == c].mean() for c in range(2)]
    predicted = (band > sum(means) / 2).astype(np.int64)
    if means[0] > means[1]:
        predicted = 1 - predicted
    assert np.mean(predicted == data.labels) >= 0.95


def test_generator_rejects_bad_informative_bands():
    with pytest.raises(ConfigurationError, match=r"\[12\]"):
        SyntheticSpec(n_bands=10, n_classes=2, samples=10, informative=(3, 12))
    with pytest.raises(ConfigurationError):
        SyntheticSpec(n_bands=10, n_classes=1, samples=10)


def test_csv_round_trip_is_exact(tmp_path, small_planted):
    path = tmp_path / "data.csv"
    save_csv(small_planted, path)
    first = path.read_text().splitlines()[0]
    assert first == "bands=12 classes=3"
    loaded = load_csv(path)
    np.testing.assert_array_equal(loaded.spectra, small_planted.spectra)
    np.testing.assert_array_equal(loaded.labels, small_planted.labels)
    assert loaded.n_classes == 3


def test_ragged_row_reports_line_number(tmp_path):
    path = tmp_path / "ragged.csv"
    path.write_text("bands=2 classes=2\n0,0.1,0.2\n1,0.3\n")
    with pytest.raises(DataFormatError, match=r":3: ragged row"):
        load_csv(path)


@pytest.mark.parametrize("content, error", [
    ("", DatasetError),
    ("bands=2 classes=2\n", DatasetError),
    ("bands=two\n0,1,2\n", DataFormatError),
    ("bands=2 classes=2\n0,0.1,inf\n", DataFormatError),
    ("bands=2 classes=2\n0.5,0.1,0.2\n", DataFormatError),
    ("bands=2 classes=2\n2,0.1,0.2\n", DataFormatError),
    ("bands=2 classes=2\n0,abc,0.2\n", DataFormatError),
])
def test_malformed_csv_is_rejected(tmp_path, content, error):
    path = tmp_path / "bad.csv"
    path.write_text(content)
    with pytest.raises(error):
        load_csv(path)


def test_empty_file_message(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("")
    with pytest.raises(DatasetError, match="empty dataset"):
        load_csv(path)
