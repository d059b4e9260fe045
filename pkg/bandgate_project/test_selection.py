"""
Band selector tests: numerics, stochastic gates, the concrete layer and
the fixed baselines.
"""

import math

import numpy as np
import pytest

from bandgate.core.exceptions import ConfigurationError, ShapeMismatchError
from bandgate.core.numerics import (
    clamp01, gumbel_transform, sample_gaussian, sample_gumbel, softmax_row,
    std_normal_cdf, std_normal_pdf,
)
from bandgate.core.rng import Rng
from bandgate.selection.band_selection import BandSelection
from bandgate.selection.baselines import FixedSelector, all_bands, random_k, variance_k
from bandgate.selection.concrete import (
    ConcreteLayer, init_segmented_xavier, segment_bounds, xavier_bound,
)
from bandgate.selection.gates import GateLayer, lambda_for_k, top_k_indices


# --- numerics ---------------------------------------------------------------

def test_cdf_and_pdf_reference_values():
    assert std_normal_cdf(0.0) == pytest.approx(0.5)
    assert std_normal_cdf(1.96) == pytest.approx(0.9750021, abs=1e-6)
    assert std_normal_pdf(0.0) == pytest.approx(1.0 / math.sqrt(2.0 * math.pi))
    # phi(0) / sigma at the default sigma
    assert std_normal_pdf(0.0) / 0.5 == pytest.approx(0.79788, abs=1e-5)


def test_cdf_is_monotone():
    xs = np.linspace(-6, 6, 101)
    assert np.all(np.diff(std_normal_cdf(xs)) >= 0)


def test_softmax_rows_sum_to_one_and_shift_invariant():
    logits = np.array([[1.0, 2.0, 3.0], [0.0, 0.0, 0.0]])
    out = softmax_row(logits, 0.5)
    np.testing.assert_allclose(out.sum(axis=1), 1.0)
    np.testing.assert_allclose(softmax_row(logits + 100.0, 0.5), out)
    np.testing.assert_allclose(out[1], [1 / 3, 1 / 3, 1 / 3])


def test_softmax_rejects_nonpositive_tau():
    with pytest.raises(ConfigurationError):
        softmax_row(np.zeros(3), 0.0)


def test_clamp01():
    np.testing.assert_array_equal(clamp01(np.array([-0.5, 0.3, 1.7])), [0.0, 0.3, 1.0])


def test_gumbel_noise_is_bounded_by_beta():
    g = sample_gumbel(Rng(0), 0.15, 10000)
    assert np.all(g <= gumbel_transform(0.15) + 1e-12)
    assert np.all(np.isfinite(g))


def test_noise_parameter_validation():
    with pytest.raises(ConfigurationError):
        sample_gumbel(Rng(0), 1.0, 3)
    with pytest.raises(ConfigurationError):
        sample_gaussian(Rng(0), 0.0, 3)


def test_substreams_are_reproducible_and_independent():
    a = Rng(7).substream(4, 2).normal(1.0, 5)
    b = Rng(7).substream(4, 2).normal(1.0, 5)
    c = Rng(7).substream(4, 3).normal(1.0, 5)
    np.testing.assert_array_equal(a, b)
    assert not np.allclose(a, c)


# --- band selection value ---------------------------------------------------

def test_band_selection_normalizes_and_validates():
    selection = BandSelection.from_indices([5, 1, 5, 3])
    assert selection.indices == (1, 3, 5)
    assert selection.joined() == "1;3;5"
    assert 3 in selection
    with pytest.raises(ConfigurationError):
        BandSelection((3, 1))
    with pytest.raises(ConfigurationError):
        BandSelection((1, 1))


# --- stochastic gates -------------------------------------------------------

def test_lambda_scaling():
    assert lambda_for_k(0.5, 30, 4) == pytest.approx(3.75)
    with pytest.raises(ConfigurationError):
        lambda_for_k(0.5, 30, 31)


def test_regularizer_at_zero_mean():
    gates = GateLayer(3, sigma=0.5, reg_lambda=2.0, mu0=0.0)
    assert gates.regularizer() == pytest.approx(3.0)


def test_inference_gating_is_deterministic():
    gates = GateLayer(4, mu0=0.5)
    gates.mu[:] = [-0.2, 0.3, 0.9, 1.4]
    x = np.array([2.0, 2.0, 2.0, 2.0])
    np.testing.assert_allclose(gates.forward_infer(x), [0.0, 0.6, 1.8, 2.0])
    np.testing.assert_allclose(gates.forward_infer(x), gates.forward_infer(x))


def test_gate_gradient_is_masked_outside_the_clamp():
    gates = GateLayer(3, sigma=0.5, reg_lambda=0.0, mu0=0.5)
    gates.mu[:] = [-1.0, 0.5, 2.0]
    x = np.array([[1.0, 2.0, 3.0]])
    out, record = gates.forward_with_noise(x, np.zeros(3))
    grads = gates.backward(record, x, np.ones_like(out))
    np.testing.assert_allclose(grads['mu'], [0.0, 2.0, 0.0])


def test_gate_noise_shape_is_checked():
    gates = GateLayer(3)
    with pytest.raises(ShapeMismatchError):
        gates.forward_with_noise(np.ones(3), np.zeros(4))
    with pytest.raises(ShapeMismatchError):
        gates.forward_infer(np.ones(5))


def test_top_k_ties_go_to_lower_index():
    assert top_k_indices(np.array([0.5, 0.9, 0.5, 0.5]), 2).indices == (0, 1)
    gates = GateLayer(5)
    gates.mu[:] = [0.1, 0.8, 0.3, 0.9, 0.2]
    assert gates.select_top_k(2).indices == (1, 3)


# --- concrete layer ---------------------------------------------------------

def test_segment_bounds_last_segment_absorbs_remainder():
    assert segment_bounds(3, 10) == [(0, 3), (3, 6), (6, 10)]


def test_segmented_offsets_average_to_zero():
    k, n = 4, 30
    plain = Rng(2).uniform(-xavier_bound(k, n), xavier_bound(k, n), (k, n))
    segmented = init_segmented_xavier(k, n, Rng(2))
    offsets = segmented - plain
    np.testing.assert_allclose(offsets.sum(axis=1), 0.0, atol=1e-12)
    for row, (start, end) in enumerate(segment_bounds(k, n)):
        assert np.all(offsets[row, start:end] > 0)


def test_concrete_training_rows_are_simplex():
    layer = ConcreteLayer(12, 5, rng=Rng(0))
    x = Rng(1).normal(1.0, (8, 12))
    out, record = layer.forward_train(x, Rng(3))
    assert out.shape == (8, 5)
    assert np.all(record.m >= 0)
    np.testing.assert_allclose(record.m.sum(axis=1), 1.0)


def test_concrete_inference_uses_argmax_picks():
    layer = ConcreteLayer(6, 2, init='plain', rng=Rng(0))
    layer.logits[:] = 0.0
    layer.logits[0, 4] = 1.0
    layer.logits[1, 1] = 1.0
    x = np.arange(6.0)
    np.testing.assert_array_equal(layer.forward_infer(x), [4.0, 1.0])
    assert layer.current_selection().indices == (1, 4)


def test_duplicate_picks_are_reported_not_repaired():
    layer = ConcreteLayer(6, 3, init='plain', rng=Rng(0))
    layer.logits[:] = 0.0
    layer.logits[:, 2] = 1.0
    report = layer.selected_bands()
    assert report.picks == (2, 2, 2)
    assert report.distinct_count == 1
    assert report.has_duplicates


def test_annealing_is_geometric():
    layer = ConcreteLayer(10, 3, tau0=2.0, alpha=0.5, rng=Rng(0))
    for _ in range(3):
        layer.on_batch_end()
    assert layer.tau == pytest.approx(0.25)


def test_concrete_validates_hyperparameters():
    with pytest.raises(ConfigurationError):
        ConcreteLayer(5, 6)
    with pytest.raises(ConfigurationError):
        ConcreteLayer(5, 2, beta=1.5)
    with pytest.raises(ConfigurationError):
        ConcreteLayer(5, 2, init='seeded')


def test_seeded_init_starts_on_prior_bands():
    layer = ConcreteLayer(20, 3, init='seeded', prior_bands=[4, 9, 15], rng=Rng(0))
    assert layer.current_selection().indices == (4, 9, 15)


# --- fixed baselines --------------------------------------------------------

def test_fixed_selector_passes_subset():
    selector = FixedSelector(5, BandSelection((1, 3)))
    x = np.array([[0.0, 1.0, 2.0, 3.0, 4.0]])
    np.testing.assert_array_equal(selector.forward_infer(x), [[1.0, 3.0]])
    assert selector.backward(None, x, np.ones((1, 2))) == {}


def test_baseline_selections():
    assert all_bands(4).indices == (0, 1, 2, 3)
    picked = random_k(20, 5, Rng(0))
    assert picked.k == 5 and picked.indices[-1] < 20
    assert variance_k(np.array([7, 2, 9, 0]), 3).indices == (2, 7, 9)


# --- statistical and algebraic properties -----------------------------------

def test_substreams_are_uncorrelated():
    root = Rng(3)
    a = np.asarray(root.substream(1).normal(1.0, 100_000))
    b = np.asarray(root.substream(2).normal(1.0, 100_000))
    assert abs(np.corrcoef(a, b)[0, 1]) < 0.02


def test_gaussian_noise_scale_and_coverage():
    draws = np.asarray(sample_gaussian(Rng(0), 0.5, 1_000_000))
    assert draws.std() == pytest.approx(0.5, abs=2e-3)
    assert np.mean(np.abs(draws) <= 0.5) == pytest.approx(0.6827, abs=3e-3)


def test_pdf_is_derivative_of_cdf():
    xs = np.linspace(-4.0, 4.0, 100)
    h = 1e-5
    numeric = (std_normal_cdf(xs + h) - std_normal_cdf(xs - h)) / (2 * h)
    np.testing.assert_allclose(numeric, std_normal_pdf(xs), atol=1e-8)


def test_softmax_survives_large_logits():
    logits = np.asarray(Rng(5).normal(1e3, (1000, 20)))
    rows = softmax_row(logits, 1.0)
    assert np.all(np.isfinite(rows))
    assert np.max(np.abs(rows.sum(axis=1) - 1.0)) <= 1e-12


def test_concrete_gradient_rows_sum_to_zero():
    layer = ConcreteLayer(12, 4, rng=Rng(0))
    x = Rng(1).normal(1.0, (16, 12))
    out, record = layer.forward_train(x, Rng(2))
    grads = layer.backward(record, x, Rng(3).normal(1.0, out.shape))['logits']
    np.testing.assert_allclose(grads.sum(axis=1), 0.0, atol=1e-10)
    silent = layer.backward(record, x, np.zeros_like(out))['logits']
    assert np.all(silent == 0.0)


def test_hot_selector_averages_the_spectrum():
    layer = ConcreteLayer(10, 3, tau0=1e6, rng=Rng(0))
    x = np.asarray(Rng(1).uniform(0.0, 1.0, 10))
    out, _ = layer.forward_train(x, Rng(2))
    np.testing.assert_allclose(out, np.full(3, x.mean()), atol=1e-3)


def test_cold_selector_rows_are_mostly_one_hot():
    layer = ConcreteLayer(12, 1, tau0=0.01, beta=0.15, init='plain', rng=Rng(0))
    layer.logits[:] = 0.0
    layer.logits[0, 5] = 1.0
    noise = Rng(1)
    peaks = [layer.forward_train(np.ones(12), noise)[1].m.max() for _ in range(1000)]
    # near-ties between the noisy leader and the runner-up do occur
    assert np.mean(np.array(peaks) > 0.99) >= 0.9


def test_regularizer_increases_with_mean():
    gates = GateLayer(1, sigma=0.5, reg_lambda=1.0)
    values = []
    for mu in np.linspace(-2.0, 2.0, 41):
        gates.mu[:] = mu
        values.append(gates.regularizer())
    assert np.all(np.diff(values) > 0)


def test_top_k_ignores_scale_and_takes_everything_at_k_equals_n():
    gates = GateLayer(8, k=3)
    gates.mu[:] = np.asarray(Rng(4).normal(1.0, 8))
    picked = gates.select_top_k(3)
    gates.mu *= 3.7
    assert gates.select_top_k(3) == picked
    assert gates.select_top_k(8).indices == tuple(range(8))


def test_saturated_gates_pass_or_block_whole_bands():
    gates = GateLayer(4, sigma=0.5, reg_lambda=1.0)
    gates.mu[:] = [10.0, -10.0, 10.0, -10.0]
    x = np.array([[1.0, 2.0, 3.0, 4.0], [5.0, 6.0, 7.0, 8.0]])
    out, record = gates.forward_train(x, Rng(0))
    np.testing.assert_array_equal(out, x * np.array([1.0, 0.0, 1.0, 0.0]))
    assert not record.active.any()
    grads = gates.backward(record, x, np.ones_like(x))
    np.testing.assert_allclose(grads['mu'], gates.regularizer_gradient())


def test_segmented_init_picks_one_band_per_segment():
    hits = 0
    for seed in range(100):
        layer = ConcreteLayer(10, 2, init='segmented', rng=Rng(seed))
        picks = layer.row_picks()
        hits += all(start <= p < end for p, (start, end) in zip(picks, segment_bounds(2, 10)))
    assert hits >= 90


def test_segmented_rows_favour_their_segment():
    bounds = segment_bounds(6, 30)
    segmented = plain = 0
    for seed in range(100):
        seg_picks = ConcreteLayer(30, 6, init='segmented', rng=Rng(seed)).row_picks()
        plain_picks = ConcreteLayer(30, 6, init='plain', rng=Rng(seed)).row_picks()
        segmented += sum(s <= p < e for p, (s, e) in zip(seg_picks, bounds))
        plain += sum(s <= p < e for p, (s, e) in zip(plain_picks, bounds))
    assert segmented / 600 >= 0.8
    assert segmented > plain
