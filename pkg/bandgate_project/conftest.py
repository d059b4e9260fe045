"""
Shared pytest configuration for the bandgate test suites.
"""

import sys
from pathlib import Path

import numpy as np
import pytest

# Add src to path
project_root = Path(__file__).parent
sys.path.insert(0, str(project_root / "src"))

from bandgate.data.dataset import Dataset  # noqa: E402
from bandgate.data.synthetic import SyntheticSpec, generate  # noqa: E402


def pytest_addoption(parser):
    parser.addoption("--run-slow", action="store_true", default=False,
                     help="run the statistical training experiments")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: statistical training experiments (minutes)")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--run-slow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --run-slow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def hand_confusion():
    """The 2x2 worked example: OA 0.8, AA 0.8, kappa 0.6."""
    return np.array([[45, 5], [15, 35]])


@pytest.fixture
def separable_dataset():
    """Two classes split by a threshold on band 0, n=10, m=2000."""
    return generate(SyntheticSpec(
        n_bands=10, n_classes=2, samples=2000, informative=(0,),
        class_signature_gap=1.0, noise_std=0.0, seed=5,
    ))


@pytest.fixture
def small_planted():
    """Small planted dataset for fast end-to-end runs."""
    return generate(SyntheticSpec(
        n_bands=12, n_classes=3, samples=300, informative=(2, 7),
        class_signature_gap=1.0, noise_std=0.2, correlation_width=1, seed=3,
    ))


@pytest.fixture
def tiny_dataset():
    spectra = np.array([[0.1, 0.2, 0.3], [0.4, 0.5, 0.6], [0.7, 0.8, 0.9], [1.0, 1.1, 1.2]])
    return Dataset(spectra, np.array([0, 1, 0, 1]), 2)
