"""
Base classes for bandgate components.
"""

import abc
from typing import Any, Dict, Optional, Tuple

import numpy as np

from .exceptions import ShapeMismatchError
from .logging_config import get_logger
from .rng import Rng


class BaseComponent(abc.ABC):
    """Base class for all bandgate components."""

    def __init__(self, name: str, config: Optional[Dict[str, Any]] = None):
        self.name = name
        self.config = config or {}
        self.logger = get_logger(f"{self.__class__.__module__}.{self.__class__.__name__}")

    def parameters(self) -> Dict[str, np.ndarray]:
        """Trainable arrays keyed by name; updated in place by optimizers."""
        return {}

    @property
    def parameter_count(self) -> int:
        """Total number of trainable scalars."""
        return int(sum(p.size for p in self.parameters().values()))


class BaseSelector(BaseComponent):
    """
    Base class for band selection layers placed in front of the classifier.

    A selector maps spectra of ``n_bands`` values to ``output_width`` values.
    Training passes return a record that ``backward`` consumes; inference
    passes are deterministic.
    """

    def __init__(self, name: str, n_bands: int, config: Optional[Dict[str, Any]] = None):
        super().__init__(name, config)
        self.n_bands = int(n_bands)

    @property
    @abc.abstractmethod
    def output_width(self) -> int:
        """Width of the selector output fed to the classifier."""
        pass

    @abc.abstractmethod
    def forward_train(self, x: np.ndarray, rng: Rng) -> Tuple[np.ndarray, Any]:
        """
        Stochastic forward pass used during training.

        Args:
            x: Spectrum (n_bands,) or batch (batch, n_bands)
            rng: Noise stream

        Returns:
            Tuple of (selector output, record for backward)
        """
        pass

    @abc.abstractmethod
    def forward_infer(self, x: np.ndarray) -> np.ndarray:
        """Deterministic forward pass used for evaluation."""
        pass

    @abc.abstractmethod
    def backward(self, record: Any, x: np.ndarray, grad_out: np.ndarray) -> Dict[str, np.ndarray]:
        """Gradients of the objective w.r.t. ``parameters()``, keyed identically."""
        pass

    @abc.abstractmethod
    def current_selection(self):
        """BandSelection the selector would commit to right now."""
        pass

    def regularizer(self) -> float:
        """Penalty added to the batch loss."""
        return 0.0

    def on_batch_end(self) -> None:
        """Hook run once after every optimizer step."""
        pass

    def _check_width(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.ndim not in (1, 2) or x.shape[-1] != self.n_bands:
            raise ShapeMismatchError(
                f"{self.name} expects spectra of {self.n_bands} bands, got shape {x.shape}"
            )
        return x


class BaseOptimizer(BaseComponent):
    """Base class for first-order optimizers over named parameter arrays."""

    def __init__(self, name: str, learning_rate: float, config: Optional[Dict[str, Any]] = None):
        super().__init__(name, config)
        self.learning_rate = float(learning_rate)
        self.steps = 0

    @abc.abstractmethod
    def step(self, params: Dict[str, np.ndarray], grads: Dict[str, np.ndarray]) -> None:
        """Update ``params`` in place from ``grads`` (same keys)."""
        pass

    @abc.abstractmethod
    def reset(self) -> None:
        """Drop accumulated optimizer state."""
        pass
