"""
First-order optimizers over named numpy parameter arrays.
"""

from typing import Dict, Tuple

import numpy as np

from ..config.constants import ADAM_BETAS, ADAM_EPS, DEFAULT_LEARNING_RATE
from ..core.base_classes import BaseOptimizer
from ..core.exceptions import ConfigurationError


class SGD(BaseOptimizer):
    """Plain gradient descent: p <- p - lr * g."""

    def __init__(self, learning_rate: float = DEFAULT_LEARNING_RATE):
        if not learning_rate > 0:
            raise ConfigurationError(f"learning rate must be > 0, got {learning_rate}")
        super().__init__("SGD", learning_rate)

    def step(self, params: Dict[str, np.ndarray], grads: Dict[str, np.ndarray]) -> None:
        self.steps += 1
        for key, g in grads.items():
            params[key] -= self.learning_rate * g

    def reset(self) -> None:
        self.steps = 0


class Adam(BaseOptimizer):
    """
    Adam with bias-corrected first and second moment estimates.

    Moments are kept per parameter name and updated in place.
    """

    def __init__(
        self,
        learning_rate: float = DEFAULT_LEARNING_RATE,
        betas: Tuple[float, float] = ADAM_BETAS,
        eps: float = ADAM_EPS,
    ):
        if not learning_rate > 0:
            raise ConfigurationError(f"learning rate must be > 0, got {learning_rate}")
        if not 0.0 <= betas[0] < 1.0:
            raise ConfigurationError(f"Invalid beta parameter at index 0: {betas[0]}")
        if not 0.0 <= betas[1] < 1.0:
            raise ConfigurationError(f"Invalid beta parameter at index 1: {betas[1]}")
        if not eps > 0:
            raise ConfigurationError(f"Invalid epsilon value: {eps}")
        super().__init__("Adam", learning_rate)
        self.beta1, self.beta2 = float(betas[0]), float(betas[1])
        self.eps = float(eps)
        self.m: Dict[str, np.ndarray] = {}
        self.v: Dict[str, np.ndarray] = {}

    def step(self, params: Dict[str, np.ndarray], grads: Dict[str, np.ndarray]) -> None:
        self.steps += 1
        bc1 = 1.0 - self.beta1 ** self.steps
        bc2 = 1.0 - self.beta2 ** self.steps
        step_size = self.learning_rate / bc1

        for key, g in grads.items():
            if key not in self.m:
                self.m[key] = np.zeros_like(params[key])
                self.v[key] = np.zeros_like(params[key])

            self.m[key] *= self.beta1
            self.m[key] += (1.0 - self.beta1) * g
            self.v[key] *= self.beta2
            self.v[key] += (1.0 - self.beta2) * (g * g)

            denom = np.sqrt(self.v[key] / bc2) + self.eps
            params[key] -= step_size * self.m[key] / denom

    def reset(self) -> None:
        self.steps = 0
        self.m.clear()
        self.v.clear()


def build_optimizer(name: str, learning_rate: float) -> BaseOptimizer:
    if name == 'adam':
        return Adam(learning_rate)
    if name == 'sgd':
        return SGD(learning_rate)
    raise ConfigurationError(f"unknown optimizer '{name}'")
