"""
Dense rectifier classifier with explicit reverse-mode gradients.
"""

import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..config.constants import CHECKPOINT_MAGIC, DEFAULT_HIDDEN
from ..core.base_classes import BaseComponent
from ..core.exceptions import CheckpointError, ConfigurationError, ShapeMismatchError
from ..core.logging_config import get_logger
from ..core.rng import Rng

logger = get_logger(__name__)


@dataclass
class ForwardCache:
    """Layer inputs and pre-activations of one forward pass."""

    inputs: List[np.ndarray]
    pre_activations: List[np.ndarray]
    widths: Tuple[int, ...]
    single: bool


class Classifier(BaseComponent):
    """
    Affine-rectifier stack d -> hidden... -> c with linear logits.

    Weights are stored as (out, in) matrices, biases as vectors.
    """

    def __init__(
        self,
        input_width: int,
        n_classes: int,
        hidden: Sequence[int] = DEFAULT_HIDDEN,
        rng: Optional[Rng] = None,
    ):
        super().__init__("Classifier")
        widths = (int(input_width), *(int(h) for h in hidden), int(n_classes))
        if any(w < 1 for w in widths):
            raise ConfigurationError(f"layer widths must be positive, got {widths}")
        rng = rng or Rng(0)
        self.weights: List[np.ndarray] = []
        self.biases: List[np.ndarray] = []
        for fan_in, fan_out in zip(widths[:-1], widths[1:]):
            bound = np.sqrt(6.0 / (fan_in + fan_out))
            self.weights.append(np.asarray(rng.uniform(-bound, bound, (fan_out, fan_in))))
            self.biases.append(np.zeros(fan_out))

    @classmethod
    def from_arrays(cls, weights: Sequence[np.ndarray], biases: Sequence[np.ndarray]) -> "Classifier":
        """Build a classifier around given parameter arrays (copied)."""
        if not weights or len(weights) != len(biases):
            raise ConfigurationError("need one bias vector per weight matrix")
        net = cls.__new__(cls)
        BaseComponent.__init__(net, "Classifier")
        net.weights = [np.array(w, dtype=np.float64) for w in weights]
        net.biases = [np.array(b, dtype=np.float64) for b in biases]
        for idx, (w, b) in enumerate(zip(net.weights, net.biases)):
            if w.ndim != 2 or b.shape != (w.shape[0],):
                raise ShapeMismatchError(f"layer {idx}: weight {w.shape} and bias {b.shape} disagree")
            if idx > 0 and w.shape[1] != net.weights[idx - 1].shape[0]:
                raise ShapeMismatchError(f"layer {idx} input width does not match layer {idx - 1}")
        return net

    @property
    def widths(self) -> Tuple[int, ...]:
        return (self.weights[0].shape[1], *(w.shape[0] for w in self.weights))

    @property
    def input_width(self) -> int:
        return self.widths[0]

    @property
    def n_classes(self) -> int:
        return self.widths[-1]

    def parameters(self) -> Dict[str, np.ndarray]:
        params = {}
        for idx, (w, b) in enumerate(zip(self.weights, self.biases)):
            params[f'W{idx}'] = w
            params[f'b{idx}'] = b
        return params

    def forward(self, x: np.ndarray) -> Tuple[np.ndarray, ForwardCache]:
        """Logits for a vector (d,) or a batch (batch, d)."""
        x = np.asarray(x, dtype=np.float64)
        single = x.ndim == 1
        if single:
            x = x[None, :]
        if x.ndim != 2 or x.shape[1] != self.input_width:
            raise ShapeMismatchError(f"classifier expects width {self.input_width}, got shape {x.shape}")
        inputs, pre = [], []
        a = x
        last = len(self.weights) - 1
        for idx, (w, b) in enumerate(zip(self.weights, self.biases)):
            inputs.append(a)
            z = a @ w.T + b
            pre.append(z)
            a = np.maximum(z, 0.0) if idx < last else z
        logits = a[0] if single else a
        return logits, ForwardCache(inputs=inputs, pre_activations=pre, widths=self.widths, single=single)

    def backward(self, cache: ForwardCache, grad_logits: np.ndarray) -> Tuple[Dict[str, np.ndarray], np.ndarray]:
        """
        Reverse pass.

        Returns:
            Tuple of (gradients keyed like ``parameters()``, gradient w.r.t. the input)
        """
        if cache.widths != self.widths:
            raise ShapeMismatchError("stale cache: classifier layout changed since forward pass")
        g = np.asarray(grad_logits, dtype=np.float64)
        if cache.single:
            g = g[None, :]
        if g.shape != cache.pre_activations[-1].shape:
            raise ShapeMismatchError(
                f"grad shape {g.shape} does not match logits {cache.pre_activations[-1].shape}"
            )
        grads: Dict[str, np.ndarray] = {}
        grad_input = g
        for idx in range(len(self.weights) - 1, -1, -1):
            grads[f'W{idx}'] = g.T @ cache.inputs[idx]
            grads[f'b{idx}'] = g.sum(axis=0)
            grad_input = g @ self.weights[idx]
            if idx > 0:
                g = grad_input * (cache.pre_activations[idx - 1] > 0.0)
        if cache.single:
            grad_input = grad_input[0]
        return grads, grad_input

    def predict(self, x: np.ndarray) -> np.ndarray:
        logits, _ = self.forward(x)
        return np.argmax(logits, axis=-1)

    def save(self, path: Union[str, Path]) -> None:
        """Write the BGNET1 checkpoint: magic, little-endian uint32 dims, float64 blocks."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        widths = self.widths
        with path.open('wb') as handle:
            handle.write(CHECKPOINT_MAGIC)
            handle.write(struct.pack(f'<I{len(widths)}I', len(widths), *widths))
            for w, b in zip(self.weights, self.biases):
                handle.write(w.astype('<f8').tobytes(order='C'))
                handle.write(b.astype('<f8').tobytes(order='C'))
        logger.info("checkpoint_written", path=str(path), widths=list(widths))

    @classmethod
    def load(cls, path: Union[str, Path]) -> "Classifier":
        path = Path(path)
        try:
            blob = path.read_bytes()
        except OSError as e:
            raise CheckpointError(f"cannot read checkpoint {path}: {e}")
        magic_len = len(CHECKPOINT_MAGIC)
        if blob[:magic_len] != CHECKPOINT_MAGIC:
            raise CheckpointError(f"{path} is not a BGNET1 checkpoint")
        offset = magic_len
        try:
            (count,) = struct.unpack_from('<I', blob, offset)
            offset += 4
            widths = struct.unpack_from(f'<{count}I', blob, offset)
            offset += 4 * count
        except struct.error as e:
            raise CheckpointError(f"truncated checkpoint header in {path}: {e}")
        if count < 2:
            raise CheckpointError(f"checkpoint {path} declares {count} layer widths")
        weights, biases = [], []
        for fan_in, fan_out in zip(widths[:-1], widths[1:]):
            n_w, n_b = fan_in * fan_out, fan_out
            end = offset + 8 * (n_w + n_b)
            if end > len(blob):
                raise CheckpointError(f"truncated parameter block in {path}")
            block = np.frombuffer(blob, dtype='<f8', count=n_w + n_b, offset=offset)
            weights.append(block[:n_w].reshape(fan_out, fan_in))
            biases.append(block[n_w:])
            offset = end
        if offset != len(blob):
            raise CheckpointError(f"{len(blob) - offset} trailing bytes in {path}")
        return cls.from_arrays(weights, biases)
