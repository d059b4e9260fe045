"""
Score-versus-band-count curves and their summaries.
"""

from dataclasses import dataclass
from typing import Iterable, Mapping, Tuple

import numpy as np
from scipy import integrate

from ..core.exceptions import MetricError
from ..selection.band_selection import BandSelection


@dataclass(frozen=True)
class BandsCurve:
    """(k, score) points sorted by strictly increasing k."""

    ks: Tuple[int, ...]
    scores: Tuple[float, ...]

    def __post_init__(self):
        if len(self.ks) != len(self.scores):
            raise MetricError(f"{len(self.ks)} band counts but {len(self.scores)} scores")
        if any(b <= a for a, b in zip(self.ks, self.ks[1:])):
            raise MetricError(f"band counts must be strictly increasing, got {list(self.ks)}")

    @classmethod
    def from_points(cls, points: Iterable[Tuple[int, float]]) -> "BandsCurve":
        ordered = sorted((int(k), float(s)) for k, s in points)
        ks = [k for k, _ in ordered]
        if len(set(ks)) != len(ks):
            raise MetricError(f"duplicate band counts in curve: {ks}")
        return cls(tuple(ks), tuple(s for _, s in ordered))

    def __len__(self) -> int:
        return len(self.ks)


def bands_auc(curve: BandsCurve) -> float:
    """Trapezoidal area under the curve divided by the k range."""
    if len(curve) < 2:
        raise MetricError(f"bands AUC needs at least 2 points, got {len(curve)}")
    ks = np.asarray(curve.ks, dtype=np.float64)
    area = integrate.trapezoid(np.asarray(curve.scores, dtype=np.float64), ks)
    return float(area / (ks[-1] - ks[0]))


def selection_stability(selections: Mapping[int, BandSelection]) -> float:
    """
    Mean fraction of each selection retained at the next larger band count.

    Args:
        selections: BandSelection per k

    Returns:
        Value in [0, 1]; 1 when every selection is contained in the next one
    """
    if len(selections) < 2:
        raise MetricError("selection stability needs selections for at least 2 band counts")
    ordered = [set(selections[k]) for k in sorted(selections)]
    overlaps = [len(a & b) / min(len(a), len(b)) for a, b in zip(ordered, ordered[1:])]
    return float(np.mean(overlaps))
