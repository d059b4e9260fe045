"""
Band selection layers.
"""
from .band_selection import BandSelection
from .baselines import FixedSelector, all_bands, random_k, variance_k
from .concrete import (
    ConcreteForwardRecord,
    ConcreteLayer,
    SelectionReport,
    init_plain_xavier,
    init_seeded_logits,
    init_segmented_xavier,
    segment_bounds,
)
from .gates import GateForwardRecord, GateLayer, lambda_for_k
