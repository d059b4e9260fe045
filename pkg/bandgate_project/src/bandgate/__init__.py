"""
bandgate

Embedded hyperspectral band selection: stochastic-gate and concrete selectors
trained jointly with a small classifier, with evaluation and verification tools.
"""

__version__ = "1.0.0"
__author__ = "bandgate developers"

# Import core components for easy access
from .core.exceptions import BandGateException, ConfigurationError, DatasetError, ShapeMismatchError
from .core.logging_config import get_logger

# Package level logger
logger = get_logger(__name__)
