"""
Custom exceptions for the band selection system.
"""


class BandGateException(Exception):
    """Base exception for all bandgate errors."""
    pass


class ConfigurationError(BandGateException, ValueError):
    """Raised when a configuration or parameter value is out of range."""
    pass


class ShapeMismatchError(BandGateException, ValueError):
    """Raised when an input width does not match a layer, or a forward record is stale."""
    pass


class DatasetError(BandGateException):
    """Raised when a dataset is empty, too small or holds invalid values."""
    pass


class DataFormatError(DatasetError):
    """Raised when a dataset file cannot be parsed."""
    pass


class CheckpointError(BandGateException):
    """Raised when a classifier checkpoint is malformed."""
    pass


class MetricError(BandGateException):
    """Raised when a metric is undefined for its input."""
    pass


class TrainingError(BandGateException):
    """Raised when training diverges."""
    pass


class GradientCheckError(BandGateException):
    """Raised when a finite-difference objective is not finite."""
    pass


class ReportError(BandGateException):
    """Raised when a sweep report cannot be built."""
    pass
