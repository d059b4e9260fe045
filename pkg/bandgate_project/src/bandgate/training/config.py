"""
Training configuration, presets and key=value configuration files.
"""

from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Tuple, Union

from dotenv import dotenv_values

from ..config.constants import (
    CONCRETE_INITS,
    DEFAULT_BATCH_SIZE,
    DEFAULT_EPOCHS,
    DEFAULT_HIDDEN,
    DEFAULT_LEARNING_RATE,
    DRIVING_CONCRETE,
    EHBS_LAMBDA0,
    EHBS_MU0,
    EHBS_PHASE2_FRACTION,
    EHBS_SIGMA,
    METHODS,
    OPTIMIZERS,
    REMOTE_SENSING_CONCRETE,
)
from ..core.exceptions import ConfigurationError

# Accepted spellings that map onto field names
ALIASES = {
    'tau': 'tau0',
    'lambda': 'lambda0',
    'lr': 'learning_rate',
    'batch': 'batch_size',
}


def _parse_int_tuple(value: Any) -> Tuple[int, ...]:
    if isinstance(value, str):
        parts = [p for p in value.replace(';', ',').split(',') if p.strip()]
        return tuple(int(p) for p in parts)
    return tuple(int(v) for v in value)


def _parse_bool(value: Any) -> bool:
    if isinstance(value, str):
        lowered = value.strip().lower()
        if lowered in ('1', 'true', 'yes', 'on'):
            return True
        if lowered in ('0', 'false', 'no', 'off'):
            return False
        raise ValueError(f"not a boolean: {value!r}")
    return bool(value)


def _parse_optional_int(value: Any) -> Optional[int]:
    if value is None or (isinstance(value, str) and value.strip().lower() in ('', 'none')):
        return None
    return int(value)


def _parse_optional_tuple(value: Any) -> Optional[Tuple[int, ...]]:
    if value is None or (isinstance(value, str) and value.strip().lower() in ('', 'none')):
        return None
    return _parse_int_tuple(value)


@dataclass(frozen=True)
class TrainConfig:
    """All knobs of one training run."""

    method: str = 'chbs'
    k: int = 4
    epochs: int = DEFAULT_EPOCHS
    batch_size: int = DEFAULT_BATCH_SIZE
    learning_rate: float = DEFAULT_LEARNING_RATE
    optimizer: str = 'adam'
    # concrete selector
    tau0: float = REMOTE_SENSING_CONCRETE['tau0']
    alpha: float = REMOTE_SENSING_CONCRETE['alpha']
    beta: float = REMOTE_SENSING_CONCRETE['beta']
    init: str = 'segmented'
    prior_bands: Optional[Tuple[int, ...]] = None
    # stochastic gates
    sigma: float = EHBS_SIGMA
    mu0: float = EHBS_MU0
    lambda0: float = EHBS_LAMBDA0
    phase2_epochs: Optional[int] = None
    # classifier and data handling
    hidden: Tuple[int, ...] = field(default=DEFAULT_HIDDEN)
    weighted_loss: bool = False
    standardize: bool = True
    validation_fraction: float = 0.1
    seed: int = 0

    def validate(self, n_bands: int, n_classes: int) -> "TrainConfig":
        """Check the configuration against a dataset shape; returns self."""
        if self.method not in METHODS:
            raise ConfigurationError(f"unknown method '{self.method}', expected one of {METHODS}")
        if self.optimizer not in OPTIMIZERS:
            raise ConfigurationError(f"unknown optimizer '{self.optimizer}', expected one of {OPTIMIZERS}")
        if self.method != 'all-bands' and not 1 <= self.k <= n_bands:
            raise ConfigurationError(f"k must lie in [1, {n_bands}], got {self.k}")
        if self.epochs < 1:
            raise ConfigurationError(f"epochs must be >= 1, got {self.epochs}")
        if self.batch_size < 1:
            raise ConfigurationError(f"batch_size must be >= 1, got {self.batch_size}")
        if not self.learning_rate > 0:
            raise ConfigurationError(f"learning_rate must be > 0, got {self.learning_rate}")
        if not self.tau0 > 0:
            raise ConfigurationError(f"tau0 must be > 0, got {self.tau0}")
        if not 0.0 < self.alpha < 1.0:
            raise ConfigurationError(f"alpha must lie in (0, 1), got {self.alpha}")
        if not 0.0 < self.beta < 1.0:
            raise ConfigurationError(f"beta must lie in (0, 1), got {self.beta}")
        if self.init not in CONCRETE_INITS:
            raise ConfigurationError(f"unknown init '{self.init}', expected one of {CONCRETE_INITS}")
        if self.method == 'chbs' and self.init == 'seeded':
            if not self.prior_bands:
                raise ConfigurationError("init=seeded needs prior_bands")
            bad = [b for b in self.prior_bands if not 0 <= b < n_bands]
            if bad:
                raise ConfigurationError(f"prior bands {bad} outside [0, {n_bands})")
        if not self.sigma > 0:
            raise ConfigurationError(f"sigma must be > 0, got {self.sigma}")
        if not self.lambda0 > 0:
            raise ConfigurationError(f"lambda0 must be > 0, got {self.lambda0}")
        if self.phase2_epochs is not None and not 0 <= self.phase2_epochs < self.epochs:
            raise ConfigurationError(
                f"phase2_epochs must lie in [0, {self.epochs - 1}], got {self.phase2_epochs}"
            )
        if any(h < 1 for h in self.hidden):
            raise ConfigurationError(f"hidden widths must be positive, got {list(self.hidden)}")
        if not 0.0 <= self.validation_fraction < 1.0:
            raise ConfigurationError(f"validation_fraction must lie in [0, 1), got {self.validation_fraction}")
        if n_classes < 1:
            raise ConfigurationError(f"class count must be >= 1, got {n_classes}")
        return self

    def phase_split(self) -> Tuple[int, int]:
        """(phase-1 epochs, phase-2 epochs) of a two-phase gate run."""
        if self.phase2_epochs is not None:
            phase2 = self.phase2_epochs
        elif self.epochs > 1:
            phase2 = max(1, int(round(EHBS_PHASE2_FRACTION * self.epochs)))
        else:
            phase2 = 0
        return self.epochs - phase2, phase2

    def with_overrides(self, **overrides) -> "TrainConfig":
        return from_mapping(overrides, base=self)

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data['hidden'] = list(self.hidden)
        if self.prior_bands is not None:
            data['prior_bands'] = list(self.prior_bands)
        return data


_CONVERTERS = {
    'method': str,
    'k': int,
    'epochs': int,
    'batch_size': int,
    'learning_rate': float,
    'optimizer': str,
    'tau0': float,
    'alpha': float,
    'beta': float,
    'init': str,
    'prior_bands': _parse_optional_tuple,
    'sigma': float,
    'mu0': float,
    'lambda0': float,
    'phase2_epochs': _parse_optional_int,
    'hidden': _parse_int_tuple,
    'weighted_loss': _parse_bool,
    'standardize': _parse_bool,
    'validation_fraction': float,
    'seed': int,
}

PRESETS: Dict[str, Dict[str, Any]] = {
    'paper-defaults': {
        'sigma': EHBS_SIGMA, 'mu0': EHBS_MU0, 'batch_size': 256, **REMOTE_SENSING_CONCRETE,
    },
    'paper-driving': {
        'sigma': EHBS_SIGMA, 'mu0': EHBS_MU0, 'batch_size': 16, **DRIVING_CONCRETE,
    },
}
PRESETS['paper-remote-sensing'] = PRESETS['paper-defaults']


def normalize_key(key: str) -> str:
    name = key.strip().lower().replace('-', '_')
    return ALIASES.get(name, name)


def from_mapping(mapping: Mapping[str, Any], base: Optional[TrainConfig] = None) -> TrainConfig:
    """
    Build a config from string or typed values layered over ``base``.

    Args:
        mapping: Field names (or aliases) to values; None values are skipped
        base: Starting configuration, defaults when omitted

    Returns:
        New TrainConfig
    """
    known = {f.name for f in fields(TrainConfig)}
    updates = {}
    for raw_key, value in mapping.items():
        if value is None:
            continue
        key = normalize_key(raw_key)
        if key not in known:
            raise ConfigurationError(f"unknown configuration key '{raw_key}'")
        try:
            updates[key] = _CONVERTERS[key](value)
        except (TypeError, ValueError) as e:
            raise ConfigurationError(f"invalid value {value!r} for '{raw_key}': {e}")
    return replace(base or TrainConfig(), **updates)


def preset(name: str) -> TrainConfig:
    if name not in PRESETS:
        raise ConfigurationError(f"unknown preset '{name}', expected one of {sorted(PRESETS)}")
    return from_mapping(PRESETS[name])


def load_config_file(path: Union[str, Path]) -> Dict[str, str]:
    """Read a key=value file (``#`` comments allowed) into normalized keys."""
    path = Path(path)
    if not path.is_file():
        raise ConfigurationError(f"config file {path} does not exist")
    values = dotenv_values(path)
    entries = {}
    for key, value in values.items():
        if value is None:
            raise ConfigurationError(f"config file {path}: key '{key}' has no value")
        entries[normalize_key(key)] = value
    return entries
