"""
Selected-band value type.
"""

from dataclasses import dataclass
from typing import Iterable, Iterator, Tuple

from ..core.exceptions import ConfigurationError


@dataclass(frozen=True)
class BandSelection:
    """Distinct band indices in ascending spectral order."""

    indices: Tuple[int, ...]

    def __post_init__(self):
        values = tuple(int(i) for i in self.indices)
        if any(i < 0 for i in values):
            raise ConfigurationError(f"band indices must be non-negative, got {values}")
        if len(set(values)) != len(values):
            raise ConfigurationError(f"band indices must be distinct, got {values}")
        if list(values) != sorted(values):
            raise ConfigurationError(f"band indices must be ascending, got {values}")
        object.__setattr__(self, 'indices', values)

    @classmethod
    def from_indices(cls, indices: Iterable[int]) -> "BandSelection":
        """Deduplicate and sort arbitrary indices."""
        return cls(tuple(sorted({int(i) for i in indices})))

    @property
    def k(self) -> int:
        return len(self.indices)

    def as_list(self):
        return list(self.indices)

    def joined(self, sep: str = ';') -> str:
        return sep.join(str(i) for i in self.indices)

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self) -> Iterator[int]:
        return iter(self.indices)

    def __contains__(self, band: object) -> bool:
        return band in self.indices
