"""Validated value types for weights, points and probe vectors."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError
from .funcs import Interval

WEIGHT_SUM_TOL = 1e-12


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=float).reshape(-1)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class WeightVector:
    """Non-negative weights summing to one (within ``1e-12``)."""

    weights: np.ndarray

    def __post_init__(self):
        w = _frozen(self.weights)
        if w.size == 0:
            raise DomainError("weight vector is empty")
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise DomainError("weights must be finite and non-negative")
        if abs(w.sum() - 1.0) > WEIGHT_SUM_TOL:
            raise DomainError(f"weights sum to {w.sum()!r}, not 1")
        object.__setattr__(self, "weights", w)

    @property
    def strictly_positive(self) -> bool:
        return bool(np.all(self.weights > 0))

    def __len__(self) -> int:
        return self.weights.size

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.weights, dtype=dtype)


@dataclass(frozen=True, eq=False)
class PointVector:
    points: np.ndarray
    domain: Optional[Interval] = None

    def __post_init__(self):
        x = _frozen(self.points)
        if x.size == 0:
            raise DomainError("point vector is empty")
        if self.domain is not None and not np.all(self.domain.contains(x)):
            raise DomainError(f"points outside {self.domain}")
        object.__setattr__(self, "points", x)

    def __len__(self) -> int:
        return self.points.size

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.points, dtype=dtype)


@dataclass(frozen=True, eq=False)
class UnitVector:
    """Probe vector ``x``; despite the name, sub-unit norms are representable."""

    coords: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coords", _frozen(self.coords))

    @property
    def dim(self) -> int:
        return self.coords.size

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.coords))

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.coords, dtype=dtype)
