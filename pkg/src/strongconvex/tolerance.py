"""Floating-point acceptance policy for claimed inequalities ``L <= R``."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError


@dataclass(frozen=True)
class ToleranceConfig:
    """``L <= R`` passes iff ``L <= R + tol_abs + tol_rel * max(|L|, |R|)``.

    ``equality_eps`` decides when a link counts as attained with equality:
    ``|R - L| <= equality_eps * max(1, |L|, |R|)``.
    """

    tol_abs: float = 1e-9
    tol_rel: float = 1e-9
    equality_eps: float = 1e-12

    def __post_init__(self):
        for name in ("tol_abs", "tol_rel", "equality_eps"):
            val = getattr(self, name)
            if not (val >= 0 and np.isfinite(val)):
                raise ConfigurationError(f"{name} must be finite and >= 0, got {val}")

    def allowance(self, lhs, rhs):
        return self.tol_abs + self.tol_rel * np.maximum(np.abs(lhs), np.abs(rhs))

    def holds(self, lhs, rhs):
        """Elementwise verdict for ``lhs <= rhs``."""
        lhs = np.asarray(lhs, dtype=float)
        rhs = np.asarray(rhs, dtype=float)
        return (rhs - lhs) >= -self.allowance(lhs, rhs)

    def equal(self, lhs, rhs):
        lhs = np.asarray(lhs, dtype=float)
        rhs = np.asarray(rhs, dtype=float)
        scale = np.maximum(1.0, np.maximum(np.abs(lhs), np.abs(rhs)))
        return np.abs(rhs - lhs) <= self.equality_eps * scale


DEFAULT_TOLERANCE = ToleranceConfig()


def close(a, b, eps: float) -> np.ndarray:
    """Scale-aware equality: ``|a - b| <= eps * max(1, |a|, |b|)``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return np.abs(a - b) <= eps * np.maximum(1.0, np.maximum(np.abs(a), np.abs(b)))
