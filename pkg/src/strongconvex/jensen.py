"""Jensen functional and its two strong-convexity refinements.

All functions accept a single instance (1-D ``x`` and ``p``) or a batch with
the points along the last axis; results are floats or arrays accordingly.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import DomainError, PreconditionError
from .funcs import StronglyConvexFunction
from .report import Tally, VerificationReport
from .sampling import make_rng, weight_batch
from .tolerance import ToleranceConfig
from .vectors import WEIGHT_SUM_TOL, PointVector, WeightVector

__all__ = ["PointVector", "WeightVector", "jensen_functional", "lemma21_lower_bound",
           "theorem22_bounds", "weighted_variance", "Theorem22Bounds"]


def _out(v):
    return float(v) if np.ndim(v) == 0 else v


def _weights(p, name: str = "p") -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if np.any(p < 0) or not np.all(np.isfinite(p)):
        raise DomainError(f"{name} must be finite and non-negative")
    if np.any(np.abs(p.sum(axis=-1) - 1.0) > WEIGHT_SUM_TOL * max(1, p.shape[-1])):
        raise DomainError(f"{name} must sum to 1")
    return p


def _prepare(f: StronglyConvexFunction, x, p):
    x = np.asarray(x, dtype=float)
    p = _weights(p)
    if x.shape[-1] != p.shape[-1]:
        raise PreconditionError(f"length mismatch: {x.shape[-1]} points, {p.shape[-1]} weights")
    f.require_in_domain(x)
    return x, p


def _mean(x, p):
    return np.sum(p * x, axis=-1)


def weighted_variance(x, p):
    """``sum p_i (x_i - xbar)^2`` with ``xbar = sum p_i x_i``."""
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    xbar = _mean(x, p)
    return _out(np.sum(p * (x - xbar[..., None]) ** 2, axis=-1))


def _jensen_terms(f, x, p):
    """``(f(sum p_i x_i), sum p_i f(x_i))`` before cancellation."""
    return f(_mean(x, p)), np.sum(p * f(x), axis=-1)


def _jensen(f, x, p):
    at_mean, mean_of = _jensen_terms(f, x, p)
    return mean_of - at_mean


def jensen_functional(f: StronglyConvexFunction, x, p):
    """``J_n(f, x, p) = sum p_i f(x_i) - f(sum p_i x_i)``."""
    x, p = _prepare(f, x, p)
    return _out(_jensen(f, x, p))


def lemma21_lower_bound(f: StronglyConvexFunction, x, p):
    """``(c * weighted variance, J_n(f, x, p))``; the first never exceeds the second.

    All weights must be strictly positive.
    """
    x, p = _prepare(f, x, p)
    if np.any(p <= 0):
        raise PreconditionError("all weights must be strictly positive")
    lhs = f.modulus * np.asarray(weighted_variance(x, p))
    rhs = _jensen(f, x, p)
    return _out(lhs), _out(rhs)


class Theorem22Bounds(NamedTuple):
    lower: float
    mid: float
    upper: float
    m: float
    M: float


def theorem22_bounds(f: StronglyConvexFunction, x, p, q) -> Theorem22Bounds:
    """Two-sided bound on ``J_n(f, x, p)`` through ``J_n(f, x, q)``.

    With ``m = min p_i/q_i`` and ``M = max p_i/q_i``::

        lower = m J(q) + c (sum (p_i - m q_i)(x_i - xbar_p)^2 + m (sum (p_i - q_i) x_i)^2)
        upper = M J(q) - c (sum (M q_i - p_i)(x_i - xbar_q)^2 + (sum (p_i - q_i) x_i)^2)

    Both expressions are evaluated exactly in this form.
    """
    x, p = _prepare(f, x, p)
    q = _weights(q, "q")
    if q.shape[-1] != x.shape[-1]:
        raise PreconditionError("length mismatch between q and x")
    if np.any(q <= 0):
        raise PreconditionError("all q_i must be strictly positive")
    ratio = p / q
    m = ratio.min(axis=-1)
    M = ratio.max(axis=-1)
    c = f.modulus
    jq = _jensen(f, x, q)
    jp = _jensen(f, x, p)
    xp = _mean(x, p)[..., None]
    xq = _mean(x, q)[..., None]
    shift = np.sum((p - q) * x, axis=-1) ** 2
    lower = m * jq + c * (np.sum((p - m[..., None] * q) * (x - xp) ** 2, axis=-1) + m * shift)
    upper = M * jq - c * (np.sum((M[..., None] * q - p) * (x - xq) ** 2, axis=-1) + shift)
    return Theorem22Bounds(_out(lower), _out(jp), _out(upper), _out(m), _out(M))


# -- randomized checks --------------------------------------------------------

def _draw_groups(f, trials, rng, n_range):
    """Yield ``(n, x)`` batches; ``n`` uniform on ``n_range``, points in ``f``'s box."""
    lo, hi = f.sample_box()
    ns = rng.integers(n_range[0], n_range[1] + 1, size=trials)
    for n in range(n_range[0], n_range[1] + 1):
        count = int(np.sum(ns == n))
        if count:
            yield n, rng.uniform(lo, hi, size=(count, n))


def check_jensen_functional(f: StronglyConvexFunction, trials: int, rng_seed: int = 0,
                            tol: ToleranceConfig | None = None, n_range=(2, 8)) -> VerificationReport:
    """Non-negativity of the Jensen functional; constant-point probes give exact zeros.

    Compared as ``f(sum p x) <= sum p f(x)`` so the tolerance scales with the terms.
    """
    rng = make_rng(rng_seed, "jensen_functional", f.id)
    tally = Tally("jensen_functional", f.id, rng_seed, tol,
                  {"n_range": list(n_range), "box": list(f.sample_box())})
    for n, x in _draw_groups(f, trials, rng, n_range):
        x[: max(1, len(x) // 100)] = x[: max(1, len(x) // 100), :1]
        p = weight_batch(n, len(x), rng)
        x, p = _prepare(f, x, p)
        tally.add([_jensen_terms(f, x, p)], {"x": x, "p": p})
    return tally.report()


def check_lemma21(f: StronglyConvexFunction, trials: int, rng_seed: int = 0,
                  tol: ToleranceConfig | None = None, n_range=(2, 8)) -> VerificationReport:
    """``c var <= J``, compared as ``f(sum p x) + c var <= sum p f(x)``."""
    rng = make_rng(rng_seed, "lemma21", f.id)
    tally = Tally("lemma21", f.id, rng_seed, tol,
                  {"n_range": list(n_range), "box": list(f.sample_box())})
    for n, x in _draw_groups(f, trials, rng, n_range):
        x[: max(1, len(x) // 100)] = x[: max(1, len(x) // 100), :1]
        p = weight_batch(n, len(x), rng, strictly_positive=True)
        x, p = _prepare(f, x, p)
        at_mean, mean_of = _jensen_terms(f, x, p)
        tally.add([(at_mean + f.modulus * weighted_variance(x, p), mean_of)], {"x": x, "p": p})
    return tally.report()


def check_theorem22(f: StronglyConvexFunction, trials: int, rng_seed: int = 0,
                    tol: ToleranceConfig | None = None, n_range=(2, 8)) -> VerificationReport:
    """``lower <= J(p) <= upper``, plus the classical ``m J(q) <= lower`` and
    ``upper <= M J(q)`` on draws where both correction terms are non-negative."""
    rng = make_rng(rng_seed, "theorem22", f.id)
    tally = Tally("theorem22", f.id, rng_seed, tol,
                  {"n_range": list(n_range), "box": list(f.sample_box())})
    skipped = 0
    for n, x in _draw_groups(f, trials, rng, n_range):
        p = weight_batch(n, len(x), rng)
        q = weight_batch(n, len(x), rng, strictly_positive=True)
        p[: max(1, len(x) // 100)] = q[: max(1, len(x) // 100)]
        b = theorem22_bounds(f, x, p, q)
        jq = jensen_functional(f, x, q)
        low_corr = np.asarray(b.lower - b.m * jq)
        up_corr = np.asarray(b.M * jq - b.upper)
        classical = (low_corr >= 0) & (up_corr >= 0)
        skipped += int(np.sum(~classical))
        zero = np.zeros(len(x))
        tally.add([
            (b.lower, b.mid),
            (b.mid, b.upper),
            (np.where(classical, b.m * jq, zero), np.where(classical, b.lower, zero)),
            (np.where(classical, b.upper, zero), np.where(classical, b.M * jq, zero)),
        ], {"x": x, "p": p, "q": q})
    tally.extras["negative_correction_draws"] = skipped
    return tally.report()
