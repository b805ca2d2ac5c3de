"""Jensen-Mercer bounds for strongly convex functions and the derived means.

Points are never reordered; ``x_min`` and ``x_max`` are computed.  Every
point is written as ``x_i = lam_i x_min + (1 - lam_i) x_max``.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import DomainError, PreconditionError
from .funcs import Interval, StronglyConvexFunction
from .jensen import _prepare, _weights, weighted_variance
from .report import Tally, VerificationReport
from .sampling import make_rng, weight_batch
from .tolerance import ToleranceConfig

UNIT_INTERVAL = Interval(0.0, 1.0, lo_open=True)


def _out(v):
    return float(v) if np.ndim(v) == 0 else v


def lambdas_of(x):
    """Barycentric coordinates ``lam_i = (x_max - x_i) / (x_max - x_min)``.

    All zeros when every point is equal; the terms they multiply vanish then.
    """
    x = np.asarray(x, dtype=float)
    lo = x.min(axis=-1, keepdims=True)
    hi = x.max(axis=-1, keepdims=True)
    span = hi - lo
    safe = np.where(span > 0, span, 1.0)
    return np.where(span > 0, np.clip((hi - x) / safe, 0.0, 1.0), 0.0)


def _spread(x, p):
    """``2 sum p_i lam_i (1 - lam_i) (x_min - x_max)^2``."""
    lam = lambdas_of(x)
    span = x.max(axis=-1) - x.min(axis=-1)
    return 2.0 * np.sum(p * lam * (1.0 - lam), axis=-1) * span ** 2


def lemma26_bound(f: StronglyConvexFunction, x, i: int):
    """``(f(x_min + x_max - x_i), f(x_min) + f(x_max) - f(x_i) - 2 c lam_i (1 - lam_i) (x_min - x_max)^2)``."""
    x = np.asarray(x, dtype=float).reshape(-1)
    if not 0 <= i < x.size:
        raise PreconditionError(f"index {i} out of range for {x.size} points")
    f.require_in_domain(x)
    lo, hi = float(x.min()), float(x.max())
    reflected = lo + hi - x[i]
    f.require_in_domain(reflected, "reflected point")
    lam = float(lambdas_of(x)[i])
    rhs = f(lo) + f(hi) - f(x[i]) - 2.0 * f.modulus * lam * (1.0 - lam) * (lo - hi) ** 2
    return float(f(reflected)), float(rhs)


class MercerBound(NamedTuple):
    lhs: float
    refined_rhs: float
    plain_rhs: float


def theorem27_bound(f: StronglyConvexFunction, x, p) -> MercerBound:
    """Strongly convex Jensen-Mercer bound at the reflected barycenter.

    Returns ``lhs = f(x_min + x_max - xbar)``, the refined bound
    ``f(x_min) + f(x_max) - sum p_i f(x_i) - c M`` with
    ``M = 2 sum p_i lam_i (1 - lam_i)(x_min - x_max)^2 + sum p_i (x_i - xbar)^2``,
    and the plain Mercer bound without the ``c M`` term.
    """
    x, p = _prepare(f, x, p)
    lo = x.min(axis=-1)
    hi = x.max(axis=-1)
    xbar = np.sum(p * x, axis=-1)
    reflected = lo + hi - xbar
    f.require_in_domain(reflected, "reflected barycenter")
    plain = f(lo) + f(hi) - np.sum(p * f(x), axis=-1)
    correction = _spread(x, p) + np.asarray(weighted_variance(x, p))
    return MercerBound(_out(f(reflected)), _out(plain - f.modulus * correction), _out(plain))


class MeansChain(NamedTuple):
    G_tilde: float
    refined: float
    A_tilde: float


def means_chain(x, p) -> MeansChain:
    """``G~ <= exp(M/2) G~ <= A~`` for points in ``(0, 1]``.

    ``A~ = x_min + x_max - sum p_i x_i`` and ``G~ = x_min x_max / prod x_i^p_i``.
    """
    x = np.asarray(x, dtype=float)
    p = _weights(p)
    if x.shape[-1] != p.shape[-1]:
        raise PreconditionError("length mismatch between points and weights")
    if not np.all(UNIT_INTERVAL.contains(x)):
        raise DomainError("means_chain needs every point in (0, 1]")
    lo = x.min(axis=-1)
    hi = x.max(axis=-1)
    a_tilde = lo + hi - np.sum(p * x, axis=-1)
    g_tilde = lo * hi * np.exp(-np.sum(p * np.log(x), axis=-1))
    m = _spread(x, p) + np.asarray(weighted_variance(x, p))
    return MeansChain(_out(g_tilde), _out(np.exp(0.5 * m) * g_tilde), _out(a_tilde))


# -- randomized checks --------------------------------------------------------

def _groups(trials, rng, n_range):
    ns = rng.integers(n_range[0], n_range[1] + 1, size=trials)
    for n in range(n_range[0], n_range[1] + 1):
        count = int(np.sum(ns == n))
        if count:
            yield n, count


def _constant_probe(x):
    k = max(1, len(x) // 100)
    x[:k] = x[:k, :1]
    return x


def check_lambdas(trials: int, rng_seed: int = 0, tol: ToleranceConfig | None = None,
                  n_range=(1, 8)) -> VerificationReport:
    """Reconstruction ``|x_i - (lam_i x_min + (1 - lam_i) x_max)|`` stays within tolerance,
    and the reflected points ``x_min + x_max - x_i`` stay in ``[x_min, x_max]``."""
    rng = make_rng(rng_seed, "lambdas")
    tally = Tally("lambdas", "", rng_seed, tol, {"n_range": list(n_range)})
    for n, count in _groups(trials, rng, n_range):
        x = _constant_probe(rng.uniform(-10.0, 10.0, size=(count, n)))
        lam = lambdas_of(x)
        lo = x.min(axis=1, keepdims=True)
        hi = x.max(axis=1, keepdims=True)
        err = np.abs(x - (lam * lo + (1 - lam) * hi)).max(axis=1)
        refl = lo + hi - x
        tally.add([(err, np.zeros(count)),
                   (lo[:, 0], refl.min(axis=1)), (refl.max(axis=1), hi[:, 0])], {"x": x})
    return tally.report()


def check_lemma26(f: StronglyConvexFunction, trials: int, rng_seed: int = 0,
                  tol: ToleranceConfig | None = None, n_range=(2, 8)) -> VerificationReport:
    rng = make_rng(rng_seed, "lemma26", f.id)
    tally = Tally("lemma26", f.id, rng_seed, tol,
                  {"n_range": list(n_range), "box": list(f.sample_box())})
    lo_box, hi_box = f.sample_box()
    c = f.modulus
    for n, count in _groups(trials, rng, n_range):
        x = _constant_probe(rng.uniform(lo_box, hi_box, size=(count, n)))
        i = rng.integers(0, n, size=count)
        xi = x[np.arange(count), i]
        lo, hi = x.min(axis=1), x.max(axis=1)
        lam = lambdas_of(x)[np.arange(count), i]
        lhs = f(lo + hi - xi)
        rhs = f(lo) + f(hi) - f(xi) - 2.0 * c * lam * (1 - lam) * (lo - hi) ** 2
        tally.add([(lhs, rhs)], {"x": x, "i": i})
    return tally.report()


def check_theorem27(f: StronglyConvexFunction, trials: int, rng_seed: int = 0,
                    tol: ToleranceConfig | None = None, n_range=(2, 8)) -> VerificationReport:
    """``lhs <= refined_rhs <= plain_rhs``."""
    rng = make_rng(rng_seed, "theorem27", f.id)
    tally = Tally("theorem27", f.id, rng_seed, tol,
                  {"n_range": list(n_range), "box": list(f.sample_box())})
    lo_box, hi_box = f.sample_box()
    for n, count in _groups(trials, rng, n_range):
        x = _constant_probe(rng.uniform(lo_box, hi_box, size=(count, n)))
        p = weight_batch(n, count, rng)
        b = theorem27_bound(f, x, p)
        tally.chain([b.lhs, b.refined_rhs, b.plain_rhs], {"x": x, "p": p})
    return tally.report()


def check_means_chain(trials: int, rng_seed: int = 0, tol: ToleranceConfig | None = None,
                      n_range=(2, 8), box=(1e-3, 1.0)) -> VerificationReport:
    rng = make_rng(rng_seed, "means_chain")
    tally = Tally("means_chain", "", rng_seed, tol, {"n_range": list(n_range), "box": list(box)})
    for n, count in _groups(trials, rng, n_range):
        x = _constant_probe(rng.uniform(box[0], box[1], size=(count, n)))
        p = weight_batch(n, count, rng)
        tally.chain(list(means_chain(x, p)), {"x": x, "p": p})
    return tally.report()
