"""Young-type ratio bounds from the strong convexity of ``-ln`` on ``(0, 1]``.

Every bound is stated for the ratio ``(lam a + (1 - lam) b) / (a^lam b^(1-lam))``
(the "mid" value), except :func:`eq22_baseline`, which keeps the classical
unnormalised form.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import DomainError, PreconditionError
from .report import Tally, VerificationReport
from .sampling import make_rng
from .tolerance import ToleranceConfig

SAMPLE_FLOOR = 1e-4


def _out(v):
    return float(v) if np.ndim(v) == 0 else v


def _unit(name, v):
    v = np.asarray(v, dtype=float)
    if not np.all((v > 0) & (v <= 1)):
        raise DomainError(f"{name} must lie in (0, 1]")
    return v


def _positive(name, v):
    v = np.asarray(v, dtype=float)
    if not np.all((v > 0) & np.isfinite(v)):
        raise DomainError(f"{name} must be positive and finite")
    return v


def _fraction(name, v):
    v = np.asarray(v, dtype=float)
    if not np.all((v >= 0) & (v <= 1)):
        raise DomainError(f"{name} must lie in [0, 1]")
    return v


def kantorovich(t):
    """``K(t) = (t + 1)^2 / (4 t)``, so ``K(a/b) = (a + b)^2 / (4 a b)``."""
    t = _positive("t", t)
    return _out((t + 1.0) ** 2 / (4.0 * t))


def _ratio(a, b, lam):
    # a**0 == 1 in numpy, so lam in {0, 1} needs no special casing.
    return (lam * a + (1 - lam) * b) / (a ** lam * b ** (1 - lam))


def _log_ratio(a, b, t):
    """``log _ratio(a, b, t)`` without cancellation when ``t`` or ``1 - t`` is tiny.

    Expanding around the nearer endpoint gives
    ``log1p(t (a - b) / b) - t log(a / b)`` (or the mirror image), which keeps
    full relative precision where the plain ratio rounds to 1.
    """
    s = 1 - t
    near_b = np.log1p(t * (a - b) / b) - t * np.log(a / b)
    near_a = np.log1p(s * (b - a) / a) - s * np.log(b / a)
    return np.where(t <= 0.5, near_b, near_a)


class Bounds(NamedTuple):
    lower: float
    mid: float
    upper: float


class KantorovichBounds(NamedTuple):
    lower: float
    mid: float
    upper: float
    r: float
    R: float


def remark23_exponents(a, b, lam, mu):
    """Arguments of the two exponential factors in :func:`remark23_bounds`."""
    a, b, lam, mu = map(np.asarray, (a, b, lam, mu))
    ratios = np.stack(np.broadcast_arrays(lam / mu, (1 - lam) / (1 - mu)))
    m, M = ratios.min(axis=0), ratios.max(axis=0)
    h = (b - a) ** 2 / 2
    low = h * ((lam - m * mu) * (lam - 1) ** 2 + lam ** 2 * ((1 - lam) - m * (1 - mu))
               + m * (mu - lam) ** 2)
    up = h * ((M * mu - lam) * (mu - 1) ** 2 + mu ** 2 * (M * (1 - mu) - (1 - lam))
              + (mu - lam) ** 2)
    return low, up, m, M


def remark23_bounds(a, b, lam, mu) -> Bounds:
    """Two-parameter bounds on the Young ratio at ``lam`` through the ratio at ``mu``.

    With ``m, M`` the min and max of ``lam/mu`` and ``(1-lam)/(1-mu)``::

        lower = ratio(mu)^m * exp((b-a)^2/2 * ((lam - m mu)(lam-1)^2
                + lam^2((1-lam) - m(1-mu)) + m(mu-lam)^2))
        upper = ratio(mu)^M / exp((b-a)^2/2 * ((M mu - lam)(mu-1)^2
                + mu^2(M(1-mu) - (1-lam)) + (mu-lam)^2))
    """
    a, b = _unit("a", a), _unit("b", b)
    lam = _fraction("lambda", lam)
    mu = np.asarray(mu, dtype=float)
    if not np.all((mu > 0) & (mu < 1)):
        raise PreconditionError("mu must lie strictly between 0 and 1")
    low, up, m, M = remark23_exponents(a, b, lam, mu)
    log_base = _log_ratio(a, b, mu)
    # M grows like 1/mu or 1/(1-mu): the base is needed to full relative precision,
    # and in log form an overflow gives +inf instead of nan
    with np.errstate(over="ignore"):
        lower = np.exp(m * log_base + low)
        upper = np.exp(M * log_base - up)
    return Bounds(_out(lower), _out(_ratio(a, b, lam)), _out(upper))


def corollary25_exponents(a, b, lam):
    a, b, lam = map(np.asarray, (a, b, lam))
    r = np.minimum(lam, 1 - lam)
    R = np.maximum(lam, 1 - lam)
    low = (b - a) ** 2 / 2 * ((lam - r) * (lam - 1) ** 2 + lam ** 2 * ((1 - lam) - r)
                              + r / 2 * (1 - 2 * lam) ** 2)
    up = (b - a) ** 2 / 8 * ((R - lam) + (R - (1 - lam)) + (1 - 2 * lam) ** 2)
    return low, up, r, R


def corollary25_bounds(a, b, lam) -> KantorovichBounds:
    """Kantorovich-refined Young bounds on the ratio at ``lam``.

    With ``r = min(lam, 1-lam)`` and ``R = max(lam, 1-lam)``::

        lower = K(a/b)^r * exp((b-a)^2/2 * ((lam-r)(lam-1)^2 + lam^2((1-lam)-r) + r/2 (1-2lam)^2))
        upper = K(a/b)^R / exp((b-a)^2/8 * ((R-lam) + (R-(1-lam)) + (1-2lam)^2))
    """
    a, b = _unit("a", a), _unit("b", b)
    lam = _fraction("lambda", lam)
    low, up, r, R = corollary25_exponents(a, b, lam)
    k = (a + b) ** 2 / (4 * a * b)
    return KantorovichBounds(_out(k ** r * np.exp(low)), _out(_ratio(a, b, lam)),
                             _out(k ** R / np.exp(up)), _out(r), _out(R))


def eq22_baseline(a, b, lam) -> Bounds:
    """``K^r a^lam b^(1-lam) <= lam a + (1-lam) b <= K^R a^lam b^(1-lam)`` for ``a, b > 0``."""
    a, b = _positive("a", a), _positive("b", b)
    lam = _fraction("lambda", lam)
    r = np.minimum(lam, 1 - lam)
    R = np.maximum(lam, 1 - lam)
    k = (a + b) ** 2 / (4 * a * b)
    geo = a ** lam * b ** (1 - lam)
    return Bounds(_out(k ** r * geo), _out(lam * a + (1 - lam) * b), _out(k ** R * geo))


class RefinementGain(NamedTuple):
    corollary25_lower_gap: float
    eq22_lower_gap: float
    exponent: float


def refinement_gain(a, b, lam) -> RefinementGain:
    """Lower-side gaps ``mid - lower`` of both bounds, on the ratio scale.

    The classical lower bound ``K^r`` is compared with ``K^r exp(E)``; ``E`` is
    returned so callers can tell when the refinement is guaranteed (``E >= 0``).
    """
    cor = corollary25_bounds(a, b, lam)
    low, _, _, _ = corollary25_exponents(a, b, lam)
    k = (np.asarray(a) + b) ** 2 / (4 * np.asarray(a) * b)
    eq_lower = k ** np.asarray(cor.r)
    mid = np.asarray(cor.mid)
    return RefinementGain(_out(mid - np.asarray(cor.lower)), _out(mid - eq_lower), _out(low))


# -- randomized checks --------------------------------------------------------

def _draw(rng, trials, lo=SAMPLE_FLOOR):
    a = rng.uniform(lo, 1.0, trials)
    b = rng.uniform(lo, 1.0, trials)
    lam = rng.uniform(0.0, 1.0, trials)
    k = max(1, trials // 100)
    b[:k] = a[:k]
    lam[k:2 * k] = 0.5
    return a, b, lam


def check_kantorovich(trials: int, rng_seed: int = 0, tol: ToleranceConfig | None = None) -> VerificationReport:
    """``K(t) >= 1`` with equality at ``t = 1``, and ``K(t) = K(1/t)``."""
    rng = make_rng(rng_seed, "kantorovich")
    tally = Tally("kantorovich", "", rng_seed, tol)
    t = np.exp(rng.uniform(-8, 8, trials))
    t[: max(1, trials // 100)] = 1.0
    k, kinv = kantorovich(t), kantorovich(1.0 / t)
    tally.add([(np.ones(trials), k), (k, kinv), (kinv, k)], {"t": t})
    return tally.report()


def check_remark23(trials: int, rng_seed: int = 0, tol: ToleranceConfig | None = None) -> VerificationReport:
    rng = make_rng(rng_seed, "remark23")
    tally = Tally("remark23", "", rng_seed, tol, {"sample_floor": SAMPLE_FLOOR})
    a, b, lam = _draw(rng, trials)
    mu = rng.uniform(0.0, 1.0, trials)
    k = max(1, trials // 100)
    mu[2 * k:3 * k] = lam[2 * k:3 * k]
    mu = np.where((mu <= 0) | (mu >= 1), 0.5, mu)
    bd = remark23_bounds(a, b, lam, mu)
    tally.chain(list(bd), {"a": a, "b": b, "lambda": lam, "mu": mu})
    return tally.report()


def check_corollary25(trials: int, rng_seed: int = 0, tol: ToleranceConfig | None = None) -> VerificationReport:
    """Kantorovich-refined chain, plus a cross-check against the two-parameter form at ``mu = 1/2``.

    The cross-check compares both lower and both upper bounds on every draw;
    the largest relative discrepancy and the number of draws whose relative
    discrepancy exceeds ``tol_rel`` go into ``extras`` and are not counted as
    violations.
    """
    rng = make_rng(rng_seed, "corollary25")
    tally = Tally("corollary25", "", rng_seed, tol, {"sample_floor": SAMPLE_FLOOR})
    a, b, lam = _draw(rng, trials)
    bd = corollary25_bounds(a, b, lam)
    tally.chain([bd.lower, bd.mid, bd.upper], {"a": a, "b": b, "lambda": lam})
    half = remark23_bounds(a, b, lam, np.full(trials, 0.5))
    scale_lo = np.maximum(np.abs(bd.lower), np.abs(half.lower))
    scale_up = np.maximum(np.abs(bd.upper), np.abs(half.upper))
    rel = np.maximum(np.abs(bd.lower - half.lower) / scale_lo, np.abs(bd.upper - half.upper) / scale_up)
    tally.extras["crosscheck_draws"] = trials
    tally.extras["crosscheck_max_rel_discrepancy"] = float(rel.max()) if trials else 0.0
    tally.extras["crosscheck_mismatches"] = int(np.sum(rel > tally.tol.tol_rel))
    return tally.report()


def check_eq22(trials: int, rng_seed: int = 0, tol: ToleranceConfig | None = None) -> VerificationReport:
    rng = make_rng(rng_seed, "eq22")
    tally = Tally("eq22", "", rng_seed, tol, {"sample_floor": SAMPLE_FLOOR})
    a, b, lam = _draw(rng, trials)
    tally.chain(list(eq22_baseline(a, b, lam)), {"a": a, "b": b, "lambda": lam})
    return tally.report()


def check_refinement_gain(trials: int, rng_seed: int = 0, tol: ToleranceConfig | None = None) -> VerificationReport:
    """``0 <= corollary gap <= classical gap`` on draws with a non-negative exponent.

    Draws with a negative exponent are counted in ``extras`` instead.
    """
    rng = make_rng(rng_seed, "refinement_gain")
    tally = Tally("refinement_gain", "", rng_seed, tol, {"sample_floor": SAMPLE_FLOOR})
    a, b, lam = _draw(rng, trials)
    g = refinement_gain(a, b, lam)
    guaranteed = np.asarray(g.exponent) >= 0
    zero = np.zeros(trials)
    tally.add([(zero, np.where(guaranteed, g.corollary25_lower_gap, zero)),
               (np.where(guaranteed, g.corollary25_lower_gap, zero), np.where(guaranteed, g.eq22_lower_gap, zero))],
              {"a": a, "b": b, "lambda": lam})
    tally.extras["negative_exponent_draws"] = int(np.sum(~guaranteed))
    tally.extras["min_exponent"] = float(np.min(g.exponent)) if trials else 0.0
    return tally.report()
