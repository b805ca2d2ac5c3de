"""Strongly convex and F-strongly convex scalar functions, with randomized checks.

A function object bundles the formula with its *claimed* modulus; the
``check_*`` routines test the claim through the three equivalent
characterisations (three-point inequality, quadratic support, derivative
monotonicity) on random samples drawn from a closed sampling box.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ConfigurationError, DomainError, PreconditionError, UnsupportedError
from .report import Tally, VerificationReport
from .sampling import make_rng
from .tolerance import ToleranceConfig

SCALAR_MARGIN = 1e-6
OPERATOR_MARGIN = 1e-3


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float
    lo_open: bool = False
    hi_open: bool = False

    def __post_init__(self):
        if not self.lo < self.hi:
            raise DomainError(f"empty interval: lo={self.lo} >= hi={self.hi}")
        # infinite ends are always open
        if math.isinf(self.lo):
            object.__setattr__(self, "lo_open", True)
        if math.isinf(self.hi):
            object.__setattr__(self, "hi_open", True)

    @classmethod
    def real_line(cls) -> "Interval":
        return cls(-math.inf, math.inf, True, True)

    @classmethod
    def parse(cls, text: str) -> "Interval":
        """Parse ``"(0,1]"``, ``"[1,inf)"`` or the shorthand ``"lo:hi"`` (closed)."""
        text = text.strip()
        m = re.fullmatch(r"([\[(])\s*([^,]+?)\s*,\s*([^,]+?)\s*([\])])", text)
        if m:
            return cls(float(m.group(2)), float(m.group(3)), m.group(1) == "(", m.group(4) == ")")
        if ":" in text:
            lo, hi = text.split(":", 1)
            return cls(float(lo), float(hi))
        raise ConfigurationError(f"cannot parse interval {text!r}")

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        lo_ok = x > self.lo if self.lo_open else x >= self.lo
        hi_ok = x < self.hi if self.hi_open else x <= self.hi
        return lo_ok & hi_ok

    def interior_contains(self, x):
        x = np.asarray(x, dtype=float)
        return (x > self.lo) & (x < self.hi)

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.lo) and math.isfinite(self.hi)

    def sampling_box(self, margin: float = SCALAR_MARGIN) -> tuple[float, float]:
        """Closed sub-box: open finite ends are pulled in by ``margin``."""
        if not self.bounded:
            raise ConfigurationError(f"unbounded domain {self} needs an explicit sampling box")
        lo = self.lo + margin if self.lo_open else self.lo
        hi = self.hi - margin if self.hi_open else self.hi
        if lo > hi:
            raise ConfigurationError(f"margin {margin} empties {self}")
        return lo, hi

    def __str__(self) -> str:
        return f"{'(' if self.lo_open else '['}{self.lo:g}, {self.hi:g}{')' if self.hi_open else ']'}"


def evaluate(fn: Callable, x) -> np.ndarray:
    """Apply ``fn`` elementwise, falling back to ``np.vectorize`` for scalar-only callables."""
    x = np.asarray(x, dtype=float)
    try:
        out = np.asarray(fn(x), dtype=float)
        if out.shape == x.shape:
            return out
    except (TypeError, ValueError):
        pass
    return np.vectorize(lambda t: float(fn(float(t))), otypes=[float])(x)


@dataclass(frozen=True)
class _ScalarFunction:
    id: str
    domain: Interval
    eval: Callable = field(repr=False)
    deriv: Optional[Callable] = field(default=None, repr=False)
    box: Optional[tuple[float, float]] = None

    def __call__(self, x):
        out = evaluate(self.eval, x)
        return float(out) if out.ndim == 0 else out

    def derivative(self, x):
        if self.deriv is None:
            raise UnsupportedError(f"{self.id} carries no derivative")
        out = evaluate(self.deriv, x)
        return float(out) if out.ndim == 0 else out

    def sample_box(self) -> tuple[float, float]:
        """Closed box scalar checks sample from."""
        if self.box is not None:
            return self.box
        return self.domain.sampling_box()

    def operator_box(self, margin: float = OPERATOR_MARGIN) -> tuple[float, float]:
        """Closed box inside the *interior* of the domain, for spectra."""
        lo, hi = self.sample_box()
        if math.isfinite(self.domain.lo):
            lo = max(lo, self.domain.lo + margin)
        if math.isfinite(self.domain.hi):
            hi = min(hi, self.domain.hi - margin)
        if lo > hi:
            raise ConfigurationError(f"operator box for {self.id} is empty")
        return lo, hi

    def require_in_domain(self, x, what: str = "point") -> None:
        if not np.all(self.domain.contains(x)):
            raise DomainError(f"{what} outside domain {self.domain} of {self.id}")


@dataclass(frozen=True)
class StronglyConvexFunction(_ScalarFunction):
    """Scalar function with a claimed strong-convexity modulus ``c >= 0``."""

    modulus: float = 0.0

    def __post_init__(self):
        if not self.modulus >= 0:
            raise PreconditionError(f"modulus must be >= 0, got {self.modulus}")

    def as_f_strong(self) -> "FStronglyConvexFunction":
        """The same function viewed as F-strongly convex with ``F(t) = c t^2``."""
        c = self.modulus
        return FStronglyConvexFunction(id=f"{self.id}|F=c*t^2", domain=self.domain, eval=self.eval,
                                       deriv=self.deriv, box=self.box,
                                       penalty=lambda t: c * np.square(t))


@dataclass(frozen=True)
class FStronglyConvexFunction(_ScalarFunction):
    """Scalar function with a non-negative penalty ``F`` replacing ``c t^2``.

    ``penalty_domain`` restricts where ``F`` may be evaluated; ``None`` means
    the formula extends to the whole real line.
    """

    penalty: Callable = field(default=lambda t: np.zeros_like(t), repr=False)
    penalty_domain: Optional[Interval] = None

    def F(self, t):
        t = np.asarray(t, dtype=float)
        if self.penalty_domain is not None and not np.all(self.penalty_domain.contains(t)):
            raise DomainError(f"penalty of {self.id} evaluated outside {self.penalty_domain}")
        out = evaluate(self.penalty, t)
        return float(out) if out.ndim == 0 else out


# -- catalog ------------------------------------------------------------------

def neg_log() -> StronglyConvexFunction:
    return StronglyConvexFunction(
        id="neg_log", domain=Interval(0.0, 1.0, lo_open=True),
        eval=lambda x: -np.log(x), deriv=lambda x: -1.0 / np.asarray(x, dtype=float),
        modulus=0.5)


def pow_r(r: float) -> StronglyConvexFunction:
    """``x^r`` on ``(1, inf)``, modulus ``(r^2 - r) / 2`` for ``r >= 2``."""
    r = float(r)
    if not r >= 2:
        raise DomainError(f"pow_r needs r >= 2, got {r}")
    return StronglyConvexFunction(
        id=f"pow_r:{r:g}", domain=Interval(1.0, math.inf, True, True),
        eval=lambda x: np.power(x, r), deriv=lambda x: r * np.power(x, r - 1.0),
        modulus=(r * r - r) / 2.0, box=(1.0 + SCALAR_MARGIN, 100.0))


def neg_pow_r(r: float) -> StronglyConvexFunction:
    """``-x^r`` on ``(0, 1)``, modulus ``(r - r^2) / 2`` for ``0 < r < 1``."""
    r = float(r)
    if not 0 < r < 1:
        raise DomainError(f"neg_pow_r needs 0 < r < 1, got {r}")
    return StronglyConvexFunction(
        id=f"neg_pow_r:{r:g}", domain=Interval(0.0, 1.0, True, True),
        eval=lambda x: -np.power(x, r), deriv=lambda x: -r * np.power(x, r - 1.0),
        modulus=(r - r * r) / 2.0)


def quad(c: float = 1.0) -> StronglyConvexFunction:
    c = float(c)
    return StronglyConvexFunction(
        id=f"quad:{c:g}", domain=Interval.real_line(),
        eval=lambda x: c * np.square(x), deriv=lambda x: 2.0 * c * np.asarray(x, dtype=float),
        modulus=c, box=(-10.0, 10.0))


def builtin_catalog(r: float = 3.0, s: float = 0.5, c: float = 1.0) -> list[StronglyConvexFunction]:
    """``neg_log``, ``pow_r(r)``, ``neg_pow_r(s)`` and ``quad(c)``."""
    return [neg_log(), pow_r(r), neg_pow_r(s), quad(c)]


_FACTORIES = {"neg_log": neg_log, "pow_r": pow_r, "neg_pow_r": neg_pow_r, "quad": quad}


def by_id(spec: str) -> StronglyConvexFunction:
    """Resolve ids such as ``"neg_log"``, ``"pow_r:3"``, ``"quad:1.0"``."""
    name, _, arg = spec.partition(":")
    if name not in _FACTORIES:
        raise ConfigurationError(f"unknown function id {spec!r}; known: {sorted(_FACTORIES)}")
    if name == "neg_log":
        if arg:
            raise ConfigurationError("neg_log takes no parameter")
        return neg_log()
    if not arg:
        if name == "quad":
            return quad()
        raise ConfigurationError(f"{name} needs a parameter, e.g. {name}:3")
    try:
        value = float(arg)
    except ValueError:
        raise ConfigurationError(f"bad parameter in {spec!r}") from None
    return _FACTORIES[name](value)


def f_quad(c: float = 1.0) -> FStronglyConvexFunction:
    c = float(c)
    return FStronglyConvexFunction(
        id=f"f_quad:{c:g}", domain=Interval.real_line(),
        eval=lambda x: c * np.square(x), deriv=lambda x: 2.0 * c * np.asarray(x, dtype=float),
        penalty=lambda t: c * np.square(t), box=(-10.0, 10.0))


def shifted_square() -> FStronglyConvexFunction:
    """``x^2 - 1`` on ``[-2, 2]`` with ``F(t) = t^2``."""
    return FStronglyConvexFunction(
        id="shifted_square", domain=Interval(-2.0, 2.0),
        eval=lambda x: np.square(x) - 1.0, deriv=lambda x: 2.0 * np.asarray(x, dtype=float),
        penalty=np.square)


def quartic() -> FStronglyConvexFunction:
    """``x^4`` on ``[1, 2]`` with ``F(t) = t^2``."""
    return FStronglyConvexFunction(
        id="quartic", domain=Interval(1.0, 2.0),
        eval=lambda x: np.power(x, 4), deriv=lambda x: 4.0 * np.power(x, 3),
        penalty=np.square)


def cosh_minus_one() -> FStronglyConvexFunction:
    """``cosh(x) - 1`` on the real line with ``F(t) = t^2 / 2``."""
    return FStronglyConvexFunction(
        id="cosh", domain=Interval.real_line(),
        eval=lambda x: np.cosh(x) - 1.0, deriv=np.sinh,
        penalty=lambda t: 0.5 * np.square(t), box=(-3.0, 3.0))


_F_FACTORIES = {"f_quad": f_quad, "shifted_square": shifted_square, "quartic": quartic,
                "cosh": cosh_minus_one}


def f_by_id(spec: str) -> FStronglyConvexFunction:
    name, _, arg = spec.partition(":")
    if name not in _F_FACTORIES:
        raise ConfigurationError(f"unknown F-strongly convex id {spec!r}; known: {sorted(_F_FACTORIES)}")
    if name == "f_quad":
        return f_quad(float(arg) if arg else 1.0)
    return _F_FACTORIES[name]()


# -- checks -------------------------------------------------------------------

def _uniform(rng, box, size):
    return rng.uniform(box[0], box[1], size=size)


def check_strong_convexity(f: StronglyConvexFunction, trials: int, rng_seed: int = 0,
                           tol: ToleranceConfig | None = None) -> VerificationReport:
    """Three-point test ``f(lx + (1-l)y) <= l f(x) + (1-l) f(y) - c l (1-l) (x-y)^2``."""
    if trials < 1:
        raise PreconditionError("trials must be >= 1")
    box = f.sample_box()
    rng = make_rng(rng_seed, "strong_convexity", f.id)
    x = _uniform(rng, box, trials)
    y = _uniform(rng, box, trials)
    lam = rng.uniform(0.0, 1.0, trials)
    lam[: max(1, trials // 100)] = 0.0
    c = f.modulus
    lhs = f(lam * x + (1 - lam) * y)
    rhs = lam * f(x) + (1 - lam) * f(y) - c * lam * (1 - lam) * (x - y) ** 2
    tally = Tally("strong_convexity", f.id, rng_seed, tol, {"box": list(box), "modulus": c})
    tally.add([(lhs, rhs)], {"x": x, "y": y, "lambda": lam})
    tally.extras["max_abs_gap"] = float(np.max(np.abs(rhs - lhs)))
    return tally.report()


def check_quadratic_support(f: StronglyConvexFunction, x0: float | None = None, trials: int = 1000,
                            rng_seed: int = 0, tol: ToleranceConfig | None = None) -> VerificationReport:
    """Quadratic support ``c(x-x0)^2 + f'(x0)(x-x0) + f(x0) <= f(x)``.

    With ``x0=None`` a fresh interior support point is drawn for every trial.
    """
    if f.deriv is None:
        raise UnsupportedError(f"{f.id} carries no derivative; quadratic support needs l = f'(x0)")
    if trials < 1:
        raise PreconditionError("trials must be >= 1")
    box = f.sample_box()
    rng = make_rng(rng_seed, "quadratic_support", f.id)
    if x0 is None:
        x0s = _uniform(rng, box, trials)
        interior = f.domain.interior_contains(x0s)
        x0s = np.where(interior, x0s, 0.5 * (box[0] + box[1]))
    else:
        if not f.domain.interior_contains(x0):
            raise PreconditionError(f"x0={x0} is not interior to {f.domain}")
        x0s = np.full(trials, float(x0))
    x = _uniform(rng, box, trials)
    x[: max(1, trials // 100)] = x0s[: max(1, trials // 100)]
    c = f.modulus
    lhs = c * (x - x0s) ** 2 + f.derivative(x0s) * (x - x0s) + f(x0s)
    rhs = f(x)
    tally = Tally("quadratic_support", f.id, rng_seed, tol,
                  {"box": list(box), "x0": "random" if x0 is None else float(x0)})
    tally.add([(lhs, rhs)], {"x": x, "x0": x0s})
    return tally.report()


def check_derivative_monotonicity(f: StronglyConvexFunction, trials: int, rng_seed: int = 0,
                                  tol: ToleranceConfig | None = None) -> VerificationReport:
    """``(f'(x) - f'(y)) (x - y) >= 2c (x - y)^2`` on random pairs."""
    if f.deriv is None:
        raise UnsupportedError(f"{f.id} carries no derivative")
    if trials < 1:
        raise PreconditionError("trials must be >= 1")
    box = f.sample_box()
    rng = make_rng(rng_seed, "derivative_monotonicity", f.id)
    x = _uniform(rng, box, trials)
    y = _uniform(rng, box, trials)
    y[: max(1, trials // 100)] = x[: max(1, trials // 100)]
    lhs = 2.0 * f.modulus * (x - y) ** 2
    rhs = (f.derivative(x) - f.derivative(y)) * (x - y)
    tally = Tally("derivative_monotonicity", f.id, rng_seed, tol, {"box": list(box)})
    tally.add([(lhs, rhs)], {"x": x, "y": y})
    return tally.report()


def check_f_strong_convexity(f: FStronglyConvexFunction, trials: int, rng_seed: int = 0,
                             tol: ToleranceConfig | None = None) -> VerificationReport:
    """``f(lx + (1-l)y) <= l f(x) + (1-l) f(y) - l(1-l) F(x - y)`` plus ``F >= 0``."""
    if trials < 1:
        raise PreconditionError("trials must be >= 1")
    box = f.sample_box()
    rng = make_rng(rng_seed, "f_strong_convexity", f.id)
    x = _uniform(rng, box, trials)
    y = _uniform(rng, box, trials)
    lam = rng.uniform(0.0, 1.0, trials)
    lam[: max(1, trials // 100)] = 0.0
    pen = f.F(x - y)
    lhs = f(lam * x + (1 - lam) * y)
    rhs = lam * f(x) + (1 - lam) * f(y) - lam * (1 - lam) * pen
    tally = Tally("f_strong_convexity", f.id, rng_seed, tol, {"box": list(box)})
    tally.add([(lhs, rhs), (np.zeros_like(pen), pen)], {"x": x, "y": y, "lambda": lam})
    return tally.report()


def check_catalog_entry(f: StronglyConvexFunction, trials: int, rng_seed: int = 0,
                        tol: ToleranceConfig | None = None) -> VerificationReport:
    """Convexity of ``g(x) = f(x) - c x^2`` by the three-point test."""
    box = f.sample_box()
    rng = make_rng(rng_seed, "catalog", f.id)
    x = _uniform(rng, box, trials)
    y = _uniform(rng, box, trials)
    lam = rng.uniform(0.0, 1.0, trials)
    c = f.modulus

    def g(t):
        return f(t) - c * np.square(t)

    lhs = g(lam * x + (1 - lam) * y)
    rhs = lam * g(x) + (1 - lam) * g(y)
    tally = Tally("catalog", f.id, rng_seed, tol, {"box": list(box), "modulus": c})
    tally.add([(lhs, rhs)], {"x": x, "y": y, "lambda": lam})
    return tally.report()


def derivative_consistency(f: _ScalarFunction, points: int = 100) -> float:
    """Largest ``|f'(x) - FD(x)| / (1 + |f'(x)|)`` over interior grid points.

    ``FD`` is the centred difference with step ``1e-6 * max(1, |x|)``.
    """
    lo, hi = f.sample_box()
    x = np.linspace(lo, hi, points + 2)[1:-1]
    h = 1e-6 * np.maximum(1.0, np.abs(x))
    fd = (f(x + h) - f(x - h)) / (2.0 * h)
    d = f.derivative(x)
    return float(np.max(np.abs(d - fd) / (1.0 + np.abs(d))))
