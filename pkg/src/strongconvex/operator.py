"""Operator Jensen inequalities on real symmetric matrices.

Every quantity ``<g(A)x, x>`` is evaluated through the spectral measure of
``A`` at ``x``: with ``A = Q diag(lam) Q^T`` and ``w = (Q^T x)^2`` it equals
``sum_k w_k g(lam_k)``.  The variance ``<A^2 x, x> - <Ax, x>^2`` is computed
in the centred form ``sum_k w_k (lam_k - <Ax, x>)^2``, which is never
negative and does not cancel catastrophically.

The single-instance functions take a :class:`HermitianMatrix` (or a
symmetric array) and a vector; the ``check_*`` functions sample batches.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DomainError, PreconditionError
from .funcs import (OPERATOR_MARGIN, FStronglyConvexFunction, Interval, StronglyConvexFunction,
                    evaluate, neg_pow_r, pow_r)
from .linalg import (HermitianMatrix, apply_function, check_spectrum, jacobi_eigh, quadratic_form,
                     sample_spectrum_matrices, spectral_weights)
from .report import Tally, VerificationReport
from .sampling import make_rng, unit_vector_batch
from .tolerance import DEFAULT_TOLERANCE, ToleranceConfig

UNIT_NORM_TOL = 1e-12
UNBOUNDED_CAP = 100.0
DEFAULT_DIMS = (1, 2, 3, 5, 8, 16)
VECTORS_PER_MATRIX = 10
POSITIVE_BOX = (1.0 + OPERATOR_MARGIN, UNBOUNDED_CAP)


# -- spectra and sampling -----------------------------------------------------

@dataclass(frozen=True)
class SpectrumSpec:
    """Target spectrum ``Sp(A)`` inside ``interval`` for ``dim x dim`` matrices.

    Eigenvalues are drawn from the closed box :meth:`box`: open finite ends
    move inwards by ``margin`` and infinite ends are capped at ``+-cap``.
    """

    interval: Interval
    dim: int
    margin: float = OPERATOR_MARGIN
    cap: float = UNBOUNDED_CAP

    def __post_init__(self):
        if self.dim < 1:
            raise PreconditionError("dim must be >= 1")

    def box(self) -> tuple[float, float]:
        iv = self.interval
        lo = -self.cap if math.isinf(iv.lo) else iv.lo + (self.margin if iv.lo_open else 0.0)
        hi = self.cap if math.isinf(iv.hi) else iv.hi - (self.margin if iv.hi_open else 0.0)
        if not lo <= hi:
            raise DomainError(f"sampling box for {iv} is empty")
        return lo, hi


def sample_hermitian(spec: SpectrumSpec, rng_seed: int) -> HermitianMatrix:
    """``Q D Q^T`` with ``D`` uniform on ``spec.box()`` and ``Q`` a product of reflections."""
    lo, hi = spec.box()
    rng = make_rng(rng_seed, "sample_hermitian", str(spec.dim))
    return HermitianMatrix(sample_spectrum_matrices(lo, hi, spec.dim, 1, rng)[0])


# -- spectral measure helpers -------------------------------------------------

def _expect(w, g):
    return np.sum(w * g, axis=-1)


def _mean_var(lam, w):
    a = _expect(w, lam)
    return a, _expect(w, (lam - a[..., None]) ** 2)


def _measure(A, x, *, unit: bool = True):
    """Eigenvalues of ``A`` and spectral weights of ``x``, after validation."""
    if not isinstance(A, HermitianMatrix):
        A = HermitianMatrix(A)
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.size != A.dim:
        raise PreconditionError(f"dimension mismatch: matrix {A.dim}, vector {x.size}")
    norm = float(np.linalg.norm(x))
    if unit and abs(norm - 1.0) > UNIT_NORM_TOL:
        raise PreconditionError(f"x must be a unit vector, got norm {norm!r}")
    lam, q = A.spectrum
    return lam, spectral_weights(q, x)


def _interior(f, lam):
    check_spectrum(lam, f.domain.interior_contains, f"interior of {f.domain} ({f.id})")


def _penalty(f: FStronglyConvexFunction, t):
    # F is evaluated on shifted spectra, outside the declared penalty domain if need be
    return evaluate(f.penalty, t)


def _scalar(*values):
    return tuple(float(v) if np.ndim(v) == 0 else v for v in values)


# -- cores on (eigenvalues, weights) -------------------------------------------

class JensenTriple(NamedTuple):
    lhs: float
    refined_rhs: float
    plain_rhs: float


class HolderTriple(NamedTuple):
    lhs: float
    refined_rhs: float
    classical_rhs: float


class Pair(NamedTuple):
    lhs: float
    rhs: float


class ReversePair(NamedTuple):
    lhs: float
    rhs: float
    uncentred_rhs: float


def _theorem33(f, lam, w):
    a, var = _mean_var(lam, w)
    fa = _expect(w, f(lam))
    return JensenTriple(*_scalar(f(a), fa - f.modulus * var, fa))


def _holder_modulus(r):
    if r >= 2:
        return (r * r - r) / 2.0
    if 0 < r < 1:
        return (r - r * r) / 2.0
    raise PreconditionError(f"refined bound needs r >= 2 or 0 < r < 1, got {r}")


def _holder(lam, w, r):
    c = _holder_modulus(r)
    a, var = _mean_var(lam, w)
    ar = a ** r
    mom = _expect(w, lam ** r)
    if r >= 2:
        return HolderTriple(*_scalar(ar, mom - c * var, mom))
    return HolderTriple(*_scalar(mom, ar - c * var, ar))


def _holder_classical(lam, w, r):
    a = _expect(w, lam)
    mom = _expect(w, lam ** r)
    if r > 1:
        return Pair(*_scalar(a ** r, mom))
    if 0 < r < 1:
        return Pair(*_scalar(mom, a ** r))
    raise PreconditionError(f"classical bound needs r > 1 or 0 < r < 1, got {r}")


def _theorem35(f, c_prime, nu, lam, w):
    a, var = _mean_var(lam, w)
    fa = np.asarray(f(a))
    flam = np.asarray(f(lam))
    if np.any(fa < 0) or np.any(flam < 0):
        raise PreconditionError(f"{f.id} takes negative values on the spectrum")
    head = fa ** (1.0 - nu)
    mean_f = _expect(w, flam)
    return _scalar(
        fa,
        head * fa ** nu + c_prime * head * var,
        head * _expect(w, flam ** nu),
        head * mean_f ** nu,
        (1.0 - nu) * fa + nu * mean_f,
        mean_f - f.modulus * (1.0 - nu) * var,
        mean_f,
    )


def _theorem36(f, lam, w):
    if not f.modulus > 0:
        raise PreconditionError("the reverse bound divides by c; c must be > 0")
    a, var = _mean_var(lam, w)
    d = np.asarray(f.derivative(lam))
    da = np.asarray(f.derivative(a))
    centred = _expect(w, (lam - a[..., None]) * (d - da[..., None])) / (2.0 * f.modulus)
    uncentred = (_expect(w, lam * d) - a * _expect(w, d)) / (2.0 * f.modulus)
    return ReversePair(*_scalar(var, centred, uncentred))


def _eq43(f, lam, w):
    a = _expect(w, lam)
    rhs = _expect(w, f(lam)) - _expect(w, _penalty(f, lam - a[..., None]))
    return Pair(*_scalar(f(a), rhs))


def _theorem41(f, lam, w):
    s2 = np.sum(w, axis=-1)
    a = _expect(w, lam)
    b = a / s2
    rhs = (_expect(w, f(lam)) - _expect(w, _penalty(f, lam - b[..., None]))
           + (s2 * s2 - s2) * _penalty(f, b))
    return Pair(*_scalar(f(a), rhs))


def _require_subunit_hypotheses(f: FStronglyConvexFunction):
    if not f.domain.contains(0.0):
        raise DomainError(f"0 must lie in the domain of {f.id}")
    if f(0.0) > 0:
        raise PreconditionError(f"{f.id}(0) = {f(0.0)!r} > 0")


# -- single-instance API ------------------------------------------------------

def theorem33_check(f: StronglyConvexFunction, A, x) -> JensenTriple:
    """``f(<Ax,x>) <= <f(A)x,x> - c var <= <f(A)x,x>`` for a unit vector ``x``."""
    lam, w = _measure(A, x)
    _interior(f, lam)
    return _theorem33(f, lam, w)


def holder_mccarthy_refined(A, x, r: float) -> HolderTriple:
    """Refined power-mean comparison.

    For ``r >= 2`` and ``Sp(A)`` in ``(1, inf)``:
    ``(<Ax,x>^r, <A^r x,x> - c var, <A^r x,x>)`` with ``c = (r^2 - r)/2``.
    For ``0 < r < 1`` and ``Sp(A)`` in ``(0, 1)``:
    ``(<A^r x,x>, <Ax,x>^r + c (<Ax,x>^2 - <A^2 x,x>), <Ax,x>^r)`` with ``c = (r - r^2)/2``.
    """
    r = float(r)
    _holder_modulus(r)
    lam, w = _measure(A, x)
    f = pow_r(r) if r >= 2 else neg_pow_r(r)
    _interior(f, lam)
    return _holder(lam, w, r)


def holder_mccarthy(A, x, r: float) -> Pair:
    """Unrefined comparison of ``<Ax,x>^r`` and ``<A^r x,x>`` for positive ``A``."""
    lam, w = _measure(A, x)
    check_spectrum(lam, lambda t: t > 0, "(0, inf)")
    return _holder_classical(lam, w, float(r))


def theorem35_chain(f: StronglyConvexFunction, c_prime: float, nu: float, A, x) -> tuple:
    """Seven-term chain for non-negative ``f`` whose power ``f^nu`` has modulus ``c_prime``.

    Terms, in order::

        f(a)
        f^(1-nu)(a) f^nu(a) + c' f^(1-nu)(a) var
        f^(1-nu)(a) <f^nu(A)x,x>
        f^(1-nu)(a) <f(A)x,x>^nu
        (1-nu) f(a) + nu <f(A)x,x>
        <f(A)x,x> - c (1-nu) var
        <f(A)x,x>

    with ``a = <Ax,x>``.
    """
    if not 0 <= nu <= 1:
        raise PreconditionError("nu must lie in [0, 1]")
    if not c_prime >= 0:
        raise PreconditionError("c_prime must be >= 0")
    lam, w = _measure(A, x)
    _interior(f, lam)
    return _theorem35(f, float(c_prime), float(nu), lam, w)


def theorem36_reverse(f: StronglyConvexFunction, A, x) -> ReversePair:
    """``var <= (<f'(A) A x,x> - <Ax,x><f'(A)x,x>) / (2c)``.

    ``rhs`` is evaluated as ``sum w (lam - a)(f'(lam) - f'(a)) / (2c)``, which
    equals the uncentred expression above because ``sum w (lam - a) = 0``;
    ``uncentred_rhs`` evaluates that expression directly for comparison.
    """
    lam, w = _measure(A, x)
    _interior(f, lam)
    return _theorem36(f, lam, w)


def eq43_fstrong_check(f: FStronglyConvexFunction, A, x) -> Pair:
    """``f(<Ax,x>) <= <f(A)x,x> - <F(A - <Ax,x> I)x,x>`` for a unit vector ``x``."""
    lam, w = _measure(A, x)
    _interior(f, lam)
    return _eq43(f, lam, w)


def theorem41_subunit_check(f: FStronglyConvexFunction, A, x) -> Pair:
    """Sub-unit version: with ``s = ||x|| <= 1`` and ``b = <Ax,x> / s^2``,
    ``f(<Ax,x>) <= <f(A)x,x> - <F(A - b I)x,x> + (s^4 - s^2) F(b)``.

    Needs ``0`` in the domain of ``f`` and ``f(0) <= 0``.
    """
    lam, w = _measure(A, x, unit=False)
    s2 = float(np.sum(w))
    if s2 == 0:
        raise PreconditionError("x must be non-zero")
    if math.sqrt(s2) > 1 + UNIT_NORM_TOL:
        raise PreconditionError(f"||x|| = {math.sqrt(s2)!r} exceeds 1")
    _require_subunit_hypotheses(f)
    _interior(f, lam)
    return _theorem41(f, lam, w)


# -- batched sampling -----------------------------------------------------------

@functools.lru_cache(maxsize=128)
def _pool(lo: float, hi: float, dim: int, count: int, seed: int):
    """Eigen-decomposed matrices with spectrum uniform on ``[lo, hi]``.

    Shared by every check that uses the same box, dim and seed, so each
    matrix is decomposed once per run.
    """
    rng = make_rng(seed, "matrix_pool", repr((lo, hi)), str(dim))
    a = sample_spectrum_matrices(lo, hi, dim, count, rng)
    lam, q = jacobi_eigh(a)
    for arr in (lam, q):
        arr.setflags(write=False)
    return lam, q


def _batches(check_id: str, variant: str, box, dims: Sequence[int], trials: int, seed: int,
             per_matrix: int = VECTORS_PER_MATRIX, subunit: bool = False):
    """Yield ``(dim, eigenvalues, weights, x)`` with ``trials`` rows per dim.

    About 1% of the vectors are eigenvectors of their matrix (scaled to the
    drawn norm when ``subunit``), which exercises the equality cases.
    """
    if trials < 1:
        raise PreconditionError("trials must be >= 1")
    lo, hi = box
    for dim in dims:
        count = -(-trials // per_matrix)
        lam, q = _pool(float(lo), float(hi), int(dim), count, int(seed))
        rng = make_rng(seed, check_id, variant, str(dim))
        x = unit_vector_batch(dim, count * per_matrix, rng, subunit).reshape(count, per_matrix, dim)
        probes = max(1, trials // 100)
        idx = np.arange(probes)
        mi, vi = idx // per_matrix, idx % per_matrix
        cols = rng.integers(0, dim, probes)
        norms = np.linalg.norm(x[mi, vi], axis=-1, keepdims=True)
        x[mi, vi] = q[mi, :, cols] * norms
        w = np.einsum("bji,bkj->bki", q, x) ** 2
        lam_rows = np.broadcast_to(lam[:, None, :], w.shape).reshape(-1, dim)[:trials]
        yield dim, lam_rows, w.reshape(-1, dim)[:trials], x.reshape(-1, dim)[:trials]


def _echo(box, dims, per_matrix, **more):
    out = {"spectrum_box": list(box), "dims": list(dims), "vectors_per_matrix": per_matrix}
    out.update(more)
    return out


def _run(check_id, variant, box, dims, trials, seed, tol, per_matrix, links_of,
         subunit=False, domain_of=None, **echo):
    tally = Tally(check_id, variant, seed, tol, _echo(box, dims, per_matrix, **echo))
    for dim, lam, w, x in _batches(check_id, variant, box, dims, trials, seed, per_matrix, subunit):
        if domain_of is not None:
            _interior(domain_of, lam)
        tally.add(links_of(lam, w, tally), {"eigenvalues": lam, "x": x, "dim": dim})
    return tally


def check_theorem33(f: StronglyConvexFunction, trials: int, rng_seed: int = 0,
                    tol: ToleranceConfig | None = None, dims=DEFAULT_DIMS,
                    per_matrix: int = VECTORS_PER_MATRIX, box=None) -> VerificationReport:
    box = box or f.operator_box()

    def links(lam, w, _):
        t = _theorem33(f, lam, w)
        return [(t.lhs, t.refined_rhs), (t.refined_rhs, t.plain_rhs)]

    return _run("theorem33", f.id, box, dims, trials, rng_seed, tol, per_matrix, links,
                domain_of=f).report()


def check_holder_mccarthy(r: float, trials: int, rng_seed: int = 0,
                          tol: ToleranceConfig | None = None, dims=DEFAULT_DIMS,
                          per_matrix: int = VECTORS_PER_MATRIX, box=None,
                          classical: bool = False) -> VerificationReport:
    """Refined chain for ``r >= 2`` or ``0 < r < 1``.

    For ``1 < r < 2``, or with ``classical=True``, only the unrefined
    comparison is checked and any positive spectrum is allowed.  The refined
    variants record the largest relative ``|lhs - refined_rhs|``, which
    vanishes for ``r = 2``.
    """
    r = float(r)
    refined = not classical and (r >= 2 or 0 < r < 1)
    if refined:
        f = pow_r(r) if r >= 2 else neg_pow_r(r)
        box = box or f.operator_box()
    else:
        if not (r > 0 and r != 1):
            raise PreconditionError(f"power comparison needs r > 0, r != 1, got {r}")
        f = StronglyConvexFunction(id=f"pow:{r:g}", domain=Interval(0.0, math.inf, True, True),
                                   eval=lambda t: np.power(t, r))
        box = box or (POSITIVE_BOX if r > 1 else neg_pow_r(0.5).operator_box())
    gap = [0.0]

    def links(lam, w, _):
        if not refined:
            p = _holder_classical(lam, w, r)
            return [(p.lhs, p.rhs)]
        t = _holder(lam, w, r)
        scale = np.maximum(1.0, np.maximum(np.abs(t.lhs), np.abs(t.refined_rhs)))
        gap[0] = max(gap[0], float(np.max(np.abs(t.refined_rhs - t.lhs) / scale)))
        return [(t.lhs, t.refined_rhs), (t.refined_rhs, t.classical_rhs)]

    variant = f"r={r:g}" if refined else f"classical:r={r:g}"
    tally = _run("holder_mccarthy", variant, box, dims, trials, rng_seed, tol, per_matrix, links,
                 domain_of=f, r=r)
    if refined:
        tally.extras["max_rel_tightness_gap"] = gap[0]
    return tally.report()


def power_modulus(exponent: float) -> float:
    """Modulus of ``t^s`` on ``(1, inf)`` used for ``c'``: ``s(s-1)/2`` for ``s >= 2``, else 0."""
    return exponent * (exponent - 1) / 2.0 if exponent >= 2 else 0.0


def check_theorem35(f: StronglyConvexFunction, nu: float, c_prime: float, trials: int,
                    rng_seed: int = 0, tol: ToleranceConfig | None = None, dims=DEFAULT_DIMS,
                    per_matrix: int = VECTORS_PER_MATRIX, box=None) -> VerificationReport:
    """Seven-term chain.  The claimed modulus ``c_prime`` of ``f^nu`` is
    validated first with the three-point test; its violation count goes into
    ``extras["c_prime_violations"]``."""
    from .funcs import check_strong_convexity

    fnu = StronglyConvexFunction(id=f"{f.id}^{nu:g}", domain=f.domain,
                                 eval=lambda t: np.power(f(t), nu), box=f.box, modulus=c_prime)
    pre = check_strong_convexity(fnu, max(1000, trials // 10), rng_seed, tol)
    box = box or f.operator_box()

    def links(lam, w, _):
        v = _theorem35(f, c_prime, nu, lam, w)
        return list(zip(v[:-1], v[1:]))

    tally = _run("theorem35", f"{f.id}|nu={nu:g}", box, dims, trials, rng_seed, tol, per_matrix,
                 links, domain_of=f, nu=nu, c_prime=c_prime)
    tally.extras["c_prime_violations"] = pre.violations
    return tally.report()


def check_theorem36(f: StronglyConvexFunction, trials: int, rng_seed: int = 0,
                    tol: ToleranceConfig | None = None, dims=DEFAULT_DIMS,
                    per_matrix: int = VECTORS_PER_MATRIX, box=None) -> VerificationReport:
    """``var <= rhs``; the largest gap between the centred and the uncentred
    evaluation of ``rhs`` is recorded in ``extras``."""
    box = box or f.operator_box()
    diff = [0.0]

    def links(lam, w, _):
        t = _theorem36(f, lam, w)
        diff[0] = max(diff[0], float(np.max(np.abs(t.rhs - t.uncentred_rhs))))
        return [(t.lhs, t.rhs)]

    tally = _run("theorem36", f.id, box, dims, trials, rng_seed, tol, per_matrix, links, domain_of=f)
    tally.extras["max_abs_uncentred_form_gap"] = diff[0]
    return tally.report()


def _flag_penalty_domain(f, shifted, tally):
    if f.penalty_domain is not None:
        outside = ~np.all(f.penalty_domain.contains(shifted), axis=-1)
        tally.extras["penalty_domain_flags"] = tally.extras.get("penalty_domain_flags", 0) + int(outside.sum())


def check_eq43(f: FStronglyConvexFunction, trials: int, rng_seed: int = 0,
               tol: ToleranceConfig | None = None, dims=DEFAULT_DIMS,
               per_matrix: int = VECTORS_PER_MATRIX, modulus: float | None = None,
               box=None) -> VerificationReport:
    """``f(a) <= <f(A)x,x> - <F(A - a)x,x>``.

    With ``modulus`` given (``F = c t^2``), the right side is also compared
    with the refined Jensen bound ``<f(A)x,x> - c var``; the largest relative gap is
    recorded in ``extras``.
    """
    box = box or f.operator_box()
    gap = [0.0]

    def links(lam, w, tally):
        p = _eq43(f, lam, w)
        a = _expect(w, lam)
        _flag_penalty_domain(f, lam - a[..., None], tally)
        if modulus is not None:
            ref = _expect(w, f(lam)) - modulus * _mean_var(lam, w)[1]
            scale = np.maximum(1.0, np.maximum(np.abs(ref), np.abs(p.rhs)))
            gap[0] = max(gap[0], float(np.max(np.abs(ref - p.rhs) / scale)))
        return [(p.lhs, p.rhs)]

    tally = _run("eq43", f.id, box, dims, trials, rng_seed, tol, per_matrix, links, domain_of=f)
    tally.extras.setdefault("penalty_domain_flags", 0)
    if modulus is not None:
        tally.extras["max_rel_gap_vs_theorem33"] = gap[0]
    return tally.report()


def check_theorem41(f: FStronglyConvexFunction, trials: int, rng_seed: int = 0,
                    tol: ToleranceConfig | None = None, dims=DEFAULT_DIMS,
                    per_matrix: int = VECTORS_PER_MATRIX, box=None) -> VerificationReport:
    _require_subunit_hypotheses(f)
    box = box or f.operator_box()

    def links(lam, w, tally):
        b = _expect(w, lam) / np.sum(w, axis=-1)
        _flag_penalty_domain(f, lam - b[..., None], tally)
        p = _theorem41(f, lam, w)
        return [(p.lhs, p.rhs)]

    tally = _run("theorem41", f.id, box, dims, trials, rng_seed, tol, per_matrix, links,
                 subunit=True, domain_of=f)
    tally.extras.setdefault("penalty_domain_flags", 0)
    return tally.report()


# -- numerical core checks ------------------------------------------------------

EIGH_RESIDUAL = 1e-10
CALCULUS_TOL = 1e-9


def _hard(tol: ToleranceConfig | None) -> ToleranceConfig:
    """Fixed-bound checks compare against their own thresholds, with no slack."""
    return ToleranceConfig(0.0, 0.0, (tol or DEFAULT_TOLERANCE).equality_eps)


def _split(trials, dims):
    base, extra = divmod(trials, len(dims))
    return [(d, base + (i < extra)) for i, d in enumerate(dims) if base + (i < extra)]


def _goe(dim, count, rng):
    g = rng.standard_normal((count, dim, dim))
    return 0.5 * (g + np.swapaxes(g, -1, -2))


def eigh_residuals(a, lam, q):
    """``(reconstruction, orthonormality)`` residuals, the first relative to ``max|A|``."""
    a = np.asarray(a)
    recon = (q * lam[..., None, :]) @ np.swapaxes(q, -1, -2) - a
    scale = np.maximum(1.0, np.abs(a).max(axis=(-2, -1)))
    eye = np.eye(a.shape[-1])
    orth = np.abs(np.swapaxes(q, -1, -2) @ q - eye).max(axis=(-2, -1))
    return np.abs(recon).max(axis=(-2, -1)) / scale, orth


def check_eigh(trials: int, rng_seed: int = 0, tol: ToleranceConfig | None = None,
               dims=DEFAULT_DIMS) -> VerificationReport:
    """Residuals ``<= 1e-10`` and ascending order on random symmetric matrices."""
    rng = make_rng(rng_seed, "eigh")
    tally = Tally("eigh", "", rng_seed, _hard(tol), {"dims": list(dims), "bound": EIGH_RESIDUAL})
    worst = [0.0, 0.0]
    for dim, count in _split(trials, dims):
        a = _goe(dim, count, rng)
        lam, q = jacobi_eigh(a)
        recon, orth = eigh_residuals(a, lam, q)
        worst = [max(worst[0], float(recon.max())), max(worst[1], float(orth.max()))]
        order = np.min(np.diff(lam, axis=-1), axis=-1, initial=0.0)
        bound = np.full(count, EIGH_RESIDUAL)
        tally.add([(recon, bound), (orth, bound), (np.zeros(count), order)], {"dim": dim})
    tally.extras.update(max_reconstruction=worst[0], max_orthonormality=worst[1])
    return tally.report()


def check_apply_function(trials: int, rng_seed: int = 0, tol: ToleranceConfig | None = None,
                         dims=DEFAULT_DIMS) -> VerificationReport:
    """Functional calculus agrees with polynomial arithmetic and is multiplicative.

    Links per matrix: ``max|f(A) - A A| <= 1e-9`` for ``f(t) = t^2``,
    ``max|id(A) - A| <= 1e-9`` and
    ``max|(exp cos)(A) - exp(A) cos(A)| <= 1e-9``, spectra in ``[-1, 1]``.
    """
    rng = make_rng(rng_seed, "apply_function")
    tally = Tally("apply_function", "", rng_seed, _hard(tol), {"dims": list(dims), "bound": CALCULUS_TOL})
    worst = 0.0
    for dim, count in _split(trials, dims):
        a = sample_spectrum_matrices(-1.0, 1.0, dim, count, rng)
        sq = np.abs(apply_function(a, np.square) - a @ a).max(axis=(-2, -1))
        spec = jacobi_eigh(a)
        ident = np.abs(apply_function(a, lambda t: t, spectrum=spec) - a).max(axis=(-2, -1))
        prod = apply_function(a, lambda t: np.exp(t) * np.cos(t), spectrum=spec)
        hom = np.abs(prod - apply_function(a, np.exp, spectrum=spec)
                     @ apply_function(a, np.cos, spectrum=spec)).max(axis=(-2, -1))
        worst = max(worst, float(max(sq.max(), ident.max(), hom.max())))
        bound = np.full(count, CALCULUS_TOL)
        tally.add([(sq, bound), (ident, bound), (hom, bound)], {"dim": dim})
    tally.extras["max_entry_error"] = worst
    return tally.report()


def check_quadratic_form(trials: int, rng_seed: int = 0, tol: ToleranceConfig | None = None,
                         dims=DEFAULT_DIMS) -> VerificationReport:
    """Direct ``x^T A x`` matches the spectral sum, the variance is ``>= -1e-12 scale``
    and eigenvectors return their eigenvalue."""
    rng = make_rng(rng_seed, "quadratic_form")
    tally = Tally("quadratic_form", "", rng_seed, tol, {"dims": list(dims)})
    for dim, count in _split(trials, dims):
        a = _goe(dim, count, rng) * 10.0
        lam, q = jacobi_eigh(a)
        x = unit_vector_batch(dim, count, rng)
        k = max(1, count // 100)
        cols = rng.integers(0, dim, k)
        x[:k] = q[np.arange(k), :, cols]
        direct = quadratic_form(a, x)
        w = spectral_weights(q, x)
        spectral, var = _mean_var(lam, w)
        scale = np.maximum(1.0, np.abs(lam).max(axis=-1)) ** 2
        raw_var = np.einsum("bi,bij,bjk,bk->b", x, a, a, x) - direct ** 2
        eig = direct.copy()
        eig[:k] = lam[np.arange(k), cols]
        tally.add([(direct, spectral), (spectral, direct),
                   (-1e-12 * scale, raw_var), (np.zeros(count), var),
                   (direct, eig), (eig, direct)], {"dim": dim, "x": x})
    return tally.report()


def check_sample_hermitian(trials: int, rng_seed: int = 0, tol: ToleranceConfig | None = None,
                           dims=DEFAULT_DIMS, box=None) -> VerificationReport:
    """Sampled spectra stay in the box after an eigensolver round trip
    (within 1e-9) and the sampler is deterministic."""
    box = box or POSITIVE_BOX
    lo, hi = box
    tally = Tally("sample_hermitian", "", rng_seed, _hard(tol), {"dims": list(dims), "box": list(box)})
    for dim, count in _split(trials, dims):
        rng = make_rng(rng_seed, "sample_hermitian_check", str(dim))
        a = sample_spectrum_matrices(lo, hi, dim, count, rng)
        again = sample_spectrum_matrices(lo, hi, dim, count,
                                         make_rng(rng_seed, "sample_hermitian_check", str(dim)))
        lam, _ = jacobi_eigh(a)
        same = np.all(a == again, axis=(-2, -1)).astype(float)
        asym = np.abs(a - np.swapaxes(a, -1, -2)).max(axis=(-2, -1))
        tally.add([(lo - 1e-9, lam.min(axis=-1)), (lam.max(axis=-1), hi + 1e-9),
                   (np.ones(count), same), (asym, np.zeros(count))], {"dim": dim})
    spec = SpectrumSpec(Interval(lo, hi), 3)
    tally.extras["single_draw_deterministic"] = bool(
        np.array_equal(sample_hermitian(spec, rng_seed).entries, sample_hermitian(spec, rng_seed).entries))
    return tally.report()
