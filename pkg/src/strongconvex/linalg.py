"""Finite-dimensional operator model: symmetric matrices and functional calculus.

Every routine accepts either a single ``(n, n)`` matrix or a stack of shape
``(batch, n, n)``; stacks are what the verification runner feeds in, so the
eigensolver rotates a whole batch of matrices in lockstep.
"""
from __future__ import annotations

import functools
import io
from pathlib import Path
from typing import Callable

import numpy as np

from .errors import DomainError, PreconditionError, SpectrumError

SYMMETRY_RTOL = 1e-14


def _check_symmetric(a: np.ndarray) -> None:
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        raise PreconditionError(f"expected square matrices, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise PreconditionError("matrix has non-finite entries")
    at = np.swapaxes(a, -1, -2)
    bound = SYMMETRY_RTOL * np.maximum(1.0, np.abs(a))
    if np.any(np.abs(a - at) > bound):
        raise PreconditionError("matrix is not symmetric")


def _round_robin_layouts(m: int) -> list[np.ndarray]:
    """Orderings of ``range(m)`` (``m`` even) for one cyclic sweep.

    In each layout the pairs sit at positions (0, 1), (2, 3), ...; over the
    ``m - 1`` layouts every unordered pair occurs exactly once (the classic
    round-robin tournament schedule).
    """
    players = list(range(m))
    layouts = []
    for _ in range(m - 1):
        layout = []
        for i in range(m // 2):
            layout += [players[i], players[m - 1 - i]]
        layouts.append(np.array(layout))
        players = [players[0], players[-1]] + players[1:-1]
    return layouts


def _sweep(a: np.ndarray, v: np.ndarray, layouts, cur: np.ndarray):
    """One Jacobi sweep; ``cur`` maps storage positions to original indices."""
    ev = slice(0, None, 2)
    od = slice(1, None, 2)
    half = a.shape[-1] // 2
    pos_e = np.arange(0, 2 * half, 2)
    pos_o = pos_e + 1
    for layout in layouts:
        where = np.empty_like(cur)
        where[cur] = np.arange(cur.size)
        perm = where[layout]
        if not np.array_equal(perm, np.arange(perm.size)):
            a = a[:, perm[:, None], perm[None, :]]
            v = v[:, :, perm]
            cur = layout
        apq = a[:, pos_e, pos_o]
        nz = apq != 0.0
        theta = np.divide(a[:, pos_o, pos_o] - a[:, pos_e, pos_e], 2.0 * apq,
                          out=np.zeros_like(apq), where=nz)
        t = np.copysign(1.0, theta) / (np.abs(theta) + np.hypot(theta, 1.0))
        t[~nz] = 0.0
        c = 1.0 / np.sqrt(t * t + 1.0)
        s = t * c
        cc = c[:, None, :]
        ss = s[:, None, :]
        for m in (a, v):
            xe = m[:, :, ev].copy()
            xo = m[:, :, od]
            m[:, :, ev] = cc * xe - ss * xo
            m[:, :, od] = ss * xe + cc * xo
        cc = c[:, :, None]
        ss = s[:, :, None]
        xe = a[:, ev, :].copy()
        xo = a[:, od, :]
        a[:, ev, :] = cc * xe - ss * xo
        a[:, od, :] = ss * xe + cc * xo
        a[:, pos_e, pos_o] = 0.0
        a[:, pos_o, pos_e] = 0.0
    return a, v, cur


def jacobi_eigh(a, tol: float = 1e-13, max_sweeps: int = 100):
    """Cyclic Jacobi eigendecomposition of real symmetric matrices.

    Pairs are visited in round-robin order: the rotations within one round
    act on disjoint index pairs, commute, and are applied together.  Sweeps
    stop once the off-diagonal Frobenius norm of every matrix is at most
    ``tol * ||A||_F``.

    Parameters
    ----------
    a : array_like, shape (n, n) or (batch, n, n)
    tol : float
        Relative off-diagonal stopping threshold.
    max_sweeps : int

    Returns
    -------
    eigenvalues : ndarray, shape (..., n), ascending
    eigenvectors : ndarray, shape (..., n, n), eigenvectors in columns
    """
    a = np.array(a, dtype=float)
    _check_symmetric(a)
    single = a.ndim == 2
    if single:
        a = a[None]
    a = 0.5 * (a + np.swapaxes(a, -1, -2))
    batch, n, _ = a.shape
    # odd sizes get a decoupled zero row/column that no rotation ever touches
    m = n + (n % 2)
    if m != n:
        a = np.pad(a, ((0, 0), (0, 1), (0, 1)))
    v = np.broadcast_to(np.eye(m), a.shape).copy()
    layouts = _round_robin_layouts(m)
    scale = np.sqrt(np.einsum("bij,bij->b", a, a))
    offmask = ~np.eye(m, dtype=bool)
    cur = np.arange(m)

    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(a[:, offmask] ** 2, axis=1))
        active = np.nonzero(off > tol * scale)[0]
        if active.size == 0:
            break
        if active.size == batch:
            a, v, cur = _sweep(a, v, layouts, cur)
        else:
            sub_a, sub_v, new_cur = _sweep(a[active], v[active], layouts, cur)
            where = np.empty_like(cur)
            where[cur] = np.arange(m)
            perm = where[new_cur]
            a = a[:, perm[:, None], perm[None, :]]
            v = v[:, :, perm]
            a[active] = sub_a
            v[active] = sub_v
            cur = new_cur

    # back to the original index order, then drop the padding
    where = np.empty_like(cur)
    where[cur] = np.arange(m)
    a = a[:, where[:, None], where[None, :]]
    v = v[:, :, where]
    w = np.diagonal(a, axis1=1, axis2=2)[:, :n].copy()
    v = v[:, :n, :n]
    order = np.argsort(w, axis=1, kind="stable")
    w = np.take_along_axis(w, order, axis=1)
    v = np.take_along_axis(v, order[:, None, :], axis=2)
    if single:
        return w[0], v[0]
    return w, v


class HermitianMatrix:
    """Real symmetric matrix with a lazily computed, cached spectral decomposition.

    The entries are copied and frozen on construction, so the cache can never
    go stale and instances can be shared between threads once
    :attr:`spectrum` has been touched.
    """

    def __init__(self, entries):
        a = np.array(entries, dtype=float)
        if a.ndim != 2:
            raise PreconditionError("HermitianMatrix needs a 2-D array")
        _check_symmetric(a)
        a.setflags(write=False)
        self._entries = a

    @property
    def entries(self) -> np.ndarray:
        return self._entries

    @property
    def dim(self) -> int:
        return self._entries.shape[0]

    @functools.cached_property
    def spectrum(self) -> tuple[np.ndarray, np.ndarray]:
        w, q = jacobi_eigh(self._entries)
        w.setflags(write=False)
        q.setflags(write=False)
        return w, q

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.spectrum[0]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self._entries, dtype=dtype)

    def __repr__(self) -> str:
        return f"HermitianMatrix(dim={self.dim})"

    @classmethod
    def from_spectrum(cls, eigenvalues, q) -> "HermitianMatrix":
        """Build ``Q diag(eigenvalues) Q^T``, symmetrised against round-off."""
        a = (q * np.asarray(eigenvalues, dtype=float)) @ q.T
        return cls(0.5 * (a + a.T))


def _as_stack(a):
    if isinstance(a, HermitianMatrix):
        return a.entries
    return np.asarray(a, dtype=float)


def eigh(a):
    """Ascending eigenvalues and orthonormal eigenvectors (columns).

    Uses the cached decomposition when given a :class:`HermitianMatrix`.
    """
    if isinstance(a, HermitianMatrix):
        return a.spectrum
    return jacobi_eigh(a)


def check_spectrum(eigenvalues, contains: Callable[[np.ndarray], np.ndarray],
                   what: str = "function domain") -> None:
    inside = contains(np.asarray(eigenvalues))
    if not np.all(inside):
        bad = np.asarray(eigenvalues)[~np.asarray(inside)]
        raise SpectrumError(f"eigenvalue(s) {bad[:3].tolist()} outside {what}")


def apply_function(a, f: Callable[[np.ndarray], np.ndarray],
                   contains: Callable[[np.ndarray], np.ndarray] | None = None, spectrum=None):
    """Functional calculus ``f(A) = Q diag(f(lambda)) Q^T``.

    ``f`` must act elementwise on arrays.  When ``contains`` is given it is
    used to reject spectra that leave the domain of ``f``.  ``spectrum`` may
    carry a precomputed ``(eigenvalues, eigenvectors)`` pair for ``a``.
    """
    w, q = spectrum if spectrum is not None else eigh(a)
    if contains is not None:
        check_spectrum(w, contains)
    fw = np.asarray(f(w), dtype=float)
    if not np.all(np.isfinite(fw)):
        raise SpectrumError("f is not finite on the spectrum")
    out = (q * fw[..., None, :]) @ np.swapaxes(q, -1, -2)
    out = 0.5 * (out + np.swapaxes(out, -1, -2))
    if isinstance(a, HermitianMatrix):
        return HermitianMatrix(out)
    return out


def quadratic_form(a, x) -> float | np.ndarray:
    """``<Ax, x>`` evaluated directly from the entries."""
    m = _as_stack(a)
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != m.shape[-1]:
        raise PreconditionError(f"dimension mismatch: matrix {m.shape[-1]}, vector {x.shape[-1]}")
    val = np.einsum("...i,...ij,...j->...", x, m, x)
    return float(val) if np.ndim(val) == 0 else val


def spectral_weights(q: np.ndarray, x) -> np.ndarray:
    """Weights ``(Q^T x)_k^2`` of the spectral measure of ``A`` at ``x``.

    With these, ``<g(A)x, x> = sum_k g(lambda_k) w_k`` for any ``g``; the
    weights sum to ``||x||^2``.
    """
    x = np.asarray(x, dtype=float)
    coords = np.einsum("...ji,...j->...i", q, x)
    return coords * coords


def random_orthogonal(dim: int, rng: np.random.Generator, batch: int | None = None) -> np.ndarray:
    """Random orthogonal matrix as a product of ``dim`` Householder reflections.

    Each reflection ``I - 2 v v^T / v^T v`` uses a Gaussian direction ``v``.
    """
    shape = (1 if batch is None else batch, dim)
    q = np.broadcast_to(np.eye(dim), (shape[0], dim, dim)).copy()
    for _ in range(dim):
        v = rng.standard_normal(shape)
        v /= np.linalg.norm(v, axis=1, keepdims=True)
        qv = np.einsum("bij,bj->bi", q, v)
        q -= 2.0 * qv[:, :, None] * v[:, None, :]
    return q[0] if batch is None else q


def sample_spectrum_matrices(lo: float, hi: float, dim: int, count: int,
                             rng: np.random.Generator) -> np.ndarray:
    """Stack of ``count`` symmetric matrices with eigenvalues uniform on [lo, hi]."""
    if dim < 1:
        raise PreconditionError("dim must be >= 1")
    if not (np.isfinite(lo) and np.isfinite(hi)) or lo > hi:
        raise DomainError(f"empty or unbounded sampling box [{lo}, {hi}]")
    d = rng.uniform(lo, hi, size=(count, dim))
    q = random_orthogonal(dim, rng, batch=count)
    a = (q * d[:, None, :]) @ np.swapaxes(q, -1, -2)
    return 0.5 * (a + np.swapaxes(a, -1, -2))


def write_matrix(a, path=None) -> str:
    """Plain-text export: a ``dim`` header line, then one row per line."""
    m = _as_stack(a)
    if m.ndim != 2:
        raise PreconditionError("only single matrices can be exported")
    buf = io.StringIO()
    buf.write(f"{m.shape[0]}\n")
    for row in m:
        buf.write(" ".join(format(float(v), ".17g") for v in row) + "\n")
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text


def read_matrix(source) -> HermitianMatrix:
    """Inverse of :func:`write_matrix`; accepts a path or the text itself."""
    if isinstance(source, Path) or (isinstance(source, str) and "\n" not in source):
        text = Path(source).read_text()
    else:
        text = source
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise PreconditionError("empty matrix file")
    try:
        dim = int(lines[0].strip())
        rows = [[float(tok) for tok in ln.split()] for ln in lines[1:]]
    except ValueError as exc:
        raise PreconditionError(f"malformed matrix file: {exc}") from None
    if len(rows) != dim or any(len(r) != dim for r in rows):
        raise PreconditionError(f"expected {dim} rows of {dim} values")
    return HermitianMatrix(rows)
