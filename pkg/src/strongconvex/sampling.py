"""Seeded random streams and the samplers that realise the theorems' hypotheses."""
from __future__ import annotations

import zlib

import numpy as np

from .errors import PreconditionError

MIN_POSITIVE_WEIGHT = 1e-6


def make_rng(seed: int, *keys: str) -> np.random.Generator:
    """Independent PCG64 stream for ``(seed, *keys)``.

    Keys are hashed with CRC-32 so a check's stream does not depend on which
    other checks ran before it.
    """
    entropy = [int(seed) & 0xFFFFFFFFFFFFFFFF] + [zlib.crc32(k.encode()) for k in keys]
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))


def weight_batch(n: int, count: int, rng: np.random.Generator,
                 strictly_positive: bool = False) -> np.ndarray:
    """``count`` weight vectors uniform on the simplex, shape ``(count, n)``.

    Normalised exponential draws; with ``strictly_positive`` every row whose
    smallest weight is below ``1e-6`` is redrawn.
    """
    if n < 1:
        raise PreconditionError("n must be >= 1")
    p = rng.exponential(size=(count, n))
    p /= p.sum(axis=1, keepdims=True)
    if strictly_positive:
        bad = p.min(axis=1) < MIN_POSITIVE_WEIGHT
        while bad.any():
            fresh = rng.exponential(size=(int(bad.sum()), n))
            p[bad] = fresh / fresh.sum(axis=1, keepdims=True)
            bad = p.min(axis=1) < MIN_POSITIVE_WEIGHT
    return p


def unit_vector_batch(dim: int, count: int, rng: np.random.Generator,
                      subunit: bool = False) -> np.ndarray:
    """Gaussian directions normalised to length 1, shape ``(count, dim)``.

    With ``subunit`` each vector is then scaled by ``s`` uniform on ``(0, 1]``.
    """
    if dim < 1:
        raise PreconditionError("dim must be >= 1")
    x = rng.standard_normal((count, dim))
    norms = np.linalg.norm(x, axis=1, keepdims=True)
    while np.any(norms == 0):
        zero = norms[:, 0] == 0
        x[zero] = rng.standard_normal((int(zero.sum()), dim))
        norms = np.linalg.norm(x, axis=1, keepdims=True)
    x /= norms
    if subunit:
        s = 1.0 - rng.uniform(0.0, 1.0, size=(count, 1))
        x *= s
    return x


def sample_weights(n: int, strictly_positive: bool, rng: np.random.Generator):
    """One :class:`~strongconvex.vectors.WeightVector`."""
    from .vectors import WeightVector

    return WeightVector(weight_batch(n, 1, rng, strictly_positive)[0])


def sample_unit_vector(dim: int, subunit: bool, rng: np.random.Generator):
    """One :class:`~strongconvex.vectors.UnitVector` (norm 1, or in (0, 1] if ``subunit``)."""
    from .vectors import UnitVector

    return UnitVector(unit_vector_batch(dim, 1, rng, subunit)[0])
