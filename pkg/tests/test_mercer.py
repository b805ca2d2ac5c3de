import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from strongconvex import funcs, mercer
from strongconvex.errors import DomainError, PreconditionError
from strongconvex.tolerance import ToleranceConfig

TOL = ToleranceConfig()


def test_lambdas_examples():
    assert mercer.lambdas_of([1, 2, 4]) == pytest.approx([1, 2 / 3, 0])
    assert mercer.lambdas_of([3, 3, 3]).tolist() == [0, 0, 0]


@given(st.lists(st.floats(-1e3, 1e3), min_size=1, max_size=10))
def test_lambdas_reconstruct_points(xs):
    x = np.array(xs)
    lam = mercer.lambdas_of(x)
    assert np.all((lam >= 0) & (lam <= 1))
    if x.max() > x.min():
        rec = lam * x.min() + (1 - lam) * x.max()
        assert np.allclose(rec, x, rtol=0, atol=1e-9 * max(1, np.abs(x).max()))
        refl = x.min() + x.max() - x
        assert np.all(refl >= x.min() - 1e-9 * max(1, np.abs(x).max()))
        assert np.all(refl <= x.max() + 1e-9 * max(1, np.abs(x).max()))


def test_lemma26_endpoint_equality():
    f = funcs.neg_log()
    x = [0.25, 0.5, 1.0]
    lhs, rhs = mercer.lemma26_bound(f, x, 0)
    assert lhs == pytest.approx(rhs, abs=1e-15) and lhs == pytest.approx(f(1.0), abs=1e-15)


def test_lemma26_quad_example():
    assert mercer.lemma26_bound(funcs.quad(1), [1, 2, 3], 1) == (4.0, 4.0)


def test_lemma26_neg_log_example():
    lhs, rhs = mercer.lemma26_bound(funcs.neg_log(), [0.25, 0.5, 1.0], 1)
    lam = (1 - 0.5) / (1 - 0.25)
    want = -math.log(0.25) - math.log(1.0) + math.log(0.5) - 2 * 0.5 * lam * (1 - lam) * 0.75 ** 2
    assert lhs == pytest.approx(-math.log(0.75), abs=1e-12) and lhs == pytest.approx(0.287682, abs=1e-6)
    assert rhs == pytest.approx(want, abs=1e-14)
    assert lhs <= rhs


def test_lemma26_index_checked():
    with pytest.raises(PreconditionError):
        mercer.lemma26_bound(funcs.quad(1), [1, 2], 2)


def test_theorem27_quad_example():
    b = mercer.theorem27_bound(funcs.quad(1), [1, 2, 3], [1 / 3] * 3)
    assert b.lhs == pytest.approx(4.0, abs=1e-12)
    assert b.refined_rhs == pytest.approx(4.0, abs=1e-12)
    assert b.plain_rhs == pytest.approx(16 / 3, abs=1e-12)


def test_theorem27_constant_points():
    f = funcs.neg_log()
    b = mercer.theorem27_bound(f, [0.4] * 3, [0.2, 0.3, 0.5])
    assert b.lhs == b.refined_rhs == pytest.approx(f(0.4), abs=1e-15)


def _theorem27_oracle(f, x, p):
    lo, hi = min(x), max(x)
    xbar = math.fsum(pi * xi for pi, xi in zip(p, x))
    lam = [(hi - xi) / (hi - lo) for xi in x]
    spread = 2 * math.fsum(pi * li * (1 - li) for pi, li in zip(p, lam)) * (lo - hi) ** 2
    var = math.fsum(pi * (xi - xbar) ** 2 for pi, xi in zip(p, x))
    plain = f(lo) + f(hi) - math.fsum(pi * f(xi) for pi, xi in zip(p, x))
    return f(lo + hi - xbar), plain - f.modulus * (spread + var), plain


def test_theorem27_neg_log_against_oracle():
    f = funcs.neg_log()
    x, p = [0.25, 0.5, 1.0], [0.2, 0.3, 0.5]
    got = mercer.theorem27_bound(f, x, p)
    want = _theorem27_oracle(f, x, p)
    assert got == pytest.approx(want, abs=1e-14)
    assert got.lhs <= got.refined_rhs <= got.plain_rhs


def test_means_chain_examples():
    assert mercer.means_chain([0.3] * 4, [0.25] * 4) == pytest.approx((0.3, 0.3, 0.3), abs=1e-15)
    g, mid, a = mercer.means_chain([0.5, 1.0], [0.5, 0.5])
    assert g == pytest.approx(0.5 / math.sqrt(0.5), abs=1e-15)
    assert mid == pytest.approx(math.exp(0.0625 / 2) * g, abs=1e-15)
    assert a == 0.75
    g, mid, a = mercer.means_chain([0.25, 0.5, 1.0], [1 / 3] * 3)
    assert g <= mid <= a


def test_means_chain_domain():
    with pytest.raises(DomainError):
        mercer.means_chain([0.5, 1.5], [0.5, 0.5])


def test_reflected_barycenter_outside_domain():
    f = funcs.pow_r(3)
    # points in (1, inf) keep the reflection inside; check the guard fires for a narrow domain
    narrow = funcs.StronglyConvexFunction(id="n", domain=funcs.Interval(0.0, 1.0), eval=np.square,
                                          modulus=1.0)
    assert mercer.theorem27_bound(narrow, [0.0, 1.0], [0.5, 0.5]).lhs == 0.25
    assert mercer.theorem27_bound(f, [2.0, 3.0], [0.5, 0.5]).lhs == 2.5 ** 3


@pytest.mark.parametrize("spec", ["neg_log", "pow_r:3", "neg_pow_r:0.5", "quad:1"])
def test_property_checks_pass(spec):
    f = funcs.by_id(spec)
    assert mercer.check_lemma26(f, 10_000, rng_seed=2).violations == 0
    assert mercer.check_theorem27(f, 10_000, rng_seed=2).violations == 0


def test_means_and_lambdas_checks_pass():
    assert mercer.check_means_chain(10_000, rng_seed=4).violations == 0
    assert mercer.check_lambdas(10_000, rng_seed=4).violations == 0


def test_quadratic_tightness():
    rng = np.random.default_rng(8)
    f = funcs.quad(0.7)
    x = rng.uniform(-3, 3, (1000, 6))
    p = rng.dirichlet(np.ones(6), 1000)
    b = mercer.theorem27_bound(f, x, p)
    assert np.max(np.abs(b.lhs - b.refined_rhs)) <= 1e-12 * 10


@given(st.lists(st.floats(1e-3, 1.0), min_size=2, max_size=8), st.integers(0, 1000))
def test_theorem27_neg_log_property(xs, seed):
    f = funcs.neg_log()
    p = np.random.default_rng(seed).dirichlet(np.ones(len(xs)))
    b = mercer.theorem27_bound(f, xs, p / p.sum())
    assert TOL.holds(b.lhs, b.refined_rhs) and TOL.holds(b.refined_rhs, b.plain_rhs)
    g, mid, a = mercer.means_chain(xs, p / p.sum())
    assert TOL.holds(g, mid) and TOL.holds(mid, a)
