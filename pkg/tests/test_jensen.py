import math
from fractions import Fraction as Fr

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from strongconvex import funcs, jensen
from strongconvex.errors import DomainError, PreconditionError
from strongconvex.tolerance import ToleranceConfig

TOL = ToleranceConfig()
CATALOG_IDS = ["neg_log", "pow_r:3", "neg_pow_r:0.5", "quad:1"]


def _jensen_oracle(f, x, p):
    xbar = math.fsum(pi * xi for pi, xi in zip(p, x))
    return math.fsum(pi * f(xi) for pi, xi in zip(p, x)) - f(xbar)


def test_quad_example():
    assert jensen.jensen_functional(funcs.quad(1), [0, 2], [0.5, 0.5]) == 1.0


def test_constant_points_give_zero():
    for spec in CATALOG_IDS:
        f = funcs.by_id(spec)
        a = f.sample_box()[1]
        assert jensen.jensen_functional(f, [a, a, a], [0.2, 0.3, 0.5]) == pytest.approx(0.0, abs=1e-15)


def test_neg_log_example():
    val = jensen.jensen_functional(funcs.neg_log(), [0.5, 1.0], [0.5, 0.5])
    assert val == pytest.approx(0.5 * math.log(2) + math.log(0.75), abs=1e-15)
    assert val == pytest.approx(0.058891, abs=1e-6)


def test_lemma21_examples():
    assert jensen.lemma21_lower_bound(funcs.quad(1), [0, 2], [0.5, 0.5]) == (1.0, 1.0)
    lhs, rhs = jensen.lemma21_lower_bound(funcs.neg_log(), [0.5, 1.0], [0.5, 0.5])
    assert lhs == 0.03125 and rhs == pytest.approx(0.058891, abs=1e-6)
    assert jensen.lemma21_lower_bound(funcs.neg_log(), [0.3, 0.3], [0.5, 0.5]) == (0.0, 0.0)


def test_lemma21_needs_positive_weights():
    with pytest.raises(PreconditionError):
        jensen.lemma21_lower_bound(funcs.quad(1), [0, 2], [0.0, 1.0])


def _theorem22_oracle(c, x, p, q):
    """Exact rational evaluation of the two-sided bound for f = c t^2."""
    f = lambda t: c * t * t
    def J(w):
        xb = sum(wi * xi for wi, xi in zip(w, x))
        return sum(wi * f(xi) for wi, xi in zip(w, x)) - f(xb)
    ratios = [pi / qi for pi, qi in zip(p, q)]
    m, M = min(ratios), max(ratios)
    xp = sum(pi * xi for pi, xi in zip(p, x))
    xq = sum(qi * xi for qi, xi in zip(q, x))
    shift = sum((pi - qi) * xi for pi, qi, xi in zip(p, q, x)) ** 2
    lower = m * J(q) + c * (sum((pi - m * qi) * (xi - xp) ** 2 for pi, qi, xi in zip(p, q, x)) + m * shift)
    upper = M * J(q) - c * (sum((M * qi - pi) * (xi - xq) ** 2 for pi, qi, xi in zip(p, q, x)) + shift)
    return lower, J(p), upper, m, M


def test_theorem22_quad_example():
    got = jensen.theorem22_bounds(funcs.quad(1), [0, 2], [0.75, 0.25], [0.5, 0.5])
    want = _theorem22_oracle(Fr(1), [Fr(0), Fr(2)], [Fr(3, 4), Fr(1, 4)], [Fr(1, 2), Fr(1, 2)])
    assert tuple(got) == tuple(float(v) for v in want) == (0.75, 0.75, 0.75, 0.5, 1.5)


@given(st.lists(st.integers(-20, 20), min_size=2, max_size=6), st.data())
def test_theorem22_matches_rational_oracle_on_quadratics(xs, data):
    n = len(xs)
    pw = data.draw(st.lists(st.integers(1, 20), min_size=n, max_size=n))
    qw = data.draw(st.lists(st.integers(1, 20), min_size=n, max_size=n))
    p = [Fr(v, sum(pw)) for v in pw]
    q = [Fr(v, sum(qw)) for v in qw]
    want = _theorem22_oracle(Fr(2), [Fr(v) for v in xs], p, q)
    got = jensen.theorem22_bounds(funcs.quad(2), np.array(xs, float), np.array(p, float), np.array(q, float))
    scale = max(1.0, max(abs(float(v)) for v in want))
    for g, w in zip(got, want):
        assert abs(g - float(w)) <= 1e-12 * scale


def test_theorem22_p_equals_q_collapses():
    f = funcs.neg_log()
    x, p = [0.2, 0.5, 0.9], [0.2, 0.3, 0.5]
    b = jensen.theorem22_bounds(f, x, p, p)
    j = jensen.jensen_functional(f, x, p)
    assert (b.m, b.M) == (1.0, 1.0)
    assert b.lower == pytest.approx(j, abs=1e-15) and b.upper == pytest.approx(j, abs=1e-15)


def test_theorem22_single_point():
    assert tuple(jensen.theorem22_bounds(funcs.neg_log(), [0.4], [1.0], [1.0]))[:3] == (0.0, 0.0, 0.0)


def test_theorem22_rejects_zero_q():
    with pytest.raises(PreconditionError):
        jensen.theorem22_bounds(funcs.quad(1), [0, 1], [0.5, 0.5], [0.0, 1.0])


def test_input_validation():
    with pytest.raises(DomainError):
        jensen.jensen_functional(funcs.neg_log(), [0.0, 1.0], [0.5, 0.5])
    with pytest.raises(DomainError):
        jensen.jensen_functional(funcs.quad(1), [0, 1], [0.5, 0.6])
    with pytest.raises(PreconditionError):
        jensen.jensen_functional(funcs.quad(1), [0, 1, 2], [0.5, 0.5])


def test_batched_matches_single():
    f = funcs.pow_r(3)
    rng = np.random.default_rng(0)
    x = rng.uniform(1.1, 5, (20, 4))
    p = rng.dirichlet(np.ones(4), 20)
    batch = jensen.jensen_functional(f, x, p)
    for i in range(20):
        assert batch[i] == pytest.approx(_jensen_oracle(f, x[i], p[i]), rel=1e-12)


@pytest.mark.parametrize("spec", CATALOG_IDS)
def test_property_checks_pass(spec):
    f = funcs.by_id(spec)
    for check in (jensen.check_jensen_functional, jensen.check_lemma21, jensen.check_theorem22):
        assert check(f, 10_000, rng_seed=1).violations == 0


def test_large_values_need_no_absolute_slack():
    # constant points near 1e2 put f around 1e6, where J carries ~1e-10 rounding
    f = funcs.by_id("pow_r:3")
    tol = ToleranceConfig(tol_abs=0.0)
    for check in (jensen.check_jensen_functional, jensen.check_lemma21):
        rep = check(f, 20_000, rng_seed=3, tol=tol)
        assert rep.violations == 0
        assert rep.equality_hits > 0


def test_quadratic_equality_certificate():
    rng = np.random.default_rng(5)
    f = funcs.quad(1.7)
    x = rng.uniform(-1, 1, (1000, 5))
    p = rng.dirichlet(np.ones(5), 1000)
    gap = np.asarray(jensen.jensen_functional(f, x, p)) - 1.7 * np.asarray(jensen.weighted_variance(x, p))
    assert np.max(np.abs(gap)) <= 1e-12


def test_theorem22_records_skipped_classical_draws():
    rep = jensen.check_theorem22(funcs.neg_log(), 2000, rng_seed=3)
    assert rep.extras["negative_correction_draws"] >= 0


@pytest.mark.parametrize("spec", CATALOG_IDS)
@given(u=st.lists(st.floats(0, 1), min_size=1, max_size=8), seed=st.integers(0, 1000))
def test_jensen_nonnegative_and_lemma21_property(spec, u, seed):
    f = funcs.by_id(spec)
    lo, hi = f.sample_box()
    x = lo + np.array(u) * (hi - lo)
    p = np.random.default_rng(seed).dirichlet(np.ones(len(u)))
    p = p / p.sum()
    j = jensen.jensen_functional(f, x, p)
    assert TOL.holds(0.0, j)
    if np.all(p > 0):
        lhs, rhs = jensen.lemma21_lower_bound(f, x, p)
        assert TOL.holds(lhs, rhs)
