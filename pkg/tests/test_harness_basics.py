import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from strongconvex.errors import ConfigurationError, DomainError
from strongconvex.report import Tally, VerificationReport, emit_report, parse_reports
from strongconvex.sampling import (make_rng, sample_unit_vector, sample_weights, unit_vector_batch,
                                   weight_batch)
from strongconvex.tolerance import ToleranceConfig, close
from strongconvex.vectors import PointVector, UnitVector, WeightVector


# -- tolerance ------------------------------------------------------------------

def test_tolerance_defaults():
    t = ToleranceConfig()
    assert (t.tol_abs, t.tol_rel, t.equality_eps) == (1e-9, 1e-9, 1e-12)


@pytest.mark.parametrize("field", ["tol_abs", "tol_rel", "equality_eps"])
def test_tolerance_rejects_negative(field):
    with pytest.raises(ConfigurationError):
        ToleranceConfig(**{field: -1.0})


def test_tolerance_policy_boundary():
    t = ToleranceConfig(1e-9, 0.0)
    assert t.holds(1.0 + 0.9e-9, 1.0)
    assert not t.holds(1.0 + 2e-9, 1.0)
    r = ToleranceConfig(0.0, 1e-9)
    assert r.holds(1e6 + 1e-4, 1e6)
    assert not r.holds(1e6 + 1e-2, 1e6)


def test_equality_is_scale_aware():
    t = ToleranceConfig()
    assert t.equal(1e6, 1e6 + 1e-7)
    assert not t.equal(1.0, 1.0 + 1e-10)
    assert close(0.0, 1e-13, 1e-12)


# -- vectors --------------------------------------------------------------------

def test_weight_vector_validation():
    assert len(WeightVector([0.25, 0.75])) == 2
    assert not WeightVector([0.0, 1.0]).strictly_positive
    for bad in ([0.5, 0.6], [-0.1, 1.1], [], [math.nan, 1.0]):
        with pytest.raises(DomainError):
            WeightVector(bad)


def test_vectors_are_read_only():
    w = WeightVector([0.5, 0.5])
    with pytest.raises(ValueError):
        w.weights[0] = 1.0


def test_point_vector_domain():
    from strongconvex.funcs import Interval
    PointVector([0.5, 1.0], Interval(0, 1, lo_open=True))
    with pytest.raises(DomainError):
        PointVector([0.0, 1.0], Interval(0, 1, lo_open=True))


def test_unit_vector_norm():
    assert UnitVector([0.6, 0.8]).norm == pytest.approx(1.0)
    assert UnitVector([0.3, 0.4]).dim == 2


# -- sampling -------------------------------------------------------------------

def test_sample_weights_single_point():
    assert sample_weights(1, False, make_rng(0)).weights.tolist() == [1.0]


@given(n=st.integers(1, 40), seed=st.integers(0, 2 ** 32), positive=st.booleans())
def test_sample_weights_sum_to_one(n, seed, positive):
    w = sample_weights(n, positive, make_rng(seed)).weights
    assert abs(w.sum() - 1.0) <= 1e-12
    assert np.all(w >= (1e-6 if positive else 0.0))


def test_sample_weights_reproducible():
    a = sample_weights(5, True, make_rng(7)).weights
    b = sample_weights(5, True, make_rng(7)).weights
    assert np.array_equal(a, b)


def test_strictly_positive_redraw():
    # with n large, raw minima below 1e-6 are common enough to exercise the redraw loop
    p = weight_batch(500, 200, make_rng(1), strictly_positive=True)
    assert p.min() >= 1e-6


def test_unit_vector_dim_one_is_sign():
    assert abs(sample_unit_vector(1, False, make_rng(3)).coords[0]) == pytest.approx(1.0, abs=1e-15)


@given(dim=st.integers(1, 30), seed=st.integers(0, 2 ** 32))
def test_unit_vector_norms(dim, seed):
    x = unit_vector_batch(dim, 50, make_rng(seed))
    assert np.all(np.abs(np.linalg.norm(x, axis=1) - 1.0) <= 1e-12)
    s = np.linalg.norm(unit_vector_batch(dim, 50, make_rng(seed), subunit=True), axis=1)
    assert np.all((s > 0) & (s <= 1.0 + 1e-12))


def test_make_rng_streams_are_keyed():
    a = make_rng(1, "x").random(3)
    assert np.array_equal(a, make_rng(1, "x").random(3))
    assert not np.array_equal(a, make_rng(1, "y").random(3))
    assert not np.array_equal(a, make_rng(2, "x").random(3))


# -- reports --------------------------------------------------------------------

def _tally_report():
    t = Tally("demo", "v", seed=4, config_echo={"box": [0, 1]})
    t.add([(np.array([0.0, 1.0, 2.0]), np.array([0.0, 2.0, 1.0]))], {"x": np.array([1.0, 2.0, 3.0])})
    return t.report()


def test_tally_counts_and_slack():
    r = _tally_report()
    assert (r.trials, r.violations, r.equality_hits) == (3, 1, 1)
    assert r.min_slack == -1.0 and r.max_slack == 1.0 and r.worst_violation == -1.0
    assert r.findings[0]["x"] == 3.0
    assert r.violations <= r.trials and r.min_slack <= r.max_slack
    assert r.config_echo["prng"] == "numpy.random.PCG64"


def test_chain_counts_one_trial_per_draw():
    t = Tally("chain")
    t.chain([np.zeros(4), np.ones(4), 2 * np.ones(4)])
    r = t.report()
    assert r.trials == 4 and r.violations == 0 and r.min_slack == 1.0


def test_nan_counts_as_violation():
    t = Tally("nan")
    t.add([(np.array([math.nan]), np.array([1.0]))])
    assert t.report().violations == 1


def test_empty_report_serialisation():
    assert emit_report([], "json") == b"[]"


def test_csv_has_header_and_one_row():
    assert len(emit_report([_tally_report()], "csv").decode().splitlines()) == 2


@pytest.mark.parametrize("fmt", ["json", "csv"])
def test_round_trip(fmt):
    r = _tally_report()
    assert parse_reports(emit_report([r, r], fmt), fmt) == [r, r]


def test_round_trip_with_infinities():
    r = VerificationReport("x", "", 1, 1, -math.inf, -math.inf, math.inf, 0, 0, {"a": 1.5}, {}, [])
    for fmt in ("json", "csv"):
        assert parse_reports(emit_report([r], fmt), fmt) == [r]


def test_floats_written_with_17_digits():
    t = Tally("d")
    t.add([(0.0, 0.1)])
    assert b"0.10000000000000001" in emit_report([t.report()])


def test_unknown_format_rejected():
    with pytest.raises(ConfigurationError):
        emit_report([], "xml")
    with pytest.raises(ConfigurationError):
        parse_reports("", "xml")


@given(vals=st.lists(st.tuples(st.floats(-1e6, 1e6), st.floats(-1e6, 1e6)), min_size=1, max_size=30))
def test_report_invariants(vals):
    lhs, rhs = map(np.array, zip(*vals))
    t = Tally("p")
    t.add([(lhs, rhs)])
    r = t.report()
    assert 0 <= r.violations <= r.trials == len(vals)
    assert r.min_slack <= r.max_slack
    if r.violations == 0:
        assert r.worst_violation == 0.0
    assert parse_reports(emit_report([r])) == [r]
