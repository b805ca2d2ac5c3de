"""Acceptance criteria 1-10, each at its stated size and tolerance.

Every test records one pass/fail line, printed together at the end of the
run under "acceptance criteria".
"""
import subprocess
import sys
import time

import numpy as np
import pytest

from strongconvex import funcs, jensen, mercer, operator, young
from strongconvex.linalg import apply_function, jacobi_eigh, sample_spectrum_matrices
from strongconvex.operator import SpectrumSpec, sample_hermitian
from strongconvex.report import parse_reports
from strongconvex.sampling import make_rng, weight_batch
from strongconvex.suite import RunConfig, run_suite
from strongconvex.tolerance import ToleranceConfig

TOL = ToleranceConfig(1e-9, 1e-9)
CATALOG = funcs.builtin_catalog()
OPERATOR_DIMS = (1, 2, 3, 5, 8, 16)
SEED = 2024


def _summary(reports):
    return f"{sum(r.trials for r in reports)} trials, {sum(r.violations for r in reports)} violations"


def test_criterion_01_definition_equivalences(criterion):
    start = time.perf_counter()
    reps = []
    for f in CATALOG:
        reps += [funcs.check_strong_convexity(f, 10_000, SEED, TOL),
                 funcs.check_quadratic_support(f, None, 10_000, SEED, TOL),
                 funcs.check_derivative_monotonicity(f, 10_000, SEED, TOL)]
    elapsed = time.perf_counter() - start
    ok = all(r.trials == 10_000 and r.violations == 0 for r in reps) and elapsed < 5.0
    assert criterion(1, ok, f"{len(reps)} reports, {_summary(reps)}, {elapsed:.2f} s (< 5 s)")


def test_criterion_02_jensen_bounds(criterion):
    reps = []
    for f in CATALOG:
        reps += [jensen.check_lemma21(f, 10_000, SEED, TOL, n_range=(2, 8)),
                 jensen.check_theorem22(f, 10_000, SEED, TOL, n_range=(2, 8))]
    rng = make_rng(SEED, "acceptance", "quadratic_certificate")
    f = funcs.quad(1.0)
    lo, hi = f.sample_box()
    worst = 0.0
    for n in range(2, 9):
        x = rng.uniform(lo, hi, (1000 // 7 + 1, n))
        p = weight_batch(n, len(x), rng)
        gap = np.asarray(jensen.jensen_functional(f, x, p)) - f.modulus * np.asarray(jensen.weighted_variance(x, p))
        worst = max(worst, float(np.abs(gap).max()))
    ok = all(r.violations == 0 for r in reps) and worst <= 1e-12
    assert criterion(2, ok, f"{_summary(reps)}; quadratic |J - c var| max {worst:.2e} (<= 1e-12)")


def test_criterion_03_mercer(criterion):
    rep = mercer.check_theorem27(funcs.neg_log(), 10_000, SEED, TOL)
    rng = make_rng(SEED, "acceptance", "mercer_quadratic")
    f = funcs.quad(1.0)
    worst = 0.0
    for n in range(2, 9):
        x = rng.uniform(-1.0, 1.0, (200, n))
        b = mercer.theorem27_bound(f, x, weight_batch(n, 200, rng))
        worst = max(worst, float(np.abs(b.lhs - b.refined_rhs).max()))
    ex = mercer.theorem27_bound(f, [1.0, 2.0, 3.0], [1 / 3] * 3)
    ex_ok = abs(ex.lhs - 4) <= 1e-12 and abs(ex.refined_rhs - 4) <= 1e-12
    ok = rep.trials == 10_000 and rep.violations == 0 and worst <= 1e-12 and ex_ok
    assert criterion(3, ok, f"neg_log {_summary([rep])}; quadratic |lhs - refined| max {worst:.2e}; "
                            f"x=(1,2,3) -> ({ex.lhs:.15g}, {ex.refined_rhs:.15g})")


def test_criterion_04_means_chain(criterion):
    rep = mercer.check_means_chain(10_000, SEED, TOL)
    rng = make_rng(SEED, "acceptance", "means_constant")
    a = rng.uniform(1e-3, 1.0, 500)
    worst = 0.0
    for n in (1, 2, 5, 8):
        x = np.repeat(a[:, None], n, axis=1)
        g, mid, at = mercer.means_chain(x, weight_batch(n, 500, rng))
        worst = max(worst, float(np.max(np.abs(np.stack([g - at, mid - at, g - mid])))))
    ok = rep.violations == 0 and worst <= 1e-12
    assert criterion(4, ok, f"{_summary([rep])}; constant draws max spread {worst:.2e} (<= 1e-12)")


def test_criterion_05_eq22(criterion):
    rep = young.check_eq22(100_000, SEED, TOL)
    ex = young.eq22_baseline(0.25, 1.0, 0.5)
    ex_ok = all(abs(v - 0.625) <= 1e-12 for v in ex)
    ok = rep.trials == 100_000 and rep.violations == 0 and ex_ok
    assert criterion(5, ok, f"{_summary([rep])}; (0.25, 1, 1/2) -> {tuple(round(v, 15) for v in ex)}")


def test_criterion_06_young_bounds_with_crosscheck(criterion):
    cor = young.check_corollary25(100_000, SEED, TOL)
    rem = young.check_remark23(100_000, SEED, TOL)
    cross = cor.extras
    ok = (cor.trials == rem.trials == 100_000 and cross["crosscheck_draws"] == 100_000
          and len(cor.findings) <= cor.violations and len(rem.findings) <= rem.violations)
    assert criterion(6, ok, f"corollary {_summary([cor])}, remark {_summary([rem])}; cross-check on "
                            f"{cross['crosscheck_draws']} draws, max rel discrepancy "
                            f"{cross['crosscheck_max_rel_discrepancy']:.2e}, "
                            f"{cross['crosscheck_mismatches']} mismatches")


@pytest.fixture(scope="module")
def operator_run():
    ids = ["theorem33", "holder_mccarthy", "theorem35", "theorem36", "eq43", "theorem41"]
    cfg = RunConfig(seed=SEED, trials=10_000, dims=OPERATOR_DIMS, tolerance=TOL)
    start = time.perf_counter()
    reps = run_suite(cfg, ids)
    return reps, time.perf_counter() - start


def test_criterion_07_operator_suite(criterion, operator_run):
    reps, elapsed = operator_run
    by = {}
    for r in reps:
        by.setdefault(r.check_id, []).append(r)
    holder = {r.variant for r in by["holder_mccarthy"]}
    nus = {r.config_echo["nu"] for r in by["theorem35"]}
    coverage = (len(by["theorem33"]) == len(CATALOG)
                and {"r=2", "r=2.5", "r=3", "r=5", "r=0.1", "r=0.5", "r=0.9"} <= holder
                and nus == {0.0, 0.25, 0.5, 1.0}
                and any("F=c*t^2" in r.variant for r in by["eq43"])
                and by["theorem36"] and by["theorem41"])
    sizes = all(r.trials == 10_000 * len(OPERATOR_DIMS) for r in reps)
    ok = coverage and sizes and all(r.violations == 0 for r in reps) and elapsed < 60.0
    assert criterion(7, ok, f"{len(reps)} configurations x 6 dims, {_summary(reps)}, {elapsed:.1f} s (< 60 s)")


def test_criterion_08_sharpness_anchors(criterion, operator_run):
    reps, _ = operator_run
    r2 = [r for r in reps if r.check_id == "holder_mccarthy" and r.variant == "r=2"][0]
    tight = r2.extras["max_rel_tightness_gap"]
    fpath = max(r.extras["max_rel_gap_vs_theorem33"] for r in reps
                if r.check_id == "eq43" and "max_rel_gap_vs_theorem33" in r.extras)
    # eigenvector probes: all three terms of the operator Jensen chain coincide
    worst = 0.0
    for f in CATALOG:
        lo, hi = f.operator_box()
        for dim in OPERATOR_DIMS:
            for k in range(5):
                a = sample_hermitian(SpectrumSpec(funcs.Interval(lo, hi), dim), SEED + 100 * dim + k)
                _, q = a.spectrum
                for j in range(dim):
                    t = operator.theorem33_check(f, a, q[:, j])
                    scale = max(1.0, abs(t.lhs), abs(t.plain_rhs))
                    worst = max(worst, abs(t.plain_rhs - t.lhs) / scale, abs(t.refined_rhs - t.lhs) / scale)
    ok = tight <= 1e-9 and worst <= 1e-10 and fpath <= 1e-10
    assert criterion(8, ok, f"r=2 gap {tight:.1e} (<= 1e-9); eigenvector equality {worst:.1e} (<= 1e-10); "
                            f"F=c t^2 vs refined Jensen {fpath:.1e} (<= 1e-10); gaps scaled by max(1,|L|,|R|)")


def test_criterion_09_numerical_core(criterion):
    dims = (1, 2, 3, 5, 8, 16, 32, 64)
    rng = make_rng(SEED, "acceptance", "core")
    recon = orth = 0.0
    for i, dim in enumerate(dims):
        count = 1000 // len(dims)
        g = rng.standard_normal((count, dim, dim))
        a = 0.5 * (g + np.swapaxes(g, -1, -2))
        lam, q = jacobi_eigh(a)
        recon = max(recon, float(np.abs((q * lam[:, None, :]) @ np.swapaxes(q, -1, -2) - a).max()))
        orth = max(orth, float(np.abs(np.swapaxes(q, -1, -2) @ q - np.eye(dim)).max()))
    sq = 0.0
    for dim in dims:
        a = sample_spectrum_matrices(-3.0, 3.0, dim, 20, rng)
        sq = max(sq, float(np.abs(apply_function(a, np.square) - a @ a).max()))
    ok = recon <= 1e-10 and orth <= 1e-10 and sq <= 1e-9
    assert criterion(9, ok, f"1000 matrices, dims up to 64: reconstruction {recon:.1e}, orthonormality "
                            f"{orth:.1e} (<= 1e-10); t^2 vs A A {sq:.1e} (<= 1e-9)")


def _cli(*args, cwd=None):
    return subprocess.run([sys.executable, "-m", "strongconvex", *args], capture_output=True, cwd=cwd)


def test_criterion_10_reproducibility(criterion, tmp_path):
    first = _cli("run", "--checks", "all", "--seed", "42")
    second = _cli("run", "--checks", "all", "--seed", "42")
    reports = parse_reports(first.stdout)
    identical = first.stdout == second.stdout and len(reports) > 0
    clean = first.returncode == second.returncode == (2 if any(r.violations for r in reports) else 0)
    usage = _cli("run", "--checks", "nope").returncode == 1
    violation = _cli("operator", "--theorem", "3.5", "--c-prime", "1000", "--dim", "3",
                     "--trials", "200").returncode == 2
    ok = identical and clean and usage and violation
    assert criterion(10, ok, f"{len(reports)} reports byte-identical across runs: {identical}; exit codes "
                             f"clean={first.returncode}, usage=1: {usage}, violation=2: {violation}")
