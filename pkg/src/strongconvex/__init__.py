"""Numerical verification of inequalities for strongly convex functions.

Scalar Jensen, Jensen-Mercer and Young-type bounds, their operator versions
on real symmetric matrices, and a seeded property-testing harness with
JSON/CSV reports.
"""
from .errors import (ConfigurationError, DomainError, PreconditionError, SpectrumError,
                     StrongConvexError, UnsupportedError)
from .funcs import (FStronglyConvexFunction, Interval, StronglyConvexFunction, builtin_catalog, by_id,
                    check_derivative_monotonicity, check_f_strong_convexity, check_quadratic_support,
                    check_strong_convexity, f_by_id)
from .jensen import jensen_functional, lemma21_lower_bound, theorem22_bounds
from .linalg import HermitianMatrix, apply_function, eigh, quadratic_form
from .mercer import lambdas_of, lemma26_bound, means_chain, theorem27_bound
from .operator import (SpectrumSpec, eq43_fstrong_check, holder_mccarthy, holder_mccarthy_refined,
                       sample_hermitian, theorem33_check, theorem35_chain, theorem36_reverse,
                       theorem41_subunit_check)
from .report import VerificationReport, emit_report, parse_reports
from .sampling import make_rng, sample_unit_vector, sample_weights
from .suite import CHECKS, RunConfig, run_suite
from .tolerance import ToleranceConfig
from .vectors import PointVector, UnitVector, WeightVector
from .young import (corollary25_bounds, eq22_baseline, kantorovich, refinement_gain,
                    remark23_bounds)

__all__ = [
    "ConfigurationError", "DomainError", "PreconditionError", "SpectrumError", "StrongConvexError",
    "UnsupportedError", "FStronglyConvexFunction", "Interval", "StronglyConvexFunction",
    "builtin_catalog", "by_id", "check_derivative_monotonicity", "check_f_strong_convexity",
    "check_quadratic_support", "check_strong_convexity", "f_by_id", "jensen_functional",
    "lemma21_lower_bound", "theorem22_bounds", "HermitianMatrix", "apply_function", "eigh",
    "quadratic_form", "lambdas_of", "lemma26_bound", "means_chain", "theorem27_bound",
    "SpectrumSpec", "eq43_fstrong_check", "holder_mccarthy", "holder_mccarthy_refined",
    "sample_hermitian", "theorem33_check", "theorem35_chain", "theorem36_reverse",
    "theorem41_subunit_check", "VerificationReport", "emit_report", "parse_reports", "make_rng",
    "sample_unit_vector", "sample_weights", "CHECKS", "RunConfig", "run_suite", "ToleranceConfig",
    "PointVector", "UnitVector", "WeightVector", "corollary25_bounds", "eq22_baseline",
    "kantorovich", "refinement_gain", "remark23_bounds",
]

__version__ = "0.1.0"
