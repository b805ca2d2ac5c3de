"""Check registry and the reproducible suite runner."""
from __future__ import annotations

import configparser
import dataclasses
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from . import funcs, jensen, mercer, operator, young
from .errors import ConfigurationError
from .funcs import FStronglyConvexFunction, StronglyConvexFunction
from .report import VerificationReport
from .tolerance import ToleranceConfig

DEFAULT_F_CATALOG = ("f_quad:1", "shifted_square", "quartic", "cosh")
HOLDER_EXPONENTS = (2.0, 2.5, 3.0, 5.0, 0.1, 0.5, 0.9)
CLASSICAL_EXPONENTS = (1.5,)
THEOREM35_BASE = "pow_r:4"
THEOREM35_NUS = (0.0, 0.25, 0.5, 1.0)


@dataclass(frozen=True)
class RunConfig:
    """Settings shared by every check in a run.

    ``trials`` counts draws per variant for scalar checks, draws per variant
    and per dimension for operator inequalities, and matrices (spread over
    ``dims``) for the numerical-core checks.  ``boxes`` maps function ids to
    closed sampling boxes that replace the defaults.
    """

    seed: int = 0
    trials: int = 10_000
    dims: tuple[int, ...] = operator.DEFAULT_DIMS
    tolerance: ToleranceConfig = field(default_factory=ToleranceConfig)
    vectors_per_matrix: int = operator.VECTORS_PER_MATRIX
    boxes: dict = field(default_factory=dict)
    functions: tuple[str, ...] | None = None
    f_functions: tuple[str, ...] | None = None
    n_range: tuple[int, int] = (2, 8)
    out: str | None = None
    format: str = "json"

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigurationError("trials must be >= 1")
        if not self.dims or min(self.dims) < 1:
            raise ConfigurationError("dims must be a non-empty list of positive integers")
        if self.vectors_per_matrix < 1:
            raise ConfigurationError("vectors_per_matrix must be >= 1")
        if self.format not in ("json", "csv"):
            raise ConfigurationError(f"unknown format {self.format!r} (use json or csv)")
        lo, hi = self.n_range
        if not 1 <= lo <= hi:
            raise ConfigurationError("n_range must satisfy 1 <= lo <= hi")
        if self.boxes:
            known = {f.id for f in self.catalog()} | {f.id for f in self.f_catalog()}
            unknown = sorted(set(self.boxes) - known)
            if unknown:
                raise ConfigurationError(f"box override for unknown function id(s) {unknown}; "
                                         f"known: {sorted(known)}")

    def _boxed(self, f):
        box = self.boxes.get(f.id)
        return dataclasses.replace(f, box=tuple(box)) if box else f

    def catalog(self) -> list[StronglyConvexFunction]:
        fs = ([funcs.by_id(i) for i in self.functions] if self.functions
              else funcs.builtin_catalog())
        return [self._boxed(f) for f in fs]

    def f_catalog(self) -> list[FStronglyConvexFunction]:
        return [self._boxed(funcs.f_by_id(i)) for i in (self.f_functions or DEFAULT_F_CATALOG)]


def _op_kw(cfg: RunConfig) -> dict:
    return {"dims": cfg.dims, "per_matrix": cfg.vectors_per_matrix}


def _catalog(cfg: RunConfig):
    out = []
    for f in cfg.catalog():
        rep = funcs.check_catalog_entry(f, cfg.trials, cfg.seed, cfg.tolerance)
        if f.deriv is not None:
            rep.extras["derivative_fd_error"] = funcs.derivative_consistency(f)
        out.append(rep)
    return out


def _per_function(check: Callable, **kw) -> Callable[[RunConfig], list]:
    def run(cfg: RunConfig):
        return [check(f, cfg.trials, cfg.seed, cfg.tolerance, **kw) for f in cfg.catalog()]
    return run


def _per_n(check: Callable) -> Callable[[RunConfig], list]:
    def run(cfg: RunConfig):
        return [check(f, cfg.trials, cfg.seed, cfg.tolerance, n_range=cfg.n_range) for f in cfg.catalog()]
    return run


def _quadratic_support(cfg: RunConfig):
    return [funcs.check_quadratic_support(f, None, cfg.trials, cfg.seed, cfg.tolerance)
            for f in cfg.catalog() if f.deriv is not None]


def _f_strong(cfg: RunConfig):
    return [funcs.check_f_strong_convexity(f, cfg.trials, cfg.seed, cfg.tolerance) for f in cfg.f_catalog()]


def _theorem27(cfg: RunConfig):
    # the reflected barycenter stays inside any interval, so every entry qualifies
    return [mercer.check_theorem27(f, cfg.trials, cfg.seed, cfg.tolerance, n_range=cfg.n_range)
            for f in cfg.catalog()]


def _scalar(check: Callable) -> Callable[[RunConfig], list]:
    def run(cfg: RunConfig):
        return [check(cfg.trials, cfg.seed, cfg.tolerance)]
    return run


def _core(check: Callable) -> Callable[[RunConfig], list]:
    def run(cfg: RunConfig):
        return [check(cfg.trials, cfg.seed, cfg.tolerance, dims=cfg.dims)]
    return run


def _theorem33(cfg):
    return [operator.check_theorem33(f, cfg.trials, cfg.seed, cfg.tolerance, **_op_kw(cfg))
            for f in cfg.catalog()]


def _holder(cfg):
    reps = [operator.check_holder_mccarthy(r, cfg.trials, cfg.seed, cfg.tolerance, **_op_kw(cfg))
            for r in HOLDER_EXPONENTS]
    reps += [operator.check_holder_mccarthy(r, cfg.trials, cfg.seed, cfg.tolerance, classical=True,
                                            **_op_kw(cfg)) for r in CLASSICAL_EXPONENTS]
    return reps


def _theorem35(cfg):
    f = cfg._boxed(funcs.by_id(THEOREM35_BASE))
    exponent = 4.0
    return [operator.check_theorem35(f, nu, operator.power_modulus(exponent * nu), cfg.trials, cfg.seed,
                                     cfg.tolerance, **_op_kw(cfg)) for nu in THEOREM35_NUS]


def _theorem36(cfg):
    return [operator.check_theorem36(f, cfg.trials, cfg.seed, cfg.tolerance, **_op_kw(cfg))
            for f in cfg.catalog() if f.modulus > 0 and f.deriv is not None]


def _eq43(cfg):
    reps = [operator.check_eq43(f.as_f_strong(), cfg.trials, cfg.seed, cfg.tolerance, modulus=f.modulus,
                                **_op_kw(cfg)) for f in cfg.catalog()]
    reps += [operator.check_eq43(f, cfg.trials, cfg.seed, cfg.tolerance, **_op_kw(cfg))
             for f in cfg.f_catalog()]
    return reps


def _subunit_ok(f) -> bool:
    return bool(f.domain.contains(0.0)) and f(0.0) <= 0


def _theorem41(cfg):
    candidates = [f.as_f_strong() for f in cfg.catalog()] + cfg.f_catalog()
    return [operator.check_theorem41(f, cfg.trials, cfg.seed, cfg.tolerance, **_op_kw(cfg))
            for f in candidates if _subunit_ok(f)]


@dataclass(frozen=True)
class Check:
    id: str
    module: str
    summary: str
    run: Callable[[RunConfig], list]


CHECKS: dict[str, Check] = {c.id: c for c in [
    Check("catalog", "funcs", "f - c x^2 is convex for each catalog entry", _catalog),
    Check("strong_convexity", "funcs", "three-point strong convexity inequality",
          _per_function(funcs.check_strong_convexity)),
    Check("quadratic_support", "funcs", "quadratic support with slope f'(x0)", _quadratic_support),
    Check("derivative_monotonicity", "funcs", "(f'(x) - f'(y))(x - y) >= 2c (x - y)^2",
          _per_function(funcs.check_derivative_monotonicity)),
    Check("f_strong_convexity", "funcs", "three-point inequality with penalty F", _f_strong),
    Check("jensen_functional", "jensen", "Jensen functional is non-negative",
          _per_n(jensen.check_jensen_functional)),
    Check("lemma21", "jensen", "c * weighted variance <= Jensen functional", _per_n(jensen.check_lemma21)),
    Check("theorem22", "jensen", "two-sided bound through a reference weight vector",
          _per_n(jensen.check_theorem22)),
    Check("lambdas", "mercer", "endpoint coordinates reconstruct the points", _scalar(mercer.check_lambdas)),
    Check("lemma26", "mercer", "reflected point bound", _per_n(mercer.check_lemma26)),
    Check("theorem27", "mercer", "refined Jensen-Mercer chain", _theorem27),
    Check("means_chain", "mercer", "G~ <= exp(M/2) G~ <= A~ on (0, 1]", _scalar(mercer.check_means_chain)),
    Check("kantorovich", "young", "K(t) >= 1 and K(t) = K(1/t)", _scalar(young.check_kantorovich)),
    Check("remark23", "young", "two-parameter Young ratio bounds", _scalar(young.check_remark23)),
    Check("corollary25", "young", "Kantorovich-refined Young bounds with mu = 1/2 cross-check",
          _scalar(young.check_corollary25)),
    Check("eq22", "young", "classical Kantorovich bounds for Young's inequality", _scalar(young.check_eq22)),
    Check("refinement_gain", "young", "refined lower gap never exceeds the classical gap",
          _scalar(young.check_refinement_gain)),
    Check("eigh", "operator", "Jacobi eigensolver residuals", _core(operator.check_eigh)),
    Check("apply_function", "operator", "functional calculus vs matrix arithmetic",
          _core(operator.check_apply_function)),
    Check("quadratic_form", "operator", "<Ax, x> direct vs spectral, variance >= 0",
          _core(operator.check_quadratic_form)),
    Check("theorem33", "operator", "operator Jensen inequality refined by c * variance", _theorem33),
    Check("holder_mccarthy", "operator", "refined power-mean comparisons", _holder),
    Check("theorem35", "operator", "seven-term chain for powers of f", _theorem35),
    Check("theorem36", "operator", "variance bounded by the f' covariance", _theorem36),
    Check("eq43", "operator", "operator Jensen inequality with penalty F", _eq43),
    Check("theorem41", "operator", "penalty version for vectors of norm <= 1", _theorem41),
    Check("sample_hermitian", "operator", "sampled spectra land in the box, deterministically",
          _core(operator.check_sample_hermitian)),
]}


def resolve_checks(names: Iterable[str]) -> list[str]:
    """Expand ``"all"`` and validate ids, preserving order and dropping repeats."""
    out: list[str] = []
    for name in names:
        name = name.strip()
        if not name:
            continue
        ids = list(CHECKS) if name == "all" else [name]
        for cid in ids:
            if cid not in CHECKS:
                raise ConfigurationError(f"unknown check id {cid!r}; see list-checks")
            if cid not in out:
                out.append(cid)
    return out


def run_suite(config: RunConfig, checks: Sequence[str]) -> list[VerificationReport]:
    """Run the named checks; one report per (check, variant), in registry-call order."""
    reports: list[VerificationReport] = []
    for cid in resolve_checks(checks):
        reports.extend(CHECKS[cid].run(config))
    return reports


# -- key=value config files -----------------------------------------------------

def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(t) for t in text.replace(" ", "").split(",") if t)


def _strs(text: str) -> tuple[str, ...]:
    return tuple(t.strip() for t in text.split(",") if t.strip())


_PARSERS: dict[str, Callable[[str], object]] = {
    "seed": int, "trials": int, "dims": _ints, "vectors_per_matrix": int,
    "tol_abs": float, "tol_rel": float, "equality_eps": float,
    "out": str, "format": str, "checks": _strs, "functions": _strs, "f_functions": _strs,
    "n_range": _ints,
}


def read_config_file(path) -> dict:
    """Parse ``key = value`` lines (``#`` comments allowed) into typed settings.

    Box overrides use ``box.<function id> = lo:hi``.
    """
    parser = configparser.ConfigParser(interpolation=None, delimiters=("=",), comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_string("[run]\n" + fh.read())
    except OSError as exc:
        raise ConfigurationError(f"cannot read config file: {exc}") from None
    except configparser.Error as exc:
        raise ConfigurationError(f"malformed config file: {exc}") from None
    out: dict = {}
    for key, raw in parser.items("run"):
        key = key.strip()
        try:
            if key.startswith("box."):
                lo, hi = raw.split(":")
                out.setdefault("boxes", {})[key[4:]] = (float(lo), float(hi))
            elif key in _PARSERS:
                out[key] = _PARSERS[key](raw.strip())
            else:
                raise ConfigurationError(f"unknown config key {key!r}")
        except ValueError as exc:
            raise ConfigurationError(f"bad value for {key!r}: {exc}") from None
    return out


def build_config(settings: dict) -> RunConfig:
    """Turn flat settings (file values overlaid by flags) into a :class:`RunConfig`."""
    s = dict(settings)
    tol = ToleranceConfig(*(s.pop(k, d) for k, d in (("tol_abs", 1e-9), ("tol_rel", 1e-9),
                                                      ("equality_eps", 1e-12))))
    s.pop("checks", None)
    if "n_range" in s:
        nr = tuple(s["n_range"])
        if len(nr) != 2:
            raise ConfigurationError("n_range needs two integers")
        s["n_range"] = nr
    known = {f.name for f in dataclasses.fields(RunConfig)}
    extra = set(s) - known
    if extra:
        raise ConfigurationError(f"unknown settings: {sorted(extra)}")
    return RunConfig(tolerance=tol, **s)
