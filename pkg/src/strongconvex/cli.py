"""Command-line front end.

Exit codes: 0 when every requested check passes, 2 when any violation is
found, 1 on usage or configuration errors.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import funcs, jensen, mercer, operator, young
from .errors import StrongConvexError
from .funcs import Interval
from .linalg import read_matrix
from .report import _dump, emit_report
from .suite import CHECKS, build_config, read_config_file, resolve_checks, run_suite
from .tolerance import DEFAULT_TOLERANCE, ToleranceConfig

EXIT_OK, EXIT_USAGE, EXIT_VIOLATION = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on bad usage; this contract reserves 2 for violations."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _csv_floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.replace(";", ",").split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _csv_ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _add_tolerance(p):
    p.add_argument("--tol-abs", type=float, help="absolute tolerance (default 1e-9)")
    p.add_argument("--tol-rel", type=float, help="relative tolerance (default 1e-9)")


def _add_output(p):
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--format", choices=("json", "csv"), help="report format (default json)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="strongconvex", description="Verify strong-convexity inequalities numerically.")
    sub = parser.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    sub.add_parser("list-checks", help="list check ids")

    run = sub.add_parser("run", help="run registered checks")
    run.add_argument("--checks", help="comma-separated check ids, or 'all'")
    run.add_argument("--trials", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--dims", type=_csv_ints, help="matrix dimensions, e.g. 1,2,3")
    run.add_argument("--config", help="key=value settings file; flags win over it")
    _add_tolerance(run)
    _add_output(run)

    for name, default in (("jensen", "neg_log"), ("mercer", "neg_log")):
        p = sub.add_parser(name, help=f"{name} property run for one function")
        p.add_argument("--func", default=default, help=f"catalog id (default {default})")
        p.add_argument("--n", type=int, help="fix the number of points")
        p.add_argument("--trials", type=int, default=10_000)
        p.add_argument("--seed", type=int, default=0)
        _add_tolerance(p)
        _add_output(p)

    yg = sub.add_parser("young", help="Young-type bounds: one evaluation or a property run")
    yg.add_argument("--a", type=float)
    yg.add_argument("--b", type=float)
    yg.add_argument("--lambda", dest="lam", type=float)
    yg.add_argument("--mu", type=float, help="also evaluate the two-parameter form")
    yg.add_argument("--trials", type=int, default=100_000)
    yg.add_argument("--seed", type=int, default=0)
    _add_tolerance(yg)
    _add_output(yg)

    op = sub.add_parser("operator", help="operator inequalities on sampled or given matrices")
    op.add_argument("--theorem", required=True,
                    choices=("3.2", "3.3", "3.4a", "3.4b", "3.5", "3.6", "4.3", "4.1"),
                    help="3.2 classical power comparison; 3.3 refined Jensen; 3.4a/3.4b refined power "
                         "bounds for r >= 2 / 0 < r < 1; 3.5 chain through f^nu; 3.6 reverse variance "
                         "bound; 4.3 Jensen with penalty F; 4.1 penalty form for ||x|| <= 1")
    op.add_argument("--dim", type=_csv_ints, help="dimension(s), default 1,2,3,5,8,16")
    op.add_argument("--trials", type=int, default=10_000, help="draws per dimension")
    op.add_argument("--seed", type=int, default=0)
    op.add_argument("--spectrum", help="closed eigenvalue box lo:hi")
    op.add_argument("--func", help="catalog id (3.3, 3.6, 3.5) or F-catalog id (4.3, 4.1)")
    op.add_argument("--r", type=float, help="power for 3.2 / 3.4a / 3.4b")
    op.add_argument("--nu", type=float, default=0.5, help="power of f for 3.5")
    op.add_argument("--c-prime", type=float, help="modulus of f^nu for 3.5 (default derived for pow_r)")
    op.add_argument("--matrix", help="matrix file (dim header, then rows) for a single evaluation")
    op.add_argument("--vector", type=_csv_floats, help="vector for --matrix")
    _add_tolerance(op)
    _add_output(op)
    return parser


def _tolerance(args) -> ToleranceConfig:
    d = DEFAULT_TOLERANCE
    return ToleranceConfig(d.tol_abs if args.tol_abs is None else args.tol_abs,
                           d.tol_rel if args.tol_rel is None else args.tol_rel, d.equality_eps)


def _emit(reports, out, fmt) -> int:
    data = emit_report(reports, fmt or "json")
    if out:
        Path(out).write_bytes(data)
    else:
        sys.stdout.write(data.decode())
        if not data.endswith(b"\n"):
            sys.stdout.write("\n")
    return EXIT_VIOLATION if any(r.violations for r in reports) else EXIT_OK


def _cmd_list(_args) -> int:
    width = max(map(len, CHECKS))
    for c in CHECKS.values():
        print(f"{c.id:<{width}}  {c.module:<8}  {c.summary}")
    return EXIT_OK


def _cmd_run(args) -> int:
    settings = read_config_file(args.config) if args.config else {}
    flags = {"seed": args.seed, "trials": args.trials, "dims": args.dims, "tol_abs": args.tol_abs,
             "tol_rel": args.tol_rel, "out": args.out, "format": args.format}
    settings.update({k: v for k, v in flags.items() if v is not None})
    names = args.checks.split(",") if args.checks else list(settings.get("checks", ["all"]))
    checks = resolve_checks(names)
    cfg = build_config(settings)
    return _emit(run_suite(cfg, checks), cfg.out, cfg.format)


def _cmd_jensen(args) -> int:
    f = funcs.by_id(args.func)
    tol = _tolerance(args)
    nr = (args.n, args.n) if args.n else (2, 8)
    reps = [chk(f, args.trials, args.seed, tol, n_range=nr)
            for chk in (jensen.check_jensen_functional, jensen.check_lemma21, jensen.check_theorem22)]
    return _emit(reps, args.out, args.format)


def _cmd_mercer(args) -> int:
    f = funcs.by_id(args.func)
    tol = _tolerance(args)
    nr = (args.n, args.n) if args.n else (2, 8)
    reps = [mercer.check_lemma26(f, args.trials, args.seed, tol, n_range=nr),
            mercer.check_theorem27(f, args.trials, args.seed, tol, n_range=nr),
            mercer.check_means_chain(args.trials, args.seed, tol, n_range=nr)]
    return _emit(reps, args.out, args.format)


def _print_json(obj, out=None) -> None:
    text = _dump(obj) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _cmd_young(args) -> int:
    tol = _tolerance(args)
    single = [v is not None for v in (args.a, args.b, args.lam)]
    if any(single):
        if not all(single):
            raise UsageError("single evaluation needs --a, --b and --lambda together")
        cor = young.corollary25_bounds(args.a, args.b, args.lam)
        base = young.eq22_baseline(args.a, args.b, args.lam)
        gain = young.refinement_gain(args.a, args.b, args.lam)
        chains = {"corollary25": cor._asdict(), "eq22": base._asdict(), "refinement_gain": gain._asdict()}
        ok = [tol.holds(cor.lower, cor.mid), tol.holds(cor.mid, cor.upper),
              tol.holds(base.lower, base.mid), tol.holds(base.mid, base.upper)]
        if args.mu is not None:
            rem = young.remark23_bounds(args.a, args.b, args.lam, args.mu)
            chains["remark23"] = rem._asdict()
            ok += [tol.holds(rem.lower, rem.mid), tol.holds(rem.mid, rem.upper)]
        chains["holds"] = bool(all(ok))
        _print_json(chains, args.out)
        return EXIT_OK if all(ok) else EXIT_VIOLATION
    reps = [chk(args.trials, args.seed, tol) for chk in
            (young.check_kantorovich, young.check_remark23, young.check_corollary25,
             young.check_eq22, young.check_refinement_gain)]
    return _emit(reps, args.out, args.format)


def _f_strong(spec: str | None):
    """F-catalog id, or a scalar catalog id promoted with ``F(t) = c t^2``."""
    spec = spec or "f_quad:1"
    try:
        return funcs.f_by_id(spec)
    except StrongConvexError:
        return funcs.by_id(spec).as_f_strong()


def _theorem35_inputs(args):
    f = funcs.by_id(args.func or "pow_r:4")
    if args.c_prime is not None:
        return f, args.c_prime
    # t^s has modulus s(s-1)/2 on (1, inf), so (t^s)^nu = t^(s nu) does too
    if f.id.startswith("pow_r:"):
        return f, operator.power_modulus(float(f.id.split(":", 1)[1]) * args.nu)
    return f, 0.0


def _holder_r(args) -> float:
    r = args.r if args.r is not None else {"3.2": 1.5, "3.4a": 2.0, "3.4b": 0.5}[args.theorem]
    if args.theorem == "3.4a" and not r >= 2:
        raise UsageError("--theorem 3.4a needs --r >= 2")
    if args.theorem == "3.4b" and not 0 < r < 1:
        raise UsageError("--theorem 3.4b needs 0 < --r < 1")
    return r


def _single_operator(args, tol) -> int:
    if args.vector is None:
        raise UsageError("--matrix needs --vector")
    A = read_matrix(args.matrix)
    x = np.asarray(args.vector)
    th = args.theorem
    if th in ("3.2", "3.4a", "3.4b"):
        r = _holder_r(args)
        res = operator.holder_mccarthy(A, x, r) if th == "3.2" else operator.holder_mccarthy_refined(A, x, r)
        values = list(res)
    elif th == "3.3":
        values = list(operator.theorem33_check(funcs.by_id(args.func or "quad:1"), A, x))
    elif th == "3.5":
        f, c_prime = _theorem35_inputs(args)
        values = list(operator.theorem35_chain(f, c_prime, args.nu, A, x))
    elif th == "3.6":
        values = list(operator.theorem36_reverse(funcs.by_id(args.func or "quad:1"), A, x))[:2]
    elif th == "4.3":
        values = list(operator.eq43_fstrong_check(_f_strong(args.func), A, x))
    else:
        values = list(operator.theorem41_subunit_check(_f_strong(args.func), A, x))
    ok = all(bool(tol.holds(l, r)) for l, r in zip(values[:-1], values[1:]))
    _print_json({"theorem": th, "values": values, "holds": ok}, args.out)
    return EXIT_OK if ok else EXIT_VIOLATION


def _cmd_operator(args) -> int:
    tol = _tolerance(args)
    if args.matrix:
        return _single_operator(args, tol)
    box = None
    if args.spectrum:
        iv = Interval.parse(args.spectrum)
        box = (iv.lo, iv.hi)
    kw = {"dims": args.dim or operator.DEFAULT_DIMS, "box": box}
    th, n, seed = args.theorem, args.trials, args.seed
    if th in ("3.2", "3.4a", "3.4b"):
        reps = [operator.check_holder_mccarthy(_holder_r(args), n, seed, tol, classical=th == "3.2", **kw)]
    elif th == "3.3":
        reps = [operator.check_theorem33(funcs.by_id(args.func or "quad:1"), n, seed, tol, **kw)]
    elif th == "3.5":
        f, c_prime = _theorem35_inputs(args)
        reps = [operator.check_theorem35(f, args.nu, c_prime, n, seed, tol, **kw)]
    elif th == "3.6":
        reps = [operator.check_theorem36(funcs.by_id(args.func or "quad:1"), n, seed, tol, **kw)]
    elif th == "4.3":
        reps = [operator.check_eq43(_f_strong(args.func), n, seed, tol, **kw)]
    else:
        reps = [operator.check_theorem41(_f_strong(args.func), n, seed, tol, **kw)]
    return _emit(reps, args.out, args.format)


_COMMANDS = {"list-checks": _cmd_list, "run": _cmd_run, "jensen": _cmd_jensen, "mercer": _cmd_mercer,
             "young": _cmd_young, "operator": _cmd_operator}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return _COMMANDS[args.verb](args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except (StrongConvexError, ValueError, OSError) as exc:
        print(f"strongconvex: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
