"""Verification reports: trial accumulation and JSON/CSV serialisation.

Slack of a claimed inequality ``L <= R`` is always ``R - L``.  A trial may
check several links at once (a chain ``v0 <= v1 <= ...`` contributes one link
per consecutive pair); the trial's slack is the smallest link slack, it is a
violation if any link fails the tolerance policy, and it is an equality hit
when every link is attained with equality.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field, fields
from typing import Any, Sequence

import numpy as np

from .errors import ConfigurationError
from .tolerance import DEFAULT_TOLERANCE, ToleranceConfig

PRNG_NAME = "numpy.random.PCG64"
MAX_FINDINGS = 20


@dataclass
class VerificationReport:
    check_id: str
    variant: str
    trials: int
    violations: int
    worst_violation: float
    min_slack: float
    max_slack: float
    equality_hits: int
    seed: int
    config_echo: dict = field(default_factory=dict)
    extras: dict = field(default_factory=dict)
    findings: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.violations == 0


FIELD_NAMES = [f.name for f in fields(VerificationReport)]
_INT_FIELDS = {"trials", "violations", "equality_hits", "seed"}
_FLOAT_FIELDS = {"worst_violation", "min_slack", "max_slack"}
_JSON_FIELDS = {"config_echo", "extras", "findings"}


def _plain(value: Any) -> Any:
    """Convert numpy scalars/arrays into JSON-friendly builtins."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    return value


class Tally:
    """Accumulates batches of trial outcomes into a :class:`VerificationReport`."""

    def __init__(self, check_id: str, variant: str = "", seed: int = 0,
                 tol: ToleranceConfig | None = None, config_echo: dict | None = None,
                 max_findings: int = MAX_FINDINGS):
        self.check_id = check_id
        self.variant = variant
        self.seed = seed
        self.tol = tol or DEFAULT_TOLERANCE
        self.config_echo = dict(config_echo or {})
        self.extras: dict = {}
        self.findings: list = []
        self.max_findings = max_findings
        self.trials = 0
        self.violations = 0
        self.equality_hits = 0
        self.worst = 0.0
        self.min_slack = math.inf
        self.max_slack = -math.inf

    def add(self, links: Sequence[tuple[Any, Any]], draws: dict | None = None):
        """Record one batch.

        Parameters
        ----------
        links : sequence of (lhs, rhs)
            Each pair is a claimed ``lhs <= rhs``; arrays share the batch axis.
        draws : dict of arrays, optional
            Inputs of the batch, indexed along axis 0; copied into the
            findings for violating trials.

        Returns
        -------
        ndarray of bool
            Per-trial violation mask.
        """
        lhs = np.array(np.broadcast_arrays(*[np.asarray(l, dtype=float) for l, _ in links]), ndmin=2)
        rhs = np.array(np.broadcast_arrays(*[np.asarray(r, dtype=float) for _, r in links]), ndmin=2)
        lhs, rhs = np.broadcast_arrays(lhs, rhs)
        slack = rhs - lhs
        bad = ~(slack >= -self.tol.allowance(lhs, rhs))
        viol = bad.any(axis=0)
        hits = self.tol.equal(lhs, rhs).all(axis=0)
        binding = np.min(np.where(np.isnan(slack), -math.inf, slack), axis=0)

        self.trials += binding.size
        self.violations += int(viol.sum())
        self.equality_hits += int(hits.sum())
        if binding.size:
            self.min_slack = min(self.min_slack, float(binding.min()))
            self.max_slack = max(self.max_slack, float(binding.max()))
        if viol.any():
            self.worst = min(self.worst, float(binding[viol].min()))
            for idx in np.nonzero(viol)[0]:
                if len(self.findings) >= self.max_findings:
                    break
                entry = {"links": [[float(lhs[k, idx]), float(rhs[k, idx])] for k in range(lhs.shape[0])],
                         "failed_links": np.nonzero(bad[:, idx])[0].tolist()}
                for name, arr in (draws or {}).items():
                    arr = np.asarray(arr)
                    entry[name] = _plain(arr[idx] if arr.ndim and arr.shape[0] == binding.size else arr)
                self.findings.append(entry)
        return viol

    def chain(self, values: Sequence[Any], draws: dict | None = None):
        """Shorthand for the chain ``values[0] <= values[1] <= ...``."""
        return self.add(list(zip(values[:-1], values[1:])), draws)

    def report(self) -> VerificationReport:
        echo = {"prng": PRNG_NAME, "tol_abs": self.tol.tol_abs, "tol_rel": self.tol.tol_rel,
                "equality_eps": self.tol.equality_eps}
        echo.update(self.config_echo)
        empty = self.trials == 0
        return VerificationReport(
            check_id=self.check_id,
            variant=self.variant,
            trials=self.trials,
            violations=self.violations,
            worst_violation=self.worst,
            min_slack=0.0 if empty else self.min_slack,
            max_slack=0.0 if empty else self.max_slack,
            equality_hits=self.equality_hits,
            seed=int(self.seed),
            config_echo=_plain(echo),
            extras=_plain(self.extras),
            findings=_plain(self.findings),
        )


# -- serialisation -----------------------------------------------------------

def _fmt_float(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return format(x, ".17g")


def _dump(obj: Any) -> str:
    """JSON text with every float written to 17 significant digits."""
    obj = _plain(obj)
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _fmt_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(k)}: {_dump(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, list):
        return "[" + ", ".join(_dump(v) for v in obj) + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def emit_report(reports: Sequence[VerificationReport], fmt: str = "json") -> bytes:
    """Serialise reports as a JSON array or as CSV with a header row."""
    if fmt == "json":
        if not reports:
            return b"[]"
        body = ",\n".join("  " + _dump(asdict(r)) for r in reports)
        return ("[\n" + body + "\n]\n").encode()
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(FIELD_NAMES)
        for r in reports:
            row = []
            for name in FIELD_NAMES:
                val = getattr(r, name)
                if name in _JSON_FIELDS:
                    row.append(_dump(val))
                elif name in _FLOAT_FIELDS:
                    row.append(_fmt_float(float(val)))
                else:
                    row.append(str(val))
            writer.writerow(row)
        return buf.getvalue().encode()
    raise ConfigurationError(f"unknown report format {fmt!r} (use json or csv)")


def parse_reports(data: bytes | str, fmt: str = "json") -> list[VerificationReport]:
    """Inverse of :func:`emit_report`."""
    text = data.decode() if isinstance(data, bytes) else data
    if fmt == "json":
        return [VerificationReport(**obj) for obj in json.loads(text)]
    if fmt == "csv":
        rows = list(csv.DictReader(io.StringIO(text)))
        out = []
        for row in rows:
            kw: dict[str, Any] = {}
            for name in FIELD_NAMES:
                raw = row[name]
                if name in _INT_FIELDS:
                    kw[name] = int(raw)
                elif name in _FLOAT_FIELDS:
                    kw[name] = float(raw.replace("Infinity", "inf"))
                elif name in _JSON_FIELDS:
                    kw[name] = json.loads(raw)
                else:
                    kw[name] = raw
            out.append(VerificationReport(**kw))
        return out
    raise ConfigurationError(f"unknown report format {fmt!r} (use json or csv)")
