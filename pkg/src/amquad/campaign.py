"""Corpus loading and the verification / sweep / preset campaigns driven by the CLI."""
from __future__ import annotations

import csv
import io
import itertools
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Optional

from . import bounds, coefficients
from .convexity import DEFAULT_SEED, SamplingSpec, check_alpha_m_convex
from .expr import ExprError, compile_expr, parse, validate_derivative
from .integrator import DEFAULT_TOL, lemma_rhs
from .model import Certificate, ConvexityParams, FunctionSpec, ParameterError, RuleParams

log = logging.getLogger(__name__)

__all__ = [
    "CorpusError",
    "CSV_COLUMNS",
    "DOMINANCE_SLACK",
    "RESIDUAL_LIMIT",
    "SweepGrid",
    "Entry",
    "load_corpus",
    "demo_corpus",
    "certify_derivative",
    "sweep_rows",
    "run_verify",
    "VerifyReport",
    "write_csv",
    "run_preset",
    "lemma_table",
]

SCHEMA_VERSION = 1
DOMINANCE_SLACK = 1e-9
RESIDUAL_LIMIT = 1e-8
RECORD_KEYS = {"name", "f", "fprime", "domain_b", "claims", "f4_sup"}
CSV_COLUMNS = [
    "name", "theta", "lambda", "alpha", "m", "q",
    "defect", "bound_pm", "b1", "b2", "pm_argmin",
    "bound_holder", "b3", "b4", "h_argmin",
    "lemma_residual", "certified",
]


class CorpusError(Exception):
    """Corpus file unreadable or not matching the schema."""


@dataclass(frozen=True)
class Entry:
    spec: FunctionSpec

    @property
    def name(self) -> str:
        return self.spec.name

    @cached_property
    def f(self):
        return compile_expr(self.spec.f_expr)

    @cached_property
    def fprime(self):
        return compile_expr(self.spec.fprime_expr)


def _fraction(text: str) -> float:
    try:
        return float(Fraction(text.strip()))
    except (ValueError, ZeroDivisionError):
        raise ParameterError("grid", f"not a number: {text!r}") from None


@dataclass(frozen=True)
class SweepGrid:
    thetas: tuple = (0.0, 0.25, 0.5, 2 / 3, 0.75, 1.0)
    lams: tuple = (0.0, 0.25, 0.5, 2 / 3, 0.75, 1.0)
    alphas: tuple = (0.25, 0.5, 0.75, 1.0)
    ms: tuple = (0.25, 0.5, 1.0)
    qs: tuple = (1.0, 2.0, 3.0, 5.0)
    a: float = 0.0
    b: float = 1.0
    tol: float = DEFAULT_TOL
    seed: int = DEFAULT_SEED

    KEYS = {"theta": "thetas", "lambda": "lams", "alpha": "alphas", "m": "ms", "q": "qs"}

    def __post_init__(self):
        for name in ("thetas", "lams", "alphas", "ms", "qs"):
            values = tuple(float(v) for v in getattr(self, name))
            if not values:
                raise ParameterError(name, "empty sweep")
            object.__setattr__(self, name, values)
        # range checks reuse the model validators
        for theta, lam, m in itertools.product(self.thetas, self.lams, self.ms):
            RuleParams(theta, lam, m, self.a, self.b)
        for alpha, m, q in itertools.product(self.alphas, self.ms, self.qs):
            ConvexityParams(alpha, m, q)
        if not self.tol > 0:
            raise ParameterError("tol", "tol must be > 0")

    @classmethod
    def parse(cls, spec: str, **overrides) -> "SweepGrid":
        """Build a grid from ``"theta=0,1/2;lambda=1/2;q=1,2;a=0;b=1"``.

        Keys left out keep their defaults; values may be fractions.
        """
        kwargs = {}
        for part in filter(None, (p.strip() for p in spec.split(";"))):
            key, sep, values = part.partition("=")
            key = key.strip()
            if not sep:
                raise ParameterError("grid", f"expected key=values, got {part!r}")
            if key in cls.KEYS:
                items = [v for v in values.split(",") if v.strip()]
                kwargs[cls.KEYS[key]] = tuple(_fraction(v) for v in items)
            elif key in ("a", "b"):
                kwargs[key] = _fraction(values)
            else:
                raise ParameterError("grid", f"unknown grid key {key!r}")
        kwargs.update(overrides)
        return cls(**kwargs)

    def rule_points(self):
        return itertools.product(self.thetas, self.lams, self.ms)

    def __len__(self) -> int:
        return len(self.thetas) * len(self.lams) * len(self.alphas) * len(self.ms) * len(self.qs)


def _spec_from_record(rec, index: int) -> FunctionSpec:
    if not isinstance(rec, dict):
        raise CorpusError(f"functions[{index}] is not an object")
    missing = {"name", "f", "fprime", "domain_b"} - rec.keys()
    if missing:
        raise CorpusError(f"functions[{index}] missing {sorted(missing)}")
    unknown = rec.keys() - RECORD_KEYS
    if unknown:
        raise CorpusError(f"functions[{index}] has unknown keys {sorted(unknown)}")
    try:
        claims = tuple(
            ConvexityParams(c["alpha"], c["m"], c["q"]) for c in rec.get("claims", [])
        )
        spec = FunctionSpec(
            name=str(rec["name"]),
            f_expr=str(rec["f"]),
            fprime_expr=str(rec["fprime"]),
            domain_b=rec["domain_b"],
            claimed=claims,
            f4_sup=rec.get("f4_sup"),
        )
        f, fp = parse(spec.f_expr), parse(spec.fprime_expr)
    except (KeyError, TypeError) as exc:
        raise CorpusError(f"functions[{index}]: malformed claim ({exc})") from None
    except (ParameterError, ExprError) as exc:
        raise CorpusError(f"functions[{index}] ({rec.get('name')}): {exc}") from None
    check = validate_derivative(f, fp, spec.domain_b)
    if not check.passed:
        detail = check.error or f"deviation {check.worst_deviation:.3g} at x={check.worst_x:.6g}"
        raise CorpusError(f"{spec.name}: fprime does not match f ({detail})")
    return spec


def parse_corpus(text: str) -> list[Entry]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CorpusError(f"malformed JSON: {exc}") from None
    if not isinstance(doc, dict) or doc.get("schema") != SCHEMA_VERSION:
        raise CorpusError(f"corpus must be an object with \"schema\": {SCHEMA_VERSION}")
    records = doc.get("functions")
    if not isinstance(records, list) or not records:
        raise CorpusError("corpus needs a non-empty \"functions\" list")
    entries = [Entry(_spec_from_record(rec, i)) for i, rec in enumerate(records)]
    names = [e.name for e in entries]
    dupes = sorted({n for n in names if names.count(n) > 1})
    if dupes:
        raise CorpusError(f"duplicate function names: {', '.join(dupes)}")
    return entries


def load_corpus(path: Optional[str | Path] = None) -> list[Entry]:
    """Read and validate a corpus file; ``None`` loads the bundled demo corpus."""
    if path is None:
        return demo_corpus()
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CorpusError(f"cannot read corpus {path}: {exc}") from None
    return parse_corpus(text)


def demo_corpus() -> list[Entry]:
    text = resources.files("amquad").joinpath("data/demo_corpus.json").read_text(encoding="utf-8")
    return parse_corpus(text)


def certify_derivative(entry: Entry, alpha: float, m: float, q: float, b: float, seed: int = DEFAULT_SEED) -> Certificate:
    """Check that |f'|^q is (alpha, m)-convex on [0, b]."""
    fp = entry.fprime

    def g(x):
        return abs(fp(x)) ** q

    return check_alpha_m_convex(g, alpha, m, b, SamplingSpec(seed=seed))


def _check_domain(entries: list[Entry], grid: SweepGrid) -> None:
    for e in entries:
        if grid.b > e.spec.domain_b:
            raise ParameterError("b", f"interval end b={grid.b} exceeds domain_b={e.spec.domain_b} of {e.name}")


def _entry_rows(spec: FunctionSpec, grid: SweepGrid) -> list[dict]:
    entry = Entry(spec)
    f, fp = entry.f, entry.fprime
    certs = {
        (alpha, m, q): certify_derivative(entry, alpha, m, q, grid.b, grid.seed).passed
        for alpha, m, q in itertools.product(grid.alphas, grid.ms, grid.qs)
    }
    rows = []
    for theta, lam, m in grid.rule_points():
        rp = RuleParams(theta, lam, m, grid.a, grid.b)
        d = bounds.defect(f, rp, grid.tol)
        residual = abs(d - lemma_rhs(fp, rp, grid.tol))
        for alpha, q in itertools.product(grid.alphas, grid.qs):
            rep = bounds.bound_report(f, fp, rp, ConvexityParams(alpha, m, q), grid.tol, defect_value=d)
            rows.append({
                "name": spec.name, "theta": theta, "lambda": lam, "alpha": alpha, "m": m, "q": q,
                "defect": rep.defect, "bound_pm": rep.bound_powermean, "b1": rep.b1, "b2": rep.b2,
                "pm_argmin": rep.pm_argmin, "bound_holder": rep.bound_holder, "b3": rep.b3,
                "b4": rep.b4, "h_argmin": rep.h_argmin, "lemma_residual": residual,
                "certified": certs[(alpha, m, q)],
            })
    return rows


def _row_key(row: dict):
    return tuple(row[k] for k in ("name", "theta", "lambda", "alpha", "m", "q"))


def sweep_rows(entries: list[Entry], grid: SweepGrid, jobs: int = 1) -> list[dict]:
    """One row per (function, theta, lambda, alpha, m, q), sorted by that key."""
    _check_domain(entries, grid)
    specs = [e.spec for e in entries]
    if jobs > 1 and len(specs) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_entry_rows, specs, itertools.repeat(grid)))
    else:
        chunks = [_entry_rows(s, grid) for s in specs]
    return sorted(itertools.chain.from_iterable(chunks), key=_row_key)


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(rows: list[dict], out) -> None:
    writer = csv.writer(out, lineterminator="\r\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow([_cell(row[c]) for c in CSV_COLUMNS])


def csv_text(rows: list[dict]) -> str:
    buf = io.StringIO()
    write_csv(rows, buf)
    return buf.getvalue()


@dataclass
class VerifyReport:
    cells: int = 0
    certified_cells: int = 0
    pm_checked: int = 0
    pm_violations: list = field(default_factory=list)
    holder_checked: int = 0
    holder_violations: list = field(default_factory=list)
    residual_checked: int = 0
    residual_failures: list = field(default_factory=list)
    max_residual: float = 0.0
    claims: list = field(default_factory=list)
    skipped: list = field(default_factory=list)
    holder_tighter: int = 0
    powermean_tighter: int = 0

    @property
    def ok(self) -> bool:
        return not (self.pm_violations or self.holder_violations or self.residual_failures)

    @property
    def exit_code(self) -> int:
        return 0 if self.ok else 1

    def summary(self) -> str:
        lines = ["claims (sampled certification of |f'|^q, non-refutation only):"]
        for name, cp, cert in self.claims:
            status = "ok" if cert.passed else f"REFUTED, witness {cert.witness}"
            lines.append(f"  {name}: alpha={cp.alpha:g} m={cp.m:g} q={cp.q:g} -> {status}")
        for name in self.skipped:
            lines.append(f"  warning: {name} skipped from dominance checks (refuted claim)")
        lines += [
            f"cells: {self.cells} ({self.certified_cells} certified)",
            f"identity residual: {self.residual_checked} rule points, max {self.max_residual:.3g}, "
            f"{len(self.residual_failures)} above {RESIDUAL_LIMIT:g}",
            f"power-mean dominance: {self.pm_checked} checked, {len(self.pm_violations)} violations",
            f"holder dominance: {self.holder_checked} checked, {len(self.holder_violations)} violations",
            f"tighter route where both apply: holder {self.holder_tighter}, power-mean {self.powermean_tighter}",
        ]
        for v in (self.pm_violations + self.holder_violations)[:20]:
            lines.append(f"  VIOLATION {v}")
        for v in self.residual_failures[:20]:
            lines.append(f"  RESIDUAL {v}")
        lines.append("PASS" if self.ok else "FAIL")
        return "\n".join(lines)


def run_verify(entries: list[Entry], grid: SweepGrid, jobs: int = 1) -> VerifyReport:
    """Certify claims, then check the identity and both dominance inequalities on every cell."""
    report = VerifyReport()
    for entry in entries:
        for cp in entry.spec.claimed:
            cert = certify_derivative(entry, cp.alpha, cp.m, cp.q, grid.b, grid.seed)
            report.claims.append((entry.name, cp, cert))
            if not cert.passed and entry.name not in report.skipped:
                log.warning("%s: claim alpha=%g m=%g q=%g refuted; skipping dominance", entry.name, cp.alpha, cp.m, cp.q)
                report.skipped.append(entry.name)

    rows = sweep_rows(entries, grid, jobs)
    seen_rule = set()
    for row in rows:
        report.cells += 1
        rule_key = (row["name"], row["theta"], row["lambda"], row["m"])
        if rule_key not in seen_rule:
            seen_rule.add(rule_key)
            report.residual_checked += 1
            report.max_residual = max(report.max_residual, row["lemma_residual"])
            if row["lemma_residual"] > RESIDUAL_LIMIT:
                report.residual_failures.append(rule_key + (row["lemma_residual"],))
        if not row["certified"] or row["name"] in report.skipped:
            continue
        report.certified_cells += 1
        err = abs(row["defect"])
        report.pm_checked += 1
        if err > row["bound_pm"] + DOMINANCE_SLACK:
            report.pm_violations.append(_row_key(row) + (err, row["bound_pm"]))
        if row["bound_holder"] is not None:
            report.holder_checked += 1
            if err > row["bound_holder"] + DOMINANCE_SLACK:
                report.holder_violations.append(_row_key(row) + (err, row["bound_holder"]))
            if row["bound_holder"] < row["bound_pm"]:
                report.holder_tighter += 1
            elif row["bound_pm"] < row["bound_holder"]:
                report.powermean_tighter += 1
    return report


def _frac(value: float) -> str:
    fr = Fraction(value).limit_denominator(1000)
    return str(fr) if math.isclose(float(fr), value, rel_tol=0, abs_tol=1e-12) else f"{value:.12g}"


def run_preset(name: str, entries: list[Entry], q: float = 1.0, alpha: float = 1.0, m: float = 1.0,
               a: float = 0.0, b: float = 1.0, tol: float = DEFAULT_TOL) -> str:
    """Text report of one preset rule with its closed-form prefactors, for every corpus entry."""
    preset = bounds.Preset(name)
    rp = bounds.preset_rule(preset, m, a, b)
    cp = ConvexityParams(alpha, m, q)
    base = coefficients.a1(preset.theta)
    lines = [
        f"preset {preset.value}: theta={_frac(preset.theta)} lambda=1/2 alpha={alpha:g} m={m:g} q={q:g} on [{a:g}, {b:g}]",
        f"power-mean prefactor: ({_frac(base)})^(1-1/q) = {base ** (1 - 1 / q):.12g}",
    ]
    if cp.p is not None:
        lines.append(f"holder prefactor: {bounds.preset_holder_prefactor_text(preset)} = "
                     f"{bounds.preset_holder_prefactor(preset, rp, cp):.12g} (p={cp.p:.12g})")
    for entry in entries:
        if b > entry.spec.domain_b:
            lines.append(f"{entry.name}: skipped (b exceeds domain_b)")
            continue
        rep = bounds.bound_report(entry.f, entry.fprime, rp, cp, tol)
        line = f"{entry.name}: defect={rep.defect:.12g} bound_pm={rep.bound_powermean:.12g}"
        if rep.bound_holder is not None:
            line += f" bound_holder={rep.bound_holder:.12g}"
        lines.append(line)
    return "\n".join(lines)


def lemma_table(entries: list[Entry], grid: SweepGrid) -> list[tuple]:
    """(name, theta, lambda, m, defect, rhs, residual) for every rule point of the grid."""
    _check_domain(entries, grid)
    out = []
    for entry in entries:
        f, fp = entry.f, entry.fprime
        for theta, lam, m in grid.rule_points():
            rp = RuleParams(theta, lam, m, grid.a, grid.b)
            d = bounds.defect(f, rp, grid.tol)
            rhs = lemma_rhs(fp, rp, grid.tol)
            out.append((entry.name, theta, lam, m, d, rhs, abs(d - rhs)))
    return out
