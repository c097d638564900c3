"""Command line entry point.

Exit status: 0 all checks passed, 1 a mathematical check failed, 2 usage or I/O error.
"""
from __future__ import annotations

import argparse
import logging
import sys

from . import campaign
from .convexity import SamplingSpec, check_alpha_m_convex
from .expr import ExprError, compile_expr
from .integrator import DEFAULT_TOL
from .model import EvaluationError, ParameterError

log = logging.getLogger("amquad")


class UsageError(Exception):
    pass


def _seed(text: str) -> int:
    try:
        return int(text, 16)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a hex seed: {text!r}") from None


def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--corpus", help="corpus JSON (default: bundled demo corpus)")
    common.add_argument("--tol", type=float, default=DEFAULT_TOL, help="oracle tolerance")
    common.add_argument("--seed", type=_seed, default=campaign.DEFAULT_SEED, help="hex sampling seed")
    common.add_argument("--out", help="output path")
    common.add_argument("--grid", default="", help='e.g. "theta=0,2/3;lambda=1/2;alpha=1;m=1;q=1,2;a=0;b=1"')
    common.add_argument("--jobs", type=int, default=1, help="worker processes for sweeps")
    common.add_argument("-v", "--verbose", action="store_true")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="amquad", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("verify", parents=[common], help="certify claims, check identity and both bounds")
    sub.add_parser("sweep", parents=[common], help="write one CSV row per grid cell")
    p = sub.add_parser("preset", parents=[common], help="report a named rule with closed-form prefactors")
    p.add_argument("name", help="simpson, trapezoid or midpoint")
    p.add_argument("--q", type=float, default=1.0)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--m", type=float, default=1.0)
    p.add_argument("-a", type=float, default=0.0)
    p.add_argument("-b", type=float, default=1.0)
    c = sub.add_parser("check-convexity", parents=[common], help="sample-check (alpha, m)-convexity of an expression")
    c.add_argument("expr", help="expression in x")
    c.add_argument("--alpha", type=float, default=1.0)
    c.add_argument("--m", type=float, default=1.0)
    c.add_argument("-b", type=float, default=1.0, help="right end of [0, b]")
    sub.add_parser("lemma", parents=[common], help="tabulate the defect against its integral form")
    return parser


def _grid(args) -> campaign.SweepGrid:
    return campaign.SweepGrid.parse(args.grid, tol=args.tol, seed=args.seed)


def _emit(text: str, out: str | None) -> None:
    if out:
        try:
            with open(out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise UsageError(f"cannot write {out}: {exc}") from None
    else:
        sys.stdout.write(text)


def cmd_verify(args) -> int:
    entries = campaign.load_corpus(args.corpus)
    report = campaign.run_verify(entries, _grid(args), args.jobs)
    _emit(report.summary() + "\n", args.out)
    return report.exit_code


def cmd_sweep(args) -> int:
    entries = campaign.load_corpus(args.corpus)
    rows = campaign.sweep_rows(entries, _grid(args), args.jobs)
    _emit(campaign.csv_text(rows), args.out)
    return 0


def cmd_preset(args) -> int:
    entries = campaign.load_corpus(args.corpus)
    try:
        text = campaign.run_preset(args.name, entries, args.q, args.alpha, args.m, args.a, args.b, args.tol)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _emit(text + "\n", args.out)
    return 0


def cmd_check_convexity(args) -> int:
    g = compile_expr(args.expr)
    cert = check_alpha_m_convex(g, args.alpha, args.m, args.b, SamplingSpec(seed=args.seed))
    status = "not refuted" if cert.passed else f"REFUTED at (x, y, t) = {cert.witness}"
    _emit(
        f"{args.expr}: alpha={args.alpha:g} m={args.m:g} on [0, {args.b:g}]: {status}\n"
        f"samples={cert.samples_checked} worst_violation={cert.worst_violation:.6g} slack={cert.slack:.3g}\n",
        args.out,
    )
    return 0 if cert.passed else 1


def cmd_lemma(args) -> int:
    entries = campaign.load_corpus(args.corpus)
    table = campaign.lemma_table(entries, _grid(args))
    lines = ["name,theta,lambda,m,defect,rhs,residual"]
    worst = 0.0
    for name, theta, lam, m, d, rhs, res in table:
        worst = max(worst, res)
        lines.append(",".join([name] + [repr(v) for v in (theta, lam, m, d, rhs, res)]))
    _emit("\n".join(lines) + "\n", args.out)
    print(f"max residual {worst:.3g} over {len(table)} rule points", file=sys.stderr)
    return 0 if worst <= campaign.RESIDUAL_LIMIT else 1


COMMANDS = {
    "verify": cmd_verify,
    "sweep": cmd_sweep,
    "preset": cmd_preset,
    "check-convexity": cmd_check_convexity,
    "lemma": cmd_lemma,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )
    try:
        return COMMANDS[args.command](args)
    except (campaign.CorpusError, ParameterError, ExprError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except EvaluationError as exc:
        print(f"error: evaluation failed: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
