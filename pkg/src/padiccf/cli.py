"""Command-line interface.

Exit codes: 0 success, 2 invalid input, 3 non-terminating rational under
``--strict``, 4 a transformation run that stalled without any output.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import experiments, metrics
from .bilinear import BilinearEngine
from .engine import SingularMatrixError
from .expansion import (
    Algorithm,
    ExplicitStream,
    NonTerminatingDetected,
    PeriodicStream,
    expansion_to_json,
    make_stream,
)
from .moebius import MoebiusEngine
from .padic import DigitConvention, PadicContext, format_fraction, parse_fraction
from .surd import surd_from_spec

EXIT_OK, EXIT_INVALID, EXIT_NONTERMINATING, EXIT_STALLED = 0, 2, 3, 4


class UsageError(ValueError):
    pass


def _fractions(text: str, count: int | None = None) -> list[Fraction]:
    parts = [s for s in text.split(",") if s.strip()]
    if count is not None and len(parts) != count:
        raise UsageError(f"expected {count} comma-separated rationals, got {text!r}")
    return [parse_fraction(s) for s in parts]


def parse_input(spec: str, p: int, algorithm: Algorithm, strict: bool = False):
    """``rat:NUM/DEN``, ``surd:A,B,C,D[,branch]`` for (A+B*sqrt(D))/C, or ``cf:PRE[;PERIOD]``."""
    kind, _, body = spec.partition(":")
    kind = kind.strip().lower()
    if kind == "rat":
        return make_stream(parse_fraction(body), p, algorithm, strict)
    if kind == "surd":
        vals = [int(s) for s in body.split(",")]
        if len(vals) not in (4, 5):
            raise UsageError("surd needs A,B,C,D[,branch]")
        return make_stream(surd_from_spec(*vals[:4], p, vals[4] if len(vals) == 5 else None), p, algorithm, strict)
    if kind == "cf":
        pre, sep, period = body.partition(";")
        if sep:
            return PeriodicStream(_fractions(pre), _fractions(period), p, algorithm)
        return ExplicitStream(_fractions(pre), p, algorithm)
    raise UsageError(f"unknown input kind {kind!r} (use rat:, surd: or cf:)")


def _context(p: int) -> PadicContext:
    return PadicContext(p)


def _positive(name, value):
    if value < 0:
        raise UsageError(f"{name} must be non-negative")


def cmd_expand(args) -> int:
    _context(args.p)
    _positive("--count", args.count)
    algorithm = Algorithm.parse(args.algo)
    stream = parse_input(args.input, args.p, algorithm, args.strict)
    if args.strict and hasattr(stream, "detect_cycle"):
        stream.detect_cycle(max(args.count, 1) + 1)
    data = expansion_to_json(stream, args.count)
    terms = stream.take(args.count)
    print(", ".join(format_fraction(a) for a in terms))
    print("terminated" if data["terminated"] else "not terminated")
    if "nonterminating_cycle" in data:
        print(f"complete quotients repeat from index {data['nonterminating_cycle']}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(data, fh, indent=2)
    return EXIT_OK


def _report_trace(trace, args) -> int:
    print(", ".join(format_fraction(l) for l in trace.outputs))
    print(f"status: {trace.status.value}; inputs consumed: {', '.join(map(str, trace.inputs_consumed))}")
    if args.trace:
        with open(args.trace, "w") as fh:
            fh.write(trace.dumps())
    return EXIT_STALLED if trace.stalled else EXIT_OK


def cmd_moebius(args) -> int:
    _context(args.p)
    _positive("--max-inputs", args.max_inputs)
    _positive("--max-outputs", args.max_outputs)
    algorithm = Algorithm.parse(args.algo)
    coeffs = _fractions(args.coeffs, 4)
    stream = parse_input(args.alpha, args.p, algorithm)
    engine = MoebiusEngine(coeffs, stream, max_inputs=args.max_inputs, max_outputs=args.max_outputs, rule=args.rule)
    return _report_trace(engine.run(), args)


def cmd_bilinear(args) -> int:
    _context(args.p)
    _positive("--max-inputs", args.max_inputs)
    _positive("--max-outputs", args.max_outputs)
    algorithm = Algorithm.parse(args.algo)
    coeffs = _fractions(args.coeffs, 4) + _fractions(args.coeffs2, 4)
    alpha = parse_input(args.alpha, args.p, algorithm)
    beta = parse_input(args.beta, args.p, algorithm)
    engine = BilinearEngine(coeffs, alpha, beta, max_inputs=args.max_inputs, max_outputs=args.max_outputs, rule=args.rule)
    return _report_trace(engine.run(), args)


def cmd_experiment(args) -> int:
    _context(args.p)
    if args.trials < 1 or args.outputs < 1 or args.coeff_range < 1:
        raise UsageError("--trials, --outputs and --coeff-range must be positive")
    if args.kind == "mobius-staircase":
        rows = experiments.mobius_staircase(args.p, args.algo, args.surd, args.trials, args.outputs,
                                            args.coeff_range, args.seed, args.branch, args.max_inputs, args.rule)
        header = experiments.MOBIUS_HEADER
    else:
        rows = experiments.bilinear_staircase(args.p, args.algo, args.surd, args.surd2, args.trials, args.outputs,
                                              args.coeff_range, args.seed, args.max_inputs, args.rule)
        header = experiments.BILINEAR_HEADER
    experiments.write_rows(header, rows, args.csv if args.csv else sys.stdout)
    return EXIT_OK


def cmd_metrics(args) -> int:
    _context(args.p)
    if args.samples < 1 or args.depth < 1 or args.kmax < 1 or args.quotients < 1:
        raise UsageError("--samples, --depth, --kmax and --quotients must be positive")
    algorithm = Algorithm.parse(args.algo)
    odd = algorithm is Algorithm.MR
    reports = metrics.valuation_histogram(
        algorithm, metrics.HaarSampler(args.p, args.seed, args.depth), args.quotients, args.samples, args.kmax)
    conv = DigitConvention.BROWKIN_T if odd else algorithm.convention(1)
    for y in metrics.values_with_valuation(args.p, 1, conv):
        # a fresh sampler per target keeps every row reproducible on its own
        reports.append(metrics.frequency_of_value(
            y, algorithm, metrics.HaarSampler(args.p, args.seed, args.depth), args.quotients, args.samples))
    metrics.write_csv(reports, args.csv if args.csv else sys.stdout)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="padiccf", description="Exact p-adic continued fractions and their transformations.")
    sub = parser.add_subparsers(dest="command", required=True)
    algos = ["ruban", "browkin1", "mr"]

    e = sub.add_parser("expand", help="expand a rational, surd or explicit continued fraction")
    e.add_argument("--p", type=int, required=True)
    e.add_argument("--algo", choices=algos, default="ruban")
    e.add_argument("--input", required=True, help="rat:NUM/DEN | surd:A,B,C,D[,branch] | cf:PRE[;PERIOD]")
    e.add_argument("--count", type=int, default=20)
    e.add_argument("--strict", action="store_true", help="fail when a rational expansion repeats")
    e.add_argument("--json")
    e.set_defaults(func=cmd_expand)

    for name, func in (("moebius", cmd_moebius), ("bilinear", cmd_bilinear)):
        m = sub.add_parser(name, help=f"stream the expansion of a {name} transformation")
        m.add_argument("--p", type=int, required=True)
        m.add_argument("--algo", choices=algos if name == "moebius" else algos[:2], default="ruban")
        m.add_argument("--coeffs", required=True, help="x,y,z,t")
        m.add_argument("--alpha", required=True)
        if name == "bilinear":
            m.add_argument("--coeffs2", required=True, help="e,f,g,h")
            m.add_argument("--beta", required=True)
        m.add_argument("--max-inputs", type=int, default=10_000)
        m.add_argument("--max-outputs", type=int, default=100)
        m.add_argument("--rule", choices=["standard", "exact"], default="standard")
        m.add_argument("--trace")
        m.set_defaults(func=func)

    x = sub.add_parser("experiment", help="input/output staircase CSVs")
    x.add_argument("kind", choices=["mobius-staircase", "bilinear-staircase"])
    x.add_argument("--p", type=int, required=True)
    x.add_argument("--algo", choices=algos[:2], default="ruban")
    x.add_argument("--surd", type=int, required=True, help="D, with alpha = sqrt(D)")
    x.add_argument("--surd2", type=int, default=151, help="D for beta = sqrt(D) (bilinear; 151 pairs with --surd 79 at p=7)")
    x.add_argument("--branch", type=int)
    x.add_argument("--trials", type=int, default=10)
    x.add_argument("--outputs", type=int, default=100)
    x.add_argument("--coeff-range", type=int, default=10_000)
    x.add_argument("--max-inputs", type=int, default=4_000)
    x.add_argument("--rule", choices=["standard", "exact"], default="standard")
    x.add_argument("--seed", type=int, default=0)
    x.add_argument("--csv")
    x.set_defaults(func=cmd_experiment)

    s = sub.add_parser("metrics", help="Monte-Carlo quotient frequencies")
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--algo", choices=algos, default="ruban")
    s.add_argument("--samples", type=int, default=1000)
    s.add_argument("--depth", type=int, default=120)
    s.add_argument("--quotients", type=int, default=30)
    s.add_argument("--kmax", type=int, default=3)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--csv")
    s.set_defaults(func=cmd_metrics)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NonTerminatingDetected as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONTERMINATING
    except (SingularMatrixError, UsageError, ValueError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
