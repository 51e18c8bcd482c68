"""Command line front end.

fracstep run     sweep one scheme over alpha and tau ladders, write a report
fracstep verify  run the built-in invariant checks and print pass/fail lines

Exit status is 0 on success and 1 when a precondition is rejected or a
check fails; rejections print a single diagnostic line on stderr.
"""

from __future__ import annotations

import argparse
import sys

from .experiments import EXAMPLES, ExperimentConfig, measure
from .reporting import FORMATS, emit
from .verify import run_checks


def _parse_float_list(text: str, flag: str) -> tuple:
    items = [piece.strip() for piece in text.split(",") if piece.strip()]
    if not items:
        raise ValueError(f"{flag} needs at least one value")
    try:
        return tuple(float(piece) for piece in items)
    except ValueError:
        raise ValueError(f"{flag} expects comma-separated numbers, got {text!r}") from None


def _parse_int_list(text: str, flag: str) -> tuple:
    values = _parse_float_list(text, flag)
    out = []
    for v in values:
        if v != int(v):
            raise ValueError(f"{flag} expects integers, got {v}")
        out.append(int(v))
    return tuple(out)


def _parse_eval(text: str):
    if text == "max":
        return "max", 0.5
    if text.startswith("fixed:"):
        try:
            t_star = float(text[len("fixed:"):])
        except ValueError:
            raise ValueError(f"bad eval time in {text!r}") from None
        return "fixed", t_star
    raise ValueError(f"--eval expects 'fixed:<t>' or 'max', got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fracstep",
        description="Convolution-quadrature time stepping for subdiffusion, with convergence sweeps.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    runp = sub.add_parser("run", help="run a convergence sweep and write a report")
    runp.add_argument("--example", required=True, choices=list(EXAMPLES))
    runp.add_argument("--scheme", required=True, choices=["acn", "macn", "bdf2"])
    runp.add_argument("--generator", required=True, choices=["fbdf2", "gng2"])
    runp.add_argument("--alpha", required=True, help="comma-separated orders in (0, 1)")
    runp.add_argument("--nsteps", required=True, help="comma-separated step counts, powers of two")
    runp.add_argument("--space", required=True, choices=["spectral", "fem"])
    runp.add_argument("--h", type=float, default=None, help="fem mesh width (must divide pi)")
    runp.add_argument("--eval", dest="eval_spec", default="fixed:0.5",
                      help="'fixed:<t>' or 'max' (default fixed:0.5)")
    runp.add_argument("--nref", type=int, default=None,
                      help="reference step count for problems without a closed form")
    runp.add_argument("--out", required=True, help="report file path")
    runp.add_argument("--format", dest="fmt", choices=list(FORMATS), default="csv")

    sub.add_parser("verify", help="check the built-in invariants")
    return parser


def _run_command(args: argparse.Namespace) -> int:
    alphas = _parse_float_list(args.alpha, "--alpha")
    n_steps = _parse_int_list(args.nsteps, "--nsteps")
    eval_mode, eval_time = _parse_eval(args.eval_spec)
    config = ExperimentConfig(
        example=args.example,
        alphas=alphas,
        n_steps=n_steps,
        scheme_family=args.scheme,
        generator_kind=args.generator,
        space=args.space,
        h=args.h,
        eval_mode=eval_mode,
        eval_time=eval_time,
        n_ref=args.nref,
    )
    report = measure(config)
    emit(report, args.out, args.fmt)
    for flag in report.metadata["flags"]:
        print(f"note: {flag}")
    print(f"wrote {len(report.rows)} rows to {args.out}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "verify":
        return run_checks()
    try:
        return _run_command(args)
    except (ValueError, ArithmeticError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
