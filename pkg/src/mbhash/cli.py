"""Command-line front end: ``mbhash {thresholds,yield-curve,simulate,selftest}``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import analytics
from .engine import InfeasibleError, SimulationConfig, simulate
from .engine.trials import WORKERS_ENV

EXIT_OK = 0
EXIT_SELFTEST = 1
EXIT_USAGE = 2
EXIT_INFEASIBLE = 3
SIG_DIGITS = 10


def fmt(x: float) -> str:
    return f"{x:.{SIG_DIGITS}g}"


def rounded(obj):
    """Round every float in a JSON-able structure to 10 significant digits."""
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, (float, np.floating)):
        return float(fmt(float(obj)))
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, dict):
        return {str(k): rounded(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [rounded(v) for v in obj]
    return obj


def dump_json(obj) -> str:
    return json.dumps(rounded(obj), sort_keys=True, indent=2) + "\n"


def emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)


def read_config(path: str) -> dict[str, str]:
    """``key = value`` lines; ``#`` starts a comment; dashes in keys become underscores."""
    values: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"{path}:{lineno}: expected key=value")
        values[key.strip().replace("-", "_")] = value.strip()
    return values


# -- commands ---------------------------------------------------------------

def cmd_thresholds(args) -> int:
    targets = analytics.TARGETS if args.target == "all" else (args.target,)
    conventions = analytics.CONVENTIONS if args.convention == "both" else (args.convention,)
    reports = [analytics.threshold_report(t, c).as_dict() for t in targets for c in conventions]
    if args.format == "csv":
        lines = ["target,convention,q_min,p_min,tolerable_noise"]
        lines += [f"{r['target']},{r['convention']},{fmt(r['q_min'])},{fmt(r['p_min'])},{fmt(r['tolerable_noise'])}" for r in reports]
        emit("\n".join(lines) + "\n", args.output)
    else:
        emit(dump_json({"f_min": analytics.f_min_hashing(), "thresholds": reports}), args.output)
    return EXIT_OK


def yield_rows(target: str, q_from: float, q_to: float, steps: int, convention: str) -> list[tuple[float, float, float]]:
    if not q_from < q_to:
        raise ValueError("need q_from < q_to")
    if steps < 2:
        raise ValueError("need at least two steps")
    grid = np.linspace(q_from, q_to, steps)
    return [(float(q), *analytics.yield_curve(target, float(q), convention)) for q in grid]


def cmd_yield_curve(args) -> int:
    rows = yield_rows(args.target, args.q_from, args.q_to, args.steps, args.convention)
    if args.format == "json":
        emit(dump_json({"target": args.target, "convention": args.convention,
                        "rows": [{"q": q, "raw_yield": r, "clamped_yield": c} for q, r, c in rows]}), args.output)
    else:
        lines = ["q,raw_yield,clamped_yield"] + [f"{fmt(q)},{fmt(r)},{fmt(c)}" for q, r, c in rows]
        emit("\n".join(lines) + "\n", args.output)
    return EXIT_OK


def cmd_simulate(args) -> int:
    config = SimulationConfig(
        N=args.N, seed=args.seed, trials=args.trials, mode=args.mode, F=args.F, q=args.q, p=args.p,
        gate_noise=args.gate_noise, M=args.M, delta=args.delta, cutoff=args.cutoff, n_impostors=args.impostors,
    )
    try:
        report = simulate(config, workers=args.workers)
    except InfeasibleError as exc:
        emit(dump_json({"error": "infeasible", "reason": str(exc), "config": {
            "N": config.N, "F": config.decoder_fidelity, "delta": config.delta}}), args.output)
        return EXIT_INFEASIBLE
    emit(dump_json(report), args.output)
    return EXIT_OK


def cmd_selftest(args) -> int:
    from .selftest import run_selftest

    ok, _ = run_selftest(seed=args.seed, stream=sys.stdout)
    return EXIT_OK if ok else EXIT_SELFTEST


# -- parser -----------------------------------------------------------------

def _unit(text: str) -> float:
    v = float(text)
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError(f"{text} is not in [0, 1]")
    return v


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"{text} is not a positive integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mbhash", description="Measurement-based hashing purification toolkit.")
    parser.add_argument("--config", help="key=value file with default flag values")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("thresholds", help="q_min, p_min and tolerable noise per target")
    p.add_argument("--target", choices=analytics.TARGETS + ("all",), default="all")
    p.add_argument("--convention", choices=analytics.CONVENTIONS + ("both",), default="both")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--output")
    p.set_defaults(func=cmd_thresholds)

    p = sub.add_parser("yield-curve", help="raw and clamped yield on a q grid")
    p.add_argument("--target", choices=analytics.TARGETS, default="bell")
    p.add_argument("--convention", choices=analytics.CONVENTIONS, default=analytics.EXACT)
    p.add_argument("--q-from", type=_unit, default=0.8)
    p.add_argument("--q-to", type=_unit, default=1.0)
    p.add_argument("--steps", type=int, default=21)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--output")
    p.set_defaults(func=cmd_yield_curve)

    p = sub.add_parser("simulate", help="Monte Carlo purification report")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--trials", type=_positive, default=100)
    p.add_argument("--mode", choices=("measurement", "gate"), default="measurement")
    p.add_argument("--F", type=_unit, help="input Werner fidelity (overrides --q)")
    p.add_argument("--q", type=_unit, default=1.0, help="input LDN parameter")
    p.add_argument("--p", type=_unit, default=1.0, help="resource LDN parameter")
    p.add_argument("--gate-noise", type=_unit, default=1.0)
    p.add_argument("--M", type=int)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--cutoff", type=float, default=1e-6)
    p.add_argument("--impostors", type=int, default=10_000)
    p.add_argument("--workers", type=_positive, help=f"worker processes (default: ${WORKERS_ENV} or 1)")
    p.add_argument("--format", choices=("json",), default="json")
    p.add_argument("--output")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("selftest", help="run the invariant suites at reduced size")
    p.add_argument("--seed", type=int, default=2024)
    p.set_defaults(func=cmd_selftest)
    return parser


def _apply_config(parser: argparse.ArgumentParser, path: str) -> None:
    values = read_config(path)
    sub = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    for cmd_parser in sub.choices.values():
        known = {a.dest: a for a in cmd_parser._actions}
        defaults = {}
        for key, text in values.items():
            action = known.get(key)
            if action is None:
                continue
            defaults[key] = action.type(text) if action.type else text
            action.required = False
        cmd_parser.set_defaults(**defaults)


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    try:
        if known.config:
            _apply_config(parser, known.config)
    except (OSError, ValueError, argparse.ArgumentTypeError) as exc:
        parser.print_usage(sys.stderr)
        print(f"mbhash: error: config: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"mbhash: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
