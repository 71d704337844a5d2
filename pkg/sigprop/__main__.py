"""sigprop entry point."""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from sigprop.errors import ConfigError, PropertyError, SigpropError, TraceError

EXIT_HOLDS = 0
EXIT_PROPERTY_ERROR = 3
EXIT_TRACE_ERROR = 4


def _log(message: str, quiet: bool = False) -> None:
    if not quiet:
        print(f"[sigprop] {message}", file=sys.stderr)


def _error(message: str) -> None:
    print(f"[sigprop] ERROR: {message}", file=sys.stderr)


def _parse_bindings(pairs: list[str]) -> dict[str, str]:
    bindings: dict[str, str] = {}
    for pair in pairs:
        old, sep, new = pair.partition("=")
        if not sep or not old or not new:
            raise ConfigError(f"--bind expects old=new, got {pair!r}")
        bindings[old.strip()] = new.strip()
    return bindings


def _read_properties(path: str):
    from sigprop.parser import parse

    p = Path(path)
    if not p.is_file():
        raise PropertyError(f"property file not found: {p}")
    return parse(p.read_text(encoding="utf-8"))


def cmd_check(args: argparse.Namespace) -> int:
    """Evaluate a property file against a trace."""
    from sigprop.config import load_config
    from sigprop.engine import evaluate
    from sigprop.report import render
    from sigprop.trace import load_trace
    from sigprop.typecheck import typecheck

    config = load_config(args.config, quiet=args.quiet)

    # CLI flags override the config file, which overrides defaults
    if args.format is not None:
        config.output.format = args.format
    if args.interp is not None:
        config.eval.interp = args.interp
    if args.eq_tol is not None:
        config.eval.eq_tol = args.eq_tol
    if args.deriv_tol is not None:
        config.eval.deriv_tol = args.deriv_tol
    if args.prominence is not None:
        config.eval.prominence = args.prominence
    if args.end_policy is not None:
        config.eval.end_policy = args.end_policy
    if args.report is not None:
        config.output.report = args.report
    config.validate()

    bindings = _parse_bindings(args.bind or [])
    trace = load_trace(args.trace, config.trace.delimiter, config.trace.time_column)
    if bindings:
        trace = trace.bind(bindings)
    _log(f"Trace {args.trace}: {len(trace)} samples, signals {', '.join(trace.names)}", args.quiet)

    try:
        props = _read_properties(args.props)
        checked = [typecheck(p, trace.names) for p in props]
    except PropertyError as e:
        raise e.in_file(args.props)

    started = time.perf_counter()
    report = evaluate(checked, trace, config.eval, threads=config.runtime.threads)
    _log(f"Checked {len(checked)} properties in {time.perf_counter() - started:.3f}s", args.quiet)

    output = render(report, config.output.format)
    if config.output.report:
        Path(config.output.report).write_text(output, encoding="utf-8")
        _log(f"Report written to {config.output.report}", args.quiet)
    else:
        sys.stdout.write(output)
    return report.exit_code


def cmd_fmt(args: argparse.Namespace) -> int:
    """Print a property file in canonical form."""
    from sigprop.printer import format_properties

    try:
        props = _read_properties(args.file)
    except PropertyError as e:
        raise e.in_file(args.file)
    sys.stdout.write(format_properties(props))
    return EXIT_HOLDS


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sigprop",
        description="sigprop: offline checker for signal-based temporal properties",
    )
    subparsers = parser.add_subparsers(dest="subcmd")

    # --- check ---
    p_check = subparsers.add_parser("check", help="Check a property file against a CSV trace")
    p_check.add_argument("--trace", required=True, help="CSV trace with a time column")
    p_check.add_argument("--props", required=True, help="Property file (.sbp)")
    p_check.add_argument("--format", choices=("text", "json"), default=None, help="Report format (default: text)")
    p_check.add_argument("--interp", choices=("grid", "linear"), default=None, help="Interval endpoint semantics")
    p_check.add_argument("--eq-tol", type=float, default=None, help="Tolerance for value and time comparisons")
    p_check.add_argument("--deriv-tol", type=float, default=None, help="Tolerance for derivative sign tests")
    p_check.add_argument("--prominence", type=float, default=None, help="Minimum swing between alternating extrema")
    p_check.add_argument(
        "--end-policy", choices=("inconclusive", "strict"), default=None,
        help="Verdict for obligations cut off by the end of the trace",
    )
    p_check.add_argument(
        "--bind", action="append", metavar="OLD=NEW",
        help="Evaluate references to OLD against trace column NEW (repeatable)",
    )
    p_check.add_argument("--report", default=None, help="Write the report to this file instead of stdout")
    p_check.add_argument("-c", "--config", default=None, help="Path to sigprop.yaml")
    p_check.add_argument("-q", "--quiet", action="store_true", help="Only print errors on stderr")
    p_check.set_defaults(func=cmd_check)

    # --- fmt ---
    p_fmt = subparsers.add_parser("fmt", help="Print a property file in canonical form")
    p_fmt.add_argument("file", help="Property file (.sbp)")
    p_fmt.set_defaults(func=cmd_fmt)

    return parser


def run_cli(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_HOLDS if e.code == 0 else EXIT_PROPERTY_ERROR

    if not args.subcmd:
        parser.print_help()
        print()
        print("Quick start:")
        print("  sigprop check --trace run.csv --props spec.sbp     # text report")
        print("  sigprop check --trace run.csv --props spec.sbp --format json")
        print("  sigprop fmt spec.sbp                                # canonical form")
        return EXIT_HOLDS

    try:
        return args.func(args)
    except TraceError as e:
        _error(str(e))
        return EXIT_TRACE_ERROR
    except SigpropError as e:
        _error(str(e))
        return EXIT_PROPERTY_ERROR


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
