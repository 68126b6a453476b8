"""Command-line front end.

    svat validate MODEL
    svat run MODEL --start C001 --end C003 --link-cap 1 [--trace OUT] [--filters F]
             [--count-only] [--timeout S] [--no-rules]
    svat bench --model 2 --caps 1..8 [--timeout S] [--format text|csv]

Exit status: 0 ok, 1 bad arguments, 2 invalid model or filters, 3 I/O error,
4 timed out. Summaries go to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from .bench import run_bench
from .engine import ConfigError, RunConfig, enumerate_paths
from .filters import FilterError, apply_filters, check_filters
from .model import EntityId, Kind, validate_model
from .modelfmt import ParseError, parse_filters, parse_model
from .pathchain import serialize_record

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_IO, EXIT_TIMEOUT = 0, 1, 2, 3, 4


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse exits 2 by default; 2 is reserved for invalid models
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _container(text: str) -> EntityId:
    try:
        return EntityId.parse(text, Kind.CONTAINER)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _caps(text: str) -> range:
    lo, sep, hi = text.partition("..")
    try:
        a = int(lo)
        b = int(hi) if sep else a
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected A..B, got {text!r}") from None
    if a < 1 or b < a:
        raise argparse.ArgumentTypeError(f"cap range must satisfy 1 <= A <= B, got {text!r}")
    return range(a, b + 1)


def _positive(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected seconds, got {text!r}") from None
    if value <= 0:
        raise argparse.ArgumentTypeError("timeout must be positive")
    return value


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _diagnose(path: str, exc: ParseError) -> None:
    for d in exc.diagnostics:
        print(f"{path}:{d.line}:{d.column}: {d.message}", file=sys.stderr)


def cmd_validate(args: argparse.Namespace) -> int:
    try:
        text = _read(args.model)
    except (OSError, UnicodeDecodeError) as exc:
        print(f"{args.model}: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        model = parse_model(text)
    except ParseError as exc:
        _diagnose(args.model, exc)
        return EXIT_INVALID
    for issue in validate_model(model).warnings:
        print(f"{args.model}: {issue}", file=sys.stderr)
    print(
        f"{args.model}: ok ({len(model.containers)} containers, {len(model.links)} links, "
        f"{len(model.facts)} facts, {len(model.rules)} rules, {len(model.properties)} properties)"
    )
    return EXIT_OK


def cmd_run(args: argparse.Namespace) -> int:
    if args.count_only and (args.trace or args.filters):
        raise _UsageError("--count-only cannot be combined with --trace or --filters")
    try:
        model_text = _read(args.model)
        filter_text = _read(args.filters) if args.filters else None
    except (OSError, UnicodeDecodeError) as exc:
        print(f"svat: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        model = parse_model(model_text)
    except ParseError as exc:
        _diagnose(args.model, exc)
        return EXIT_INVALID
    filters = None
    if filter_text is not None:
        try:
            filters = parse_filters(filter_text)
            check_filters(filters, model)
        except ParseError as exc:
            _diagnose(args.filters, exc)
            return EXIT_INVALID
        except FilterError as exc:
            print(f"{args.filters}: {exc}", file=sys.stderr)
            return EXIT_INVALID

    try:
        config = RunConfig(
            args.start,
            args.end,
            args.link_cap,
            trace_enabled=bool(args.trace),
            count_only=args.count_only,
            timeout=args.timeout,
            apply_rules=not args.no_rules,
            keep_paths=filters is not None,
        )
    except ConfigError as exc:
        raise _UsageError(str(exc)) from None

    try:
        if args.trace:
            with open(args.trace, "w", encoding="ascii", newline="\n") as out:
                result = enumerate_paths(model, config, on_record=lambda r: out.write(serialize_record(r)))
        else:
            result = enumerate_paths(model, config)
    except ConfigError as exc:
        raise _UsageError(str(exc)) from None
    except OSError as exc:
        print(f"svat: {exc}", file=sys.stderr)
        return EXIT_IO

    s = result.stats
    print(f"final paths: {s.final_paths}")
    if filters is not None:
        kept = apply_filters(result.final_paths, filters, model, config.apply_rules)
        print(f"filtered paths: {len(kept)}")
    print(f"trace records: {s.trace_records}")
    print(f"dead ends: {s.dead_ends}")
    print(f"max depth: {s.max_depth}")
    print(f"elapsed: {s.elapsed:.3f} s")
    if not s.completed:
        print("status: did not complete (timeout)")
        return EXIT_TIMEOUT
    print("status: complete")
    return EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    report = run_bench(args.model, args.caps, args.timeout)
    sys.stdout.write(report.to_csv() if args.format == "csv" else report.to_text())
    return EXIT_OK if report.completed else EXIT_TIMEOUT


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="svat", description="Attack path enumeration over container/link/rule network models.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("validate", help="check a model file")
    p.add_argument("model")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("run", help="enumerate paths between two containers")
    p.add_argument("model")
    p.add_argument("--start", type=_container, required=True)
    p.add_argument("--end", type=_container, required=True)
    p.add_argument("--link-cap", type=int, default=1)
    p.add_argument("--trace", metavar="PATH", help="write one path-chain record per explored path")
    p.add_argument("--filters", metavar="PATH", help="filter file applied to the final paths")
    p.add_argument("--count-only", action="store_true", help="keep counts only")
    p.add_argument("--timeout", type=_positive, metavar="SECONDS")
    p.add_argument("--no-rules", action="store_true", help="traverse without evaluating rules")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("bench", help="link-cap sweep over a benchmark model")
    p.add_argument("--model", type=int, choices=(1, 2, 3), required=True)
    p.add_argument("--caps", type=_caps, required=True, metavar="A..B")
    p.add_argument("--timeout", type=_positive, metavar="SECONDS", help="per-cap limit")
    p.add_argument("--format", choices=("text", "csv"), default="text")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"svat: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
