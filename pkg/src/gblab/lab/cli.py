"""``gblab run | list-experiments | validate``."""

from __future__ import annotations

import argparse
import logging
import sys

from .experiments import run_scenario
from .report import emit_report
from .scenario import EXPERIMENTS, ValidationError, load_scenario

EXIT_OK, EXIT_FAIL, EXIT_INVALID = 0, 1, 2


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gblab", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run a scenario and emit its report")
    run.add_argument("scenario")
    run.add_argument("--lines", type=_positive, help="lines per Crofton integral")
    run.add_argument("--seed", type=int)
    run.add_argument("--workers", type=_positive, default=1)
    run.add_argument("--out", help="output path (default: stdout)")
    run.add_argument("--format", choices=("json", "csv"), default="json")
    sub.add_parser("list-experiments", help="list experiment names")
    val = sub.add_parser("validate", help="check a scenario file without running it")
    val.add_argument("scenario")
    return p


def _invalid(exc: ValidationError) -> int:
    for path, msg in exc.problems:
        print(f"invalid: {path}: {msg}", file=sys.stderr)
    return EXIT_INVALID


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "list-experiments":
        for name, desc in EXPERIMENTS.items():
            print(f"{name:22s} {desc}")
        return EXIT_OK
    try:
        cfg = load_scenario(args.scenario, getattr(args, "lines", None), getattr(args, "seed", None))
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ValidationError as exc:
        return _invalid(exc)
    if args.command == "validate":
        print(f"ok: {cfg.name or args.scenario} ({cfg.experiment}, hash {cfg.content_hash()[:12]})")
        return EXIT_OK
    report = run_scenario(cfg, workers=args.workers)
    try:
        text = emit_report(report, args.format, args.out)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if args.out is None:
        sys.stdout.write(text)
    if report.error:
        print(f"experiment failed: {report.error}", file=sys.stderr)
    compared = [q for q in report.quantities if q.compared]
    failed = [q.name for q in compared if not q.passed]
    print(f"{len(compared) - len(failed)}/{len(compared)} quantities pass; "
          f"runtime {report.runtime:.1f} s", file=sys.stderr)
    for name in failed:
        print(f"FAIL {name}", file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_FAIL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
