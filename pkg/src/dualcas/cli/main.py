"""Command-line entry point: ``dualcas run|audit|check``."""

from __future__ import annotations

import argparse
import logging
import sys

from ..checks import run_checks
from .config import ConfigError, load_config
from .runner import EXIT_AUDIT_FAILED, EXIT_ERROR, EXIT_OK, run


def _add_common(p):
    p.add_argument("config", help="scenario file (key = value with [section] headers)")
    p.add_argument("--out-dir", default=".", help="directory for CSV/JSON output (default: .)")
    p.add_argument("--tol", type=float, default=None, help="audit tolerance, overrides [run] tol")
    p.add_argument("--emit-plot-data", action="store_true",
                   help="also write two-column distance/value files per component")
    p.add_argument("--threads", type=int, default=1, help="worker threads for the distance grid")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dualcas",
        description="Dispersion forces of magnetoelectric bodies and atoms with duality audits.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)
    _add_common(sub.add_parser("run", help="compute the scenario table (audits too for audit-* kinds)"))
    _add_common(sub.add_parser("audit", help="compute the scenario and audit it against its dual"))
    sub.add_parser("check", help="run the built-in invariant suite")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "check":
        failed = 0
        for name, ok, detail in run_checks():
            print(f"{'PASS' if ok else 'FAIL'}  {name:24s} {detail}")
            failed += not ok
        return EXIT_OK if failed == 0 else EXIT_AUDIT_FAILED
    if args.threads < 1:
        print("dualcas: --threads must be >= 1", file=sys.stderr)
        return EXIT_ERROR
    try:
        cfg = load_config(args.config)
    except OSError as exc:
        print(f"dualcas: cannot read {args.config}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except ConfigError as exc:
        for diag in exc.diagnostics:
            print(f"{args.config}: {diag}", file=sys.stderr)
        return EXIT_ERROR
    audit = True if args.command == "audit" else None
    return run(cfg, args.out_dir, args.tol, args.emit_plot_data, args.threads, audit)


if __name__ == "__main__":
    sys.exit(main())
