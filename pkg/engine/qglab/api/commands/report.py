"""report: re-read a run directory, print its ledger and replay its verdict."""
import argparse
import sys

from ...core.errors import ConfigError
from ...repositories import ArtifactRepository
from ...repositories.artifacts import REPORT_FILE
from ...schemas import RunReport
from .common import add_common_options, output_dir, resolve_config


def register(subparsers) -> None:
    parser = subparsers.add_parser("report", help="print the stored invariant ledger of a run")
    add_common_options(parser)
    parser.set_defaults(handler=handle_report)


def format_ledger(report: RunReport) -> list[str]:
    lines = [f"{report.command} mode={report.mode} seed={report.seed} passed={report.passed}"]
    for v in report.ledger:
        status = "PASS" if v.passed else ("FAIL" if v.enforced else "info")
        stage = "-" if v.stage is None else str(v.stage)
        lines.append(f"{status:4} stage={stage:>2} {v.name:<40} {v.value:.4e} <= {v.bound:.4e}  [{v.assumption}]")
    if report.failure:
        lines.append(f"failure: {report.failed_assumption}: {report.failure}")
    return lines


def handle_report(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    out = output_dir(config, args)
    if not (out / REPORT_FILE).exists():
        raise ConfigError(f"No {REPORT_FILE} in {out}")
    report = ArtifactRepository(out).read_report()
    print("\n".join(format_ledger(report)))
    if not report.passed:
        print(f"{report.failed_assumption}: {report.failure}", file=sys.stderr)
        return 1
    return 0
