"""Command-line entry point: run certificates, bound a single expression, render reports."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import replace
from pathlib import Path
from typing import Sequence

from shared import s3_utils
from shared.bounder import certify_sup
from shared.config import ConfigError, get_validated_config
from shared.exact_arith import Interval, to_rational
from shared.expr import Chart, NamedExpression
from shared.pipeline import CATALOGUE, ProofReport, report_emit, run_all, run_certificates
from shared.tables import TableFormatError

logger = logging.getLogger(__name__)
logger.setLevel(os.getenv("LOG_LEVEL", "INFO"))

DEFAULT_REPORT = "proof-report.json"

EXIT_VERIFIED = 0
EXIT_UNVERIFIED = 1
EXIT_USAGE = 2


def _write(destination: str, body: str, metadata: dict[str, str] | None = None) -> None:
    if destination.startswith("s3://"):
        bucket, key = s3_utils.parse_s3_uri(destination)
        s3_utils.put_report(bucket, key, body.encode("utf-8"), metadata)
    else:
        Path(destination).write_text(body, encoding="utf-8")


def _read(source: str) -> str:
    if source.startswith("s3://"):
        bucket, key = s3_utils.parse_s3_uri(source)
        return s3_utils.get_report(bucket, key).decode("utf-8")
    path = Path(source)
    if not path.exists():
        raise RuntimeError(f"Report not found: {path}")
    return path.read_text(encoding="utf-8")


def parse_domain(text: str) -> tuple[Chart, Interval]:
    """CHART:LO:HI, e.g. y:0:1 or u:1/3:1."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"domain must look like CHART:LO:HI, got {text!r}")
    return Chart(parts[0]), Interval(to_rational(parts[1]), to_rational(parts[2]))


def cmd_certify(args: argparse.Namespace) -> int:
    cfg = get_validated_config(args.config)
    if args.ids == ["all"]:
        report = run_all(cfg)
    else:
        unknown = [i for i in args.ids if i not in CATALOGUE]
        if unknown:
            raise ValueError(f"unknown certificate IDs: {', '.join(unknown)}")
        report = run_certificates(args.ids, cfg)
    out = args.out
    if out is None and cfg.report_bucket:
        out = f"s3://{cfg.report_bucket}/reports/{'-'.join(report.requested)}.json"
    metadata = {"verdict": report.verdict, **{f"sha256-{k}": v for k, v in report.table_checksums.items()}}
    _write(out or DEFAULT_REPORT, report_emit(report, "json"), metadata)
    print(report_emit(report, "text"), end="")
    return EXIT_VERIFIED if report.all_requested_verified else EXIT_UNVERIFIED


def cmd_bound(args: argparse.Namespace) -> int:
    cfg = get_validated_config(args.config)
    expr = NamedExpression.from_json(json.loads(Path(args.expr).read_text(encoding="utf-8")))
    chart, box = parse_domain(args.domain)
    if chart is not expr.chart:
        raise ValueError(f"expression {expr.id} is written in chart {expr.chart.value}, not {chart.value}")
    settings = cfg.settings_for("default")
    budget = settings.budget()
    if args.max_depth:
        budget = replace(budget, max_depth=args.max_depth)
    certificate = certify_sup(
        expr, to_rational(args.target), budget=budget, precision=settings.precision(), workers=cfg.workers, domain=box
    )
    print(json.dumps(certificate.to_json(include_timing=True), indent=2, sort_keys=True))
    return EXIT_VERIFIED if certificate.certified else EXIT_UNVERIFIED


def cmd_report(args: argparse.Namespace) -> int:
    report = ProofReport.from_json(json.loads(_read(args.input)))
    body = report_emit(report, args.format)
    if args.out:
        _write(args.out, body)
    else:
        print(body, end="")
    return EXIT_VERIFIED if report.all_requested_verified else EXIT_UNVERIFIED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="certify_cli", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("certify", help="run certificates (and their dependencies)")
    run.add_argument("ids", nargs="+", help="'all' or certificate IDs such as C1 C7")
    run.add_argument("--config", help="key/value budget file (overrides CERTIFY_CONFIG)")
    run.add_argument("--out", help=f"report destination, a path or s3://bucket/key (default {DEFAULT_REPORT})")
    run.set_defaults(handler=cmd_certify)

    bound = sub.add_parser("bound", help="certify a sup bound for one serialized expression")
    bound.add_argument("--expr", required=True, help="JSON file holding a named expression")
    bound.add_argument("--target", required=True, help="rational target P/Q")
    bound.add_argument("--domain", required=True, help="CHART:LO:HI")
    bound.add_argument("--max-depth", type=int, dest="max_depth", help="overrides default.max_depth from the budget file")
    bound.add_argument("--config", help="key/value budget file (overrides CERTIFY_CONFIG)")
    bound.set_defaults(handler=cmd_bound)

    report = sub.add_parser("report", help="render a stored proof report")
    report.add_argument("--format", choices=("json", "text"), default="text")
    report.add_argument("--input", default=DEFAULT_REPORT, help="path or s3://bucket/key")
    report.add_argument("--out", help="path or s3://bucket/key (default stdout)")
    report.set_defaults(handler=cmd_report)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    logging.basicConfig(level=os.getenv("LOG_LEVEL", "INFO"))
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except (ConfigError, TableFormatError, RuntimeError, ValueError) as exc:
        logger.error("Command failed", extra={"command": args.command, "error": str(exc)})
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
