"""``copri`` command-line entry point."""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence, TextIO

from .analysis import CHECK_KINDS, CHECK_SLUGS, AnalysisConfig, CheckId, UnknownCheckId, parse_check_ids, run_all
from .cml import parse_model
from .diagnostics import DiagnosticError, error
from .report import FailOn, Report, exit_code, render_json, render_text
from .schema import Level, Sensitivity
from .wellformedness import check_wellformedness


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(f"{self.prog}: error: {message}")


def _level(text: str) -> Level:
    try:
        return Level.from_letter(text.upper())
    except (KeyError, ValueError):
        raise argparse.ArgumentTypeError(f"expected L, M or H, got {text!r}") from None


def _sensitivity(text: str) -> Sensitivity:
    try:
        return Sensitivity.from_letter(text.upper())
    except (KeyError, ValueError):
        raise argparse.ArgumentTypeError(f"expected R, C, S or T, got {text!r}") from None


def _checks(text: str) -> tuple[CheckId, ...]:
    try:
        return parse_check_ids(text)
    except UnknownCheckId as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="copri", description="Analyze COPri privacy requirements models.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    check = sub.add_parser("check", help="parse, validate and analyze model files")
    check.add_argument("files", nargs="*", metavar="FILE")
    check.add_argument("--format", choices=["text", "json"], default="text")
    check.add_argument("--checks", type=_checks, default=tuple(CheckId), metavar="LIST",
                       help="comma list of ids, ranges (CQ16-CQ26) or names; default all")
    check.add_argument("--severity", type=_level, metavar="L|M|H", help="CQ8 severity filter")
    check.add_argument("--probability", type=_level, metavar="L|M|H", help="CQ13 probability filter")
    check.add_argument("--sensitivity", type=_sensitivity, metavar="R|C|S|T", help="CQ3 sensitivity filter")
    check.add_argument("--fail-on", choices=[f.value for f in FailOn], default=FailOn.VIOLATION.value)
    check.add_argument("--parts-inherit-permissions", action="store_true",
                       help="a permission over a composite also covers its parts")
    check.add_argument("--list-checks", action="store_true", help="print the available checks and exit")
    return parser


@dataclass(frozen=True)
class CliConfig:
    files: tuple[str, ...]
    format: str
    analysis: AnalysisConfig
    fail_on: FailOn


def check_file(path: str, config: AnalysisConfig) -> Report:
    """Parse, validate and (when free of Errors) analyze one file."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except FileNotFoundError:
        return Report(model="", file=path, diagnostics=(error("FileNotFound", f"no such file: {path}"),))
    except (OSError, UnicodeDecodeError) as exc:
        return Report(model="", file=path, diagnostics=(error("UnreadableFile", f"cannot read {path}: {exc}"),))
    try:
        graph = parse_model(text, path)
    except DiagnosticError as exc:
        return Report(model=Path(path).stem, file=path, diagnostics=tuple(exc.diagnostics))
    diagnostics = check_wellformedness(graph)
    if any(d.is_error for d in diagnostics):
        return Report(model=graph.name, file=path, diagnostics=tuple(diagnostics))
    findings = run_all(graph, config)
    return Report(model=graph.name, file=path, diagnostics=tuple(diagnostics), findings=tuple(findings))


def _list_checks(out: TextIO) -> None:
    for check in CheckId:
        out.write(f"{check.value:<5} {CHECK_SLUGS[check]:<32} {CHECK_KINDS[check].value}\n")


def run(argv: Sequence[str] | None = None, stdout: TextIO | None = None, stderr: TextIO | None = None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.list_checks:
            _list_checks(stdout)
            return 0
        if not args.files:
            parser.error("at least one input file is required")
    except UsageError as exc:
        stderr.write(f"{exc}\n")
        return 2
    except SystemExit as exc:  # --help
        return int(exc.code or 0)

    config = CliConfig(
        files=tuple(args.files),
        format=args.format,
        analysis=AnalysisConfig(
            checks=args.checks,
            severity=args.severity,
            probability=args.probability,
            sensitivity=args.sensitivity,
            parts_inherit_permissions=args.parts_inherit_permissions,
        ),
        fail_on=FailOn(args.fail_on),
    )
    with ThreadPoolExecutor() as pool:
        reports = list(pool.map(lambda p: check_file(p, config.analysis), config.files))

    for report in reports:
        for d in report.diagnostics:
            stderr.write(f"{d}\n")
    if config.format == "json":
        stdout.write(render_json(reports[0] if len(reports) == 1 else reports))
    else:
        stdout.write(render_text(reports))
    return exit_code(reports, config.fail_on)


def main(argv: Sequence[str] | None = None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
