"""Report assembly, rendering and exit-code policy."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

from .analysis import Finding, sort_findings
from .diagnostics import Diagnostic, Severity, sort_diagnostics

SCHEMA = "copri-report/1"


class FailOn(str, Enum):
    VIOLATION = "violation"
    WARNING = "warning"
    NEVER = "never"


@dataclass(frozen=True)
class Report:
    model: str
    file: str = ""
    diagnostics: tuple[Diagnostic, ...] = field(default=())
    findings: tuple[Finding, ...] = field(default=())

    def __post_init__(self) -> None:
        object.__setattr__(self, "diagnostics", tuple(sort_diagnostics(self.diagnostics)))
        object.__setattr__(self, "findings", tuple(sort_findings(self.findings)))

    @property
    def counts(self) -> dict[str, int]:
        violations = sum(f.is_violation for f in self.findings)
        errors = sum(d.severity is Severity.ERROR for d in self.diagnostics)
        return {
            "violations": violations,
            "query_rows": len(self.findings) - violations,
            "errors": errors,
            "warnings": len(self.diagnostics) - errors,
        }

    @property
    def has_errors(self) -> bool:
        return any(d.is_error for d in self.diagnostics)

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "model": self.model,
            "file": self.file,
            "counts": self.counts,
            "diagnostics": [d.to_dict() for d in self.diagnostics],
            "findings": [f.to_dict() for f in self.findings],
        }

    @classmethod
    def from_dict(cls, data: dict) -> Report:
        if data.get("schema") != SCHEMA:
            raise ValueError(f"unsupported report schema {data.get('schema')!r}")
        return cls(
            model=data["model"],
            file=data.get("file", ""),
            diagnostics=tuple(Diagnostic.from_dict(d) for d in data.get("diagnostics", ())),
            findings=tuple(Finding.from_dict(f) for f in data.get("findings", ())),
        )


def render_json(reports: Report | Sequence[Report]) -> str:
    """Canonical JSON: sorted keys, compact separators, trailing newline.

    A single report renders as an object, several as an array.
    """
    payload = reports.to_dict() if isinstance(reports, Report) else [r.to_dict() for r in reports]
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False) + "\n"


def from_json(text: str) -> Report | list[Report]:
    data = json.loads(text)
    if isinstance(data, list):
        return [Report.from_dict(d) for d in data]
    return Report.from_dict(data)


def summary_line(report: Report) -> str:
    c = report.counts
    return f"{c['violations']} violations, {c['query_rows']} query rows, {c['warnings']} warnings, {c['errors']} errors"


def render_text(reports: Report | Sequence[Report]) -> str:
    if isinstance(reports, Report):
        reports = [reports]
    blocks = []
    for report in reports:
        lines = [f"model {report.model or '-'} ({report.file or '<input>'})"]
        lines += [str(f) for f in report.findings]
        lines += [str(d) for d in report.diagnostics]
        lines.append(summary_line(report))
        blocks.append("\n".join(lines) + "\n")
    return "\n".join(blocks)


def exit_code(reports: Iterable[Report], fail_on: FailOn | str = FailOn.VIOLATION) -> int:
    """0 when clean, 1 for findings at or above ``fail_on``, 2 on any Error."""
    reports = list(reports)
    fail_on = FailOn(fail_on)
    if any(r.has_errors for r in reports):
        return 2
    if fail_on is FailOn.NEVER:
        return 0
    violations = any(f.is_violation for r in reports for f in r.findings)
    warnings = any(r.diagnostics for r in reports)
    if violations or (fail_on is FailOn.WARNING and warnings):
        return 1
    return 0
