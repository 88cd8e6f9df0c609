"""Source spans and diagnostics shared by the parser, the model builder and the checkers."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable


class Severity(str, Enum):
    ERROR = "Error"
    WARNING = "Warning"


@dataclass(frozen=True, slots=True)
class SourceSpan:
    """A run of characters in a source file. Line and column are 1-based."""

    file: str
    line: int
    column: int
    length: int = 1

    def __post_init__(self) -> None:
        if self.line < 1 or self.column < 1 or self.length < 1:
            raise ValueError(f"invalid span {self.line}:{self.column}+{self.length}")

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"

    def to_dict(self) -> dict:
        return {"file": self.file, "line": self.line, "column": self.column, "length": self.length}

    @classmethod
    def from_dict(cls, data: dict) -> SourceSpan:
        return cls(data["file"], data["line"], data["column"], data["length"])


@dataclass(frozen=True, slots=True)
class Diagnostic:
    """One parse, model or well-formedness problem.

    ``related`` holds secondary locations, e.g. the first declaration of a
    duplicated identifier.
    """

    severity: Severity
    code: str
    message: str
    span: SourceSpan | None = None
    related: tuple[SourceSpan, ...] = ()

    def __post_init__(self) -> None:
        if not self.message:
            raise ValueError("diagnostic message must be non-empty")

    @property
    def is_error(self) -> bool:
        return self.severity is Severity.ERROR

    def sort_key(self) -> tuple:
        if self.span is None:
            loc: tuple = ("", 0, 0)
        else:
            loc = (self.span.file, self.span.line, self.span.column)
        return (*loc, self.code, self.message)

    def __str__(self) -> str:
        where = f"{self.span}: " if self.span else ""
        return f"{where}{self.severity.value.lower()} {self.code}: {self.message}"

    def to_dict(self) -> dict:
        return {
            "severity": self.severity.value,
            "code": self.code,
            "message": self.message,
            "span": self.span.to_dict() if self.span else None,
            "related": [s.to_dict() for s in self.related],
        }

    @classmethod
    def from_dict(cls, data: dict) -> Diagnostic:
        span = data.get("span")
        return cls(
            severity=Severity(data["severity"]),
            code=data["code"],
            message=data["message"],
            span=SourceSpan.from_dict(span) if span else None,
            related=tuple(SourceSpan.from_dict(s) for s in data.get("related", ())),
        )


def error(code: str, message: str, span: SourceSpan | None = None, related=()) -> Diagnostic:
    return Diagnostic(Severity.ERROR, code, message, span, tuple(related))


def warning(code: str, message: str, span: SourceSpan | None = None, related=()) -> Diagnostic:
    return Diagnostic(Severity.WARNING, code, message, span, tuple(related))


def sort_diagnostics(diagnostics: Iterable[Diagnostic]) -> list[Diagnostic]:
    return sorted(diagnostics, key=Diagnostic.sort_key)


class DiagnosticError(Exception):
    """Raised when a stage cannot produce its result; carries every diagnostic collected."""

    def __init__(self, diagnostics: Iterable[Diagnostic]) -> None:
        self.diagnostics = sort_diagnostics(diagnostics)
        if not self.diagnostics:
            raise ValueError("DiagnosticError needs at least one diagnostic")
        first = self.diagnostics[0]
        more = len(self.diagnostics) - 1
        suffix = f" (+{more} more)" if more else ""
        super().__init__(f"{first}{suffix}")
