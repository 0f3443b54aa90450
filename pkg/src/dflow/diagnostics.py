"""Source spans and diagnostics shared by the parser, validator and merger."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


class Severity(str, Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class SourceSpan:
    """A 1-based, inclusive-start / exclusive-end region of a source file."""

    start_line: int
    start_col: int
    end_line: int
    end_col: int
    file_label: str = "<input>"

    def to_dict(self) -> dict:
        return {
            "file": self.file_label,
            "start_line": self.start_line,
            "start_col": self.start_col,
            "end_line": self.end_line,
            "end_col": self.end_col,
        }

    def sort_key(self) -> tuple[int, int, int, int]:
        return (self.start_line, self.start_col, self.end_line, self.end_col)


# Stand-in span for elements built in code rather than parsed from text.
NO_SPAN = SourceSpan(1, 1, 1, 1, "<model>")


# Parser codes.
PARSER_CODES: dict[str, str] = {
    "P001": "unterminated string literal",
    "P002": "unknown top-level block",
    "P003": "unknown keyword",
    "P004": "malformed entity reference",
    "P005": "missing 'end'",
    "P006": "unexpected token",
    "P007": "empty list where at least one item is required",
    "P008": "invalid character",
    "P009": "invalid value",
}

# Validator codes.
VALIDATOR_CODES: dict[str, str] = {
    "V001": "duplicate name",
    "V002": "undeclared trigger",
    "V003": "trigger used by more than one dialogue",
    "V004": "undeclared eservice",
    "V005": "undeclared form or form slot",
    "V006": "undeclared global slot",
    "V007": "form slot read before it is filled",
    "V008": "undeclared intent in intent mapping",
    "V009": "literal does not match slot type",
    "V010": "intent without examples",
    "V011": "trigger not used by any dialogue",
    "V012": "duplicate phrase example within an intent",
    "V013": "phrase example shared by several intents",
    "V014": "undeclared trainable entity or synonym",
}


@dataclass(frozen=True)
class Diagnostic:
    severity: Severity
    code: str
    message: str
    span: SourceSpan

    @property
    def is_error(self) -> bool:
        return self.severity is Severity.ERROR

    def to_dict(self) -> dict:
        return {
            "code": self.code,
            "severity": self.severity.value,
            "message": self.message,
            "span": self.span.to_dict(),
        }

    def format(self) -> str:
        s = self.span
        return f"{s.file_label}:{s.start_line}:{s.start_col}: {self.severity.value} {self.code}: {self.message}"

    def __str__(self) -> str:
        return self.format()


def error(code: str, message: str, span: SourceSpan | None) -> Diagnostic:
    return Diagnostic(Severity.ERROR, code, message, span or NO_SPAN)


def warning(code: str, message: str, span: SourceSpan | None) -> Diagnostic:
    return Diagnostic(Severity.WARNING, code, message, span or NO_SPAN)


def sort_diagnostics(diagnostics: list[Diagnostic]) -> list[Diagnostic]:
    """Source order, then code, then message; stable for identical inputs."""
    return sorted(diagnostics, key=lambda d: (d.span.sort_key(), d.code, d.message))
