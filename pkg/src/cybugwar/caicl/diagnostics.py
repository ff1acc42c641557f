from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Literal

Severity = Literal["error", "warning", "info"]

CODES = {
    "syntax-error": "line could not be parsed",
    "recovered-syntax": "transposed 'goto then' rewritten to 'then goto'",
    "dangling-then": "'then' without action completed by the next line",
    "undefined-label": "jump to a label that is never defined",
    "duplicate-label": "label defined more than once",
    "duplicate-name": "more than one 'name' statement",
    "label-at-end": "label with no instruction after it",
    "unreachable-code": "instructions never reached from entry",
    "unused-label": "label never referenced",
    "missing-return": "subroutine can finish without 'return'",
    "no-action": "program can never perform an acting instruction",
}


@dataclass(frozen=True, order=True)
class SourceSpan:
    line: int
    column_start: int = 1
    column_end: int = 1

    def __post_init__(self) -> None:
        if self.line < 1:
            raise ValueError(f"line must be >= 1, got {self.line}")
        if self.column_start > self.column_end:
            raise ValueError("column_start must not exceed column_end")


@dataclass(frozen=True)
class Diagnostic:
    severity: Severity
    code: str
    span: SourceSpan
    message: str

    def __post_init__(self) -> None:
        if self.code not in CODES:
            raise ValueError(f"unknown diagnostic code {self.code!r}")

    def render(self, filename: str) -> str:
        return f"{filename}:{self.span.line}:{self.span.column_start}: {self.severity}[{self.code}] {self.message}"


def has_errors(diagnostics: Iterable[Diagnostic]) -> bool:
    return any(d.severity == "error" for d in diagnostics)


def sort_key(d: Diagnostic) -> tuple:
    return (d.span.line, d.span.column_start, d.code, d.message)
