"""Diagnostics emitted by the parser and the semantic validator."""

from __future__ import annotations

from dataclasses import dataclass

from .model import Loc

ERROR = "error"
WARNING = "warning"

# Parser codes
E_SYNTAX = "E_SYNTAX"
E_EOF = "E_EOF"
E_ENCODING = "E_ENCODING"

# Validator codes
E_DUP_NAME = "E_DUP_NAME"
E_NO_ADMIN = "E_NO_ADMIN"
E_EMPTY_CHOICES = "E_EMPTY_CHOICES"
E_BAD_RANGE = "E_BAD_RANGE"
E_UNKNOWN_ROLE = "E_UNKNOWN_ROLE"
E_DEP_UNRESOLVED = "E_DEP_UNRESOLVED"
E_DEP_CYCLE = "E_DEP_CYCLE"
E_BAD_PERCENT = "E_BAD_PERCENT"
E_DEPTH = "E_DEPTH"


@dataclass
class Diagnostic:
    severity: str
    code: str
    message: str
    loc: Loc

    def to_dict(self) -> dict:
        return {
            "severity": self.severity,
            "code": self.code,
            "message": self.message,
            "line": self.loc.line,
            "column": self.loc.column,
        }


def error(code: str, message: str, loc: Loc | None) -> Diagnostic:
    return Diagnostic(ERROR, code, message, loc or Loc(1, 1))


class DslError(Exception):
    """Raised when parsing or validation fails; carries all diagnostics."""

    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = diagnostics
        summary = "; ".join(
            f"{d.code}@{d.loc.line}:{d.loc.column} {d.message}" for d in diagnostics[:5]
        )
        if len(diagnostics) > 5:
            summary += f" (+{len(diagnostics) - 5} more)"
        super().__init__(summary or "invalid source")
