"""CAICL: the line-oriented scripting dialect Cybugs are written in."""

from .cfg import build_cfg, reachable, unreachable
from .diagnostics import Diagnostic, SourceSpan, has_errors
from .lint import lint
from .parser import ParseResult, parse
from .program import Program, format_program
from .tokens import Token, TokenKind, tokenize

__all__ = [
    "Diagnostic",
    "ParseResult",
    "Program",
    "SourceSpan",
    "Token",
    "TokenKind",
    "build_cfg",
    "format_program",
    "has_errors",
    "lint",
    "parse",
    "reachable",
    "tokenize",
    "unreachable",
]
