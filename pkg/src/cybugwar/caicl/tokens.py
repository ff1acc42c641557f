from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Iterator

from .diagnostics import SourceSpan

KEYWORDS = frozenset(
    """
    name raise lower shield move forward backward turn left right long range
    scan gps launch missile fire gun throw grenade discharge energy generate
    random self destruct goto gosub return if then found enemy flag barrier
    mine fuel bump is damage
    """.split()
)


class TokenKind(str, Enum):
    KEYWORD = "keyword"
    IDENT = "identifier"
    NUMBER = "number"
    COMPARATOR = "comparator"
    COLON = "colon"
    ERROR = "error"


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    text: str
    span: SourceSpan

    @property
    def folded(self) -> str:
        return self.text.casefold()

    def is_keyword(self, *words: str) -> bool:
        return self.kind is TokenKind.KEYWORD and self.folded in words


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t]+)
  | (?P<word>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<number>[0-9]+)
  | (?P<comparator><=|>=|<|>|=)
  | (?P<colon>:)
  | (?P<error>[^ \t]+?(?=[ \t:<>=]|$))
    """,
    re.VERBOSE,
)


def _line_tokens(line: str, lineno: int) -> Iterator[Token]:
    pos = 0
    while pos < len(line):
        m = _TOKEN_RE.match(line, pos)
        if m is None:
            # Single stray character the error branch could not absorb.
            m_end = pos + 1
            yield Token(TokenKind.ERROR, line[pos:m_end], SourceSpan(lineno, pos + 1, m_end))
            pos = m_end
            continue
        group = m.lastgroup
        text = m.group(0)
        span = SourceSpan(lineno, pos + 1, m.end())
        pos = m.end()
        if group == "ws":
            continue
        if group == "word":
            kind = TokenKind.KEYWORD if text.casefold() in KEYWORDS else TokenKind.IDENT
        elif group == "number":
            kind = TokenKind.NUMBER
        elif group == "comparator":
            kind = TokenKind.COMPARATOR
        elif group == "colon":
            kind = TokenKind.COLON
        else:
            kind = TokenKind.ERROR
        yield Token(kind, text, span)


def tokenize(source: str) -> list[Token]:
    """Split CAICL source into tokens.

    Keywords match case-insensitively; identifiers keep their spelling and
    expose a folded form. Blank lines and lines whose first non-blank
    character is `#` produce nothing. Anything unrecognizable becomes an
    ERROR token, so this never fails.
    """
    out: list[Token] = []
    for lineno, raw in enumerate(source.split("\n"), start=1):
        line = raw.rstrip("\r")
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        out.extend(_line_tokens(line, lineno))
    return out
