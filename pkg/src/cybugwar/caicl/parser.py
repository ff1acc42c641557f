from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import groupby
from typing import Literal, NamedTuple, Optional, Sequence

from ..models import EntityKind
from .diagnostics import Diagnostic, Severity, SourceSpan, has_errors, sort_key
from .program import (
    BumpBarrier,
    Command,
    Comparator,
    Condition,
    DamageCmp,
    FuelCmp,
    Gosub,
    Goto,
    If,
    Instruction,
    Name,
    Op,
    Program,
    RandomIs,
    ScanFound,
    Simple,
    Statement,
)
from .tokens import Token, TokenKind, tokenize

logger = logging.getLogger(__name__)

Mode = Literal["strict", "lenient"]

_OPS_BY_TEXT = {op.value: op for op in Op}


class ParseResult(NamedTuple):
    # None only in strict mode when an error was found.
    program: Optional[Program]
    diagnostics: tuple[Diagnostic, ...]


class _Bad(Exception):
    def __init__(self, message: str, token: Token):
        super().__init__(message)
        self.message = message
        self.token = token


@dataclass
class _Ref:
    index: int
    label: str
    text: str
    span: SourceSpan


@dataclass
class _State:
    mode: Mode
    statements: list[Statement] = field(default_factory=list)
    labels: dict[str, int] = field(default_factory=dict)
    label_text: dict[str, str] = field(default_factory=dict)
    label_spans: dict[str, SourceSpan] = field(default_factory=dict)
    pending: list[Token] = field(default_factory=list)
    refs: list[_Ref] = field(default_factory=list)
    names: list[tuple[str, SourceSpan]] = field(default_factory=list)
    diagnostics: list[Diagnostic] = field(default_factory=list)

    def report(self, severity: Severity, code: str, span: SourceSpan, message: str) -> None:
        self.diagnostics.append(Diagnostic(severity, code, span, message))

    def recovery(self, code: str, span: SourceSpan, message: str) -> None:
        # Recovered lines are warnings when lenient and errors when strict.
        self.report("warning" if self.mode == "lenient" else "error", code, span, message)


def _line_span(tokens: Sequence[Token]) -> SourceSpan:
    return SourceSpan(tokens[0].span.line, tokens[0].span.column_start, tokens[-1].span.column_end)


def _expect(tokens: Sequence[Token], pos: int, what: str) -> Token:
    if pos >= len(tokens):
        raise _Bad(f"expected {what} at end of line", tokens[-1])
    return tokens[pos]


def _keyword(tokens: Sequence[Token], pos: int, word: str) -> int:
    tok = _expect(tokens, pos, f"'{word}'")
    if not tok.is_keyword(word):
        raise _Bad(f"expected '{word}', found '{tok.text}'", tok)
    return pos + 1


def _number(tokens: Sequence[Token], pos: int) -> tuple[int, int]:
    tok = _expect(tokens, pos, "a number")
    if tok.kind is not TokenKind.NUMBER:
        raise _Bad(f"expected a number, found '{tok.text}'", tok)
    return int(tok.text), pos + 1


def _condition(tokens: Sequence[Token], pos: int) -> tuple[Condition, int]:
    tok = _expect(tokens, pos, "a condition")
    if tok.is_keyword("scan"):
        pos = _keyword(tokens, pos + 1, "found")
        kind_tok = _expect(tokens, pos, "an entity kind")
        try:
            kind = EntityKind(kind_tok.folded)
        except ValueError:
            raise _Bad(f"unknown entity kind '{kind_tok.text}'", kind_tok) from None
        return ScanFound(kind), pos + 1
    if tok.is_keyword("bump"):
        return BumpBarrier(), _keyword(tokens, pos + 1, "barrier")
    if tok.is_keyword("random"):
        pos = _keyword(tokens, pos + 1, "is")
        value, pos = _number(tokens, pos)
        return RandomIs(value), pos
    if tok.is_keyword("fuel", "damage"):
        pos = _keyword(tokens, pos + 1, "is")
        cmp_tok = _expect(tokens, pos, "a comparator")
        if cmp_tok.kind is not TokenKind.COMPARATOR:
            raise _Bad(f"expected a comparator, found '{cmp_tok.text}'", cmp_tok)
        value, pos = _number(tokens, pos + 1)
        cls = FuelCmp if tok.folded == "fuel" else DamageCmp
        return cls(Comparator(cmp_tok.text), value), pos
    raise _Bad(f"unknown condition '{tok.text}'", tok)


def _simple(tokens: Sequence[Token], state: _State, index: int) -> Simple:
    head = tokens[0]
    if head.is_keyword("if"):
        raise _Bad("conditionals cannot nest", head)
    if head.is_keyword("name"):
        tok = _expect(tokens, 1, "a name")
        if tok.kind not in (TokenKind.IDENT, TokenKind.KEYWORD, TokenKind.NUMBER) or len(tokens) > 2:
            raise _Bad("expected a single name after 'name'", tok)
        return Name(tok.text)
    if head.is_keyword("goto", "gosub"):
        tok = _expect(tokens, 1, "a label")
        if tok.kind is not TokenKind.IDENT:
            raise _Bad(f"expected a label, found '{tok.text}'", tok)
        if len(tokens) > 2:
            raise _Bad(f"unexpected '{tokens[2].text}' after label", tokens[2])
        state.refs.append(_Ref(index, tok.folded, tok.text, tok.span))
        cls = Goto if head.folded == "goto" else Gosub
        return cls(tok.folded, tok.text)
    for tok in tokens:
        if tok.kind is not TokenKind.KEYWORD:
            raise _Bad(f"unexpected '{tok.text}'", tok)
    op = _OPS_BY_TEXT.get(" ".join(t.folded for t in tokens))
    if op is None:
        raise _Bad(f"unknown statement '{' '.join(t.text for t in tokens)}'", head)
    return Command(op)


def _if(tokens: Sequence[Token], state: _State, index: int, following: Optional[Sequence[Token]]) -> tuple[If, bool]:
    """Parse a conditional line. Returns the If and whether `following` was consumed."""
    cond, pos = _condition(tokens, 1)
    tok = _expect(tokens, pos, "'then'")

    if tok.is_keyword("then"):
        rest = tokens[pos + 1 :]
        if rest:
            return If(cond, _simple(rest, state, index)), False
        # R2: a bare `then` takes the next statement line as its action.
        if not following or following[0].is_keyword("if") or (
            len(following) == 2 and following[1].kind is TokenKind.COLON
        ):
            raise _Bad("'then' has no action", tok)
        body = _simple(following, state, index)
        state.recovery(
            "dangling-then",
            tok.span,
            f"'then' has no action; using line {following[0].span.line} '{body}' as its action",
        )
        return If(cond, body), True

    # R1: `if <cond> goto then <label>` -> `if <cond> then goto <label>`.
    if tok.is_keyword("goto", "gosub") and pos + 1 < len(tokens) and tokens[pos + 1].is_keyword("then"):
        swapped = [tok, *tokens[pos + 2 :]]
        body = _simple(swapped, state, index)
        state.recovery(
            "recovered-syntax",
            SourceSpan(tok.span.line, tok.span.column_start, tokens[pos + 1].span.column_end),
            f"'{tok.text} then' read as 'then {tok.text}'",
        )
        return If(cond, body), False

    raise _Bad(f"expected 'then', found '{tok.text}'", tok)


def parse(source: str, mode: Mode = "lenient") -> ParseResult:
    """Parse CAICL source into a label-resolved Program.

    Lenient mode always returns a Program; lines needing recovery yield
    warnings and unparseable lines are dropped with an error. Strict mode
    returns no Program when any error is found.
    """
    if mode not in ("strict", "lenient"):
        raise ValueError(f"unknown parse mode {mode!r}")

    state = _State(mode=mode)
    lines = [list(toks) for _, toks in groupby(tokenize(source), key=lambda t: t.span.line)]

    i = 0
    while i < len(lines):
        tokens = lines[i]
        i += 1
        index = len(state.statements)

        bad = next((t for t in tokens if t.kind is TokenKind.ERROR), None)
        if bad is not None:
            state.report("error", "syntax-error", bad.span, f"unrecognized text '{bad.text}'")
            continue

        if len(tokens) == 2 and tokens[1].kind is TokenKind.COLON:
            if tokens[0].kind is not TokenKind.IDENT:
                state.report("error", "syntax-error", tokens[0].span, f"'{tokens[0].text}' cannot be a label")
                continue
            state.pending.append(tokens[0])
            continue

        try:
            instr: Instruction
            if tokens[0].is_keyword("if"):
                following = lines[i] if i < len(lines) else None
                instr, consumed = _if(tokens, state, index, following)
                if consumed:
                    i += 1
            else:
                instr = _simple(tokens, state, index)
        except _Bad as e:
            state.refs = [r for r in state.refs if r.index != index]
            state.report("error", "syntax-error", e.token.span, e.message)
            continue

        _bind_pending(state, index)
        if isinstance(instr, Name):
            state.names.append((instr.ident, _line_span(tokens)))
        state.statements.append(Statement(_line_span(tokens), instr))

    for tok in state.pending:
        state.recovery("label-at-end", tok.span, f"label '{tok.text}' has no instruction after it")

    _check_names(state)
    _check_refs(state)

    diagnostics = tuple(sorted(state.diagnostics, key=sort_key))
    if mode == "strict" and has_errors(diagnostics):
        return ParseResult(None, diagnostics)

    name = state.names[-1][0] if state.names else "unnamed"
    program = Program(
        name=name,
        statements=tuple(state.statements),
        labels=dict(state.labels),
        label_text=dict(state.label_text),
        label_spans=dict(state.label_spans),
    )
    logger.debug("parsed program %s: %d instructions, %d labels", name, len(program), len(program.labels))
    return ParseResult(program, diagnostics)


def _bind_pending(state: _State, index: int) -> None:
    for tok in state.pending:
        key = tok.folded
        if key in state.labels:
            first = state.label_text[key]
            state.report("error", "duplicate-label", tok.span, f"label '{tok.text}' already defined as '{first}'")
            continue
        state.labels[key] = index
        state.label_text[key] = tok.text
        state.label_spans[key] = tok.span
    state.pending.clear()


def _check_names(state: _State) -> None:
    for ident, span in state.names[:-1]:
        state.report("warning", "duplicate-name", span, f"name '{ident}' is overridden by a later 'name' statement")


def _check_refs(state: _State) -> None:
    severity: Severity = "warning" if state.mode == "lenient" else "error"
    for ref in state.refs:
        if ref.label not in state.labels:
            state.report(severity, "undefined-label", ref.span, f"label '{ref.text}' is not defined")
