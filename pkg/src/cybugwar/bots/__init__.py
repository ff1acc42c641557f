"""Reference Cybugs shipped with the package."""

from __future__ import annotations

from importlib import resources

from ..caicl.parser import ParseResult, parse
from ..caicl.program import Program
from ..errors import ScriptLoadError

BUILTIN_BOTS = ("ghazu_corpus", "ghazu_spec", "idle", "wanderer")


def builtin_source(name: str) -> str:
    if name not in BUILTIN_BOTS:
        raise KeyError(f"unknown builtin bot '{name}' (known: {', '.join(BUILTIN_BOTS)})")
    return resources.files(__package__).joinpath(f"{name}.cb").read_text(encoding="utf-8")


def parse_builtin(name: str) -> ParseResult:
    return parse(builtin_source(name), mode="lenient")


def builtin_bot(name: str) -> Program:
    """Parsed (lenient) program for a builtin bot name."""
    result = parse_builtin(name)
    if result.program is None:
        raise ScriptLoadError(name, result.diagnostics)
    return result.program
