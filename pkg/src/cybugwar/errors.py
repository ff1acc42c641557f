from __future__ import annotations

from typing import Sequence


class CybugError(Exception):
    """Base class for load/setup failures reported to the user."""


class ConfigError(CybugError):
    pass


class MapLoadError(CybugError):
    def __init__(self, message: str, *, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        where = f"{line}:{column}: " if line else ""
        super().__init__(f"{where}{message}")


class SpawnError(CybugError):
    pass


class ScriptLoadError(CybugError):
    def __init__(self, label: str, diagnostics: Sequence = ()):
        self.label = label
        self.diagnostics = list(diagnostics)
        errors = [d for d in self.diagnostics if d.severity == "error"]
        first = f": {errors[0].message}" if errors else ""
        super().__init__(f"{label}: {len(errors)} error(s){first}")


class MatchSetupError(CybugError):
    pass


class TournamentError(CybugError):
    def __init__(self, bot: str, cause: Exception):
        self.bot = bot
        self.cause = cause
        super().__init__(f"bot {bot}: {cause}")
