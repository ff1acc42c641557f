from __future__ import annotations

from cybugwar.bots import BUILTIN_BOTS, builtin_bot
from cybugwar.caicl import parse
from cybugwar.config import RuleConfig
from cybugwar.world import World, load_map, spawn

IDLE = "name IDLE\nIdle:\ngoto Idle\n"


def program_of(source: str):
    result = parse(source)
    assert result.program is not None, result.diagnostics
    return result.program


def world_of(rows: list[str], *lineup: tuple[str, str], rules: RuleConfig | None = None) -> World:
    """Build a world from grid rows and (builtin name or script source, team) pairs."""
    world = load_map("\n".join(rows), rules or RuleConfig())
    for src, team in lineup:
        program = builtin_bot(src) if src in BUILTIN_BOTS else program_of(src)
        spawn(world, program, team)
    return world
