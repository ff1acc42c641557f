from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Callable, Mapping, Optional, Sequence

from . import replay
from .arena import Outcome, is_over, match_end_event, tick
from .bots import BUILTIN_BOTS, builtin_source
from .caicl.diagnostics import has_errors
from .caicl.parser import parse
from .caicl.program import Program
from .config import RuleConfig
from .errors import MatchSetupError, ScriptLoadError
from .maps import BUILTIN_MAPS, builtin_map_text
from .world import World, load_map, spawn

logger = logging.getLogger(__name__)

TickHook = Callable[[World], None]


@dataclass(frozen=True)
class BotEntry:
    # A builtin bot name or a path to a .cb script.
    source: str
    team: str

    @classmethod
    def parse(cls, spec: str, default_team: str) -> "BotEntry":
        """`FILE[:team]`; the team defaults to `default_team`."""
        source, sep, team = spec.rpartition(":")
        if not sep or not team or "/" in team or "\\" in team:
            return cls(spec, default_team)
        return cls(source, team)

    @property
    def label(self) -> str:
        return self.source if self.source in BUILTIN_BOTS else Path(self.source).stem


@dataclass(frozen=True)
class MatchConfig:
    map: str
    bots: tuple[BotEntry, ...]
    rules: RuleConfig = field(default_factory=RuleConfig)
    overrides: Mapping[str, Any] = field(default_factory=dict)
    seed: int = 0
    max_ticks: Optional[int] = None

    def effective_rules(self) -> RuleConfig:
        rules = self.rules.with_overrides(self.overrides) if self.overrides else self.rules
        rules = replace(rules, seed=self.seed)
        if self.max_ticks is not None:
            rules = replace(rules, max_ticks=self.max_ticks)
        rules.validate()
        return rules


@dataclass(frozen=True)
class TeamResult:
    flags: int
    kills: int
    points: int


@dataclass(frozen=True)
class MatchResult:
    outcome: Outcome
    ticks: int
    teams: Mapping[str, TeamResult]
    survivors: tuple[int, ...]
    digest: str = ""

    @property
    def winner(self) -> Optional[str]:
        return self.outcome.winner

    def record(self) -> dict[str, Any]:
        """JSON form written as the replay's last line (no digest)."""
        return {
            "reason": self.outcome.reason,
            "winner": self.outcome.winner,
            "ticks": self.ticks,
            "teams": {t: {"flags": r.flags, "kills": r.kills, "points": r.points} for t, r in sorted(self.teams.items())},
            "survivors": list(self.survivors),
        }


def load_bot(source: str) -> Program:
    """Builtin name or script path -> Program; refuses scripts with errors."""
    if source in BUILTIN_BOTS:
        text = builtin_source(source)
        label = source
    else:
        path = Path(source)
        if not path.is_file():
            raise MatchSetupError(f"bot script not found: {source}")
        text = path.read_text(encoding="utf-8")
        label = str(path)
    result = parse(text, mode="lenient")
    if result.program is None or has_errors(result.diagnostics):
        raise ScriptLoadError(label, result.diagnostics)
    return result.program


def load_map_text(ref: str) -> str:
    if ref in BUILTIN_MAPS:
        return builtin_map_text(ref)
    path = Path(ref)
    if not path.is_file():
        raise MatchSetupError(f"map not found: {ref}")
    return path.read_text(encoding="utf-8")


def build_world(map_text: str, lineup: Sequence[tuple[Program, str]], rules: RuleConfig) -> World:
    if len({team for _, team in lineup}) < 2:
        raise MatchSetupError("a match needs at least two teams")
    world = load_map(map_text, rules)
    for program, team in lineup:
        spawn(world, program, team)
    return world


def run_world(world: World, on_tick: Optional[TickHook] = None) -> Outcome:
    """Tick until the match is over, then log the match_end event."""
    while (outcome := is_over(world)) is None:
        tick(world)
        if on_tick is not None:
            on_tick(world)
    world.log.append(match_end_event(world, outcome))
    return outcome


def play(
    map_text: str,
    lineup: Sequence[tuple[Program, str]],
    rules: RuleConfig,
    on_tick: Optional[TickHook] = None,
) -> tuple[MatchResult, bytes]:
    world = build_world(map_text, lineup, rules)
    logger.debug("match start: %s seed=%d", " vs ".join(p.name for p, _ in lineup), rules.seed)
    outcome = run_world(world, on_tick)
    result = MatchResult(
        outcome=outcome,
        ticks=world.tick,
        teams={
            team: TeamResult(s.flags, s.kills, s.points(world.rules)) for team, s in sorted(world.scores.items())
        },
        survivors=tuple(c.id for c in world.living()),
    )
    data = replay.encode(world.log, result.record())
    result = replace(result, digest=replay.digest(data))
    logger.info(
        "match end: %s winner=%s ticks=%d digest=%s",
        outcome.reason,
        outcome.winner or "draw",
        result.ticks,
        result.digest[:12],
    )
    return result, data


def run_match(config: MatchConfig, on_tick: Optional[TickHook] = None) -> tuple[MatchResult, bytes]:
    """Load everything up front, then simulate. Returns the result and replay bytes."""
    if len({b.team for b in config.bots}) < 2:
        raise MatchSetupError("a match needs at least two teams")
    rules = config.effective_rules()
    lineup = [(load_bot(b.source), b.team) for b in config.bots]
    return play(load_map_text(config.map), lineup, rules, on_tick)
