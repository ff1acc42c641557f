"""Battlefield state: terrain grid, Cybugs, team scores, PRNG and event log."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterator, Optional

from .caicl.program import Program
from .config import RuleConfig
from .errors import MapLoadError, SpawnError
from .events import Event, pos
from .models import EntityKind, Heading, Position
from .prng import XorShift64Star
from .vm import CybugVmState, init_vm

logger = logging.getLogger(__name__)


class Terrain(str, Enum):
    EMPTY = "."
    BARRIER = "#"
    MINE = "*"
    FLAG = "F"
    FUEL = "+"

    @property
    def entity(self) -> Optional[EntityKind]:
        return _ENTITY.get(self)


_ENTITY = {
    Terrain.BARRIER: EntityKind.BARRIER,
    Terrain.MINE: EntityKind.MINE,
    Terrain.FLAG: EntityKind.FLAG,
    Terrain.FUEL: EntityKind.FUEL,
}

SPAWN_GLYPHS = "123456789"


@dataclass
class Cybug:
    id: int
    team: str
    position: Position
    vm: CybugVmState
    label: str = ""
    # Every instruction index this Cybug has executed so far.
    executed: set[int] = field(default_factory=set)

    @property
    def alive(self) -> bool:
        return self.vm.alive


@dataclass
class TeamScore:
    flags: int = 0
    kills: int = 0

    def points(self, rules: RuleConfig) -> int:
        return self.flags * rules.flag_points + self.kills * rules.kill_points


@dataclass
class World:
    rules: RuleConfig
    cells: list[list[Terrain]]
    # Ordered by spawn digit, then row-major.
    spawn_points: list[Position]
    prng: XorShift64Star
    cybugs: list[Cybug] = field(default_factory=list)
    scores: dict[str, TeamScore] = field(default_factory=dict)
    tick: int = 0
    initial_flags: int = 0
    # Flags that were carried by destroyed Cybugs; they still count for the team.
    banked_flags: int = 0
    log: list[Event] = field(default_factory=list)
    # Living Cybugs by cell; kept current by place() and vacate().
    occupancy: dict[Position, Cybug] = field(default_factory=dict, repr=False, compare=False)

    @property
    def width(self) -> int:
        return self.rules.width

    @property
    def height(self) -> int:
        return self.rules.height

    def in_bounds(self, p: Position) -> bool:
        return 0 <= p[0] < self.width and 0 <= p[1] < self.height

    def terrain(self, p: Position) -> Terrain:
        return self.cells[p[1]][p[0]]

    def set_terrain(self, p: Position, t: Terrain) -> None:
        self.cells[p[1]][p[0]] = t

    def living(self) -> Iterator[Cybug]:
        return (c for c in self.cybugs if c.alive)

    def cybug(self, cybug_id: int) -> Cybug:
        if not 0 <= cybug_id < len(self.cybugs):
            raise ValueError(f"unknown cybug id {cybug_id}")
        return self.cybugs[cybug_id]

    def cybug_at(self, p: Position) -> Optional[Cybug]:
        c = self.occupancy.get(p)
        return c if c is not None and c.alive else None

    def place(self, cybug: Cybug, p: Position) -> None:
        """Move `cybug` to `p`, keeping the occupancy index in step."""
        if self.occupancy.get(cybug.position) is cybug:
            del self.occupancy[cybug.position]
        cybug.position = p
        self.occupancy[p] = cybug

    def vacate(self, cybug: Cybug) -> None:
        if self.occupancy.get(cybug.position) is cybug:
            del self.occupancy[cybug.position]

    def count(self, t: Terrain) -> int:
        return sum(row.count(t) for row in self.cells)

    def teams_alive(self) -> set[str]:
        return {c.team for c in self.living()}


def load_map(text: str, rules: Optional[RuleConfig] = None) -> World:
    """Decode a map file into an unpopulated world.

    Lines starting with "# " are comments and blank lines are ignored;
    every other line is a grid row.
    """
    rules = rules or RuleConfig()
    rows: list[tuple[int, str]] = []
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.rstrip("\r")
        if not line.strip() or line.startswith("# "):
            continue
        rows.append((lineno, line))
    if not rows:
        raise MapLoadError("map has no grid rows")

    width = len(rows[0][1])
    cells: list[list[Terrain]] = []
    spawns: list[tuple[str, int, Position]] = []
    for y, (lineno, line) in enumerate(rows):
        if len(line) != width:
            raise MapLoadError(
                f"ragged row: expected {width} cells, got {len(line)}",
                line=lineno,
                column=min(len(line), width) + 1,
            )
        row: list[Terrain] = []
        for x, ch in enumerate(line):
            if ch in SPAWN_GLYPHS:
                spawns.append((ch, len(spawns), (x, y)))
                row.append(Terrain.EMPTY)
                continue
            try:
                row.append(Terrain(ch))
            except ValueError:
                raise MapLoadError(f"unknown glyph {ch!r}", line=lineno, column=x + 1) from None
        cells.append(row)

    if not spawns:
        raise MapLoadError("map has no spawn points", line=rows[0][0], column=1)

    rules = replace(rules, width=width, height=len(rows))
    rules.validate()
    world = World(
        rules=rules,
        cells=cells,
        spawn_points=[p for _, _, p in sorted(spawns)],
        prng=XorShift64Star.from_seed(rules.seed),
    )
    world.initial_flags = world.count(Terrain.FLAG)
    logger.debug("map loaded: %dx%d, %d spawn(s), %d flag(s)", width, len(rows), len(spawns), world.initial_flags)
    return world


def spawn(world: World, program: Program, team: str, label: str = "") -> int:
    """Place a Cybug at the next free spawn point; returns its id."""
    for p in world.spawn_points:
        if not any(c.position == p for c in world.cybugs):
            break
    else:
        raise SpawnError(f"no free spawn point for team {team} ({len(world.spawn_points)} on this map)")

    cybug_id = len(world.cybugs)
    vm = init_vm(program, world.rules, Heading.NORTH)
    cybug = Cybug(cybug_id, team, p, vm, label or program.name)
    world.cybugs.append(cybug)
    world.place(cybug, p)
    world.scores.setdefault(team, TeamScore())
    world.log.append(
        Event(
            world.tick,
            cybug_id,
            "spawned",
            {
                "team": team,
                "name": program.name,
                "position": pos(p),
                "heading": vm.heading.value,
                "fuel": vm.fuel,
            },
        )
    )
    return cybug_id
