"""World invariant checks, meant to run after every tick."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .world import Terrain, World


@dataclass(frozen=True)
class Snapshot:
    tick: int
    damage: tuple[int, ...]
    mines: frozenset[tuple[int, int]]


def snapshot(world: World) -> Snapshot:
    mines = frozenset(
        (x, y) for y, row in enumerate(world.cells) for x, t in enumerate(row) if t is Terrain.MINE
    )
    return Snapshot(world.tick, tuple(c.vm.damage for c in world.cybugs), mines)


def _tripped_since(world: World, tick: int) -> set[tuple[int, int]]:
    """Cells named by mine_tripped events logged after `tick`."""
    cells: set[tuple[int, int]] = set()
    for e in reversed(world.log):
        if e.tick <= tick:
            break
        if e.kind == "mine_tripped":
            x, y = e.payload["position"]
            cells.add((x, y))
    return cells


def check_world(world: World, previous: Optional[Snapshot] = None) -> list[str]:
    """Return a description of every violated invariant (empty when healthy)."""
    problems: list[str] = []
    rules = world.rules

    seen: dict[tuple[int, int], int] = {}
    for c in world.living():
        if world.occupancy.get(c.position) is not c:
            problems.append(f"cybug {c.id} missing from the occupancy index at {c.position}")
        if not world.in_bounds(c.position):
            problems.append(f"cybug {c.id} out of bounds at {c.position}")
            continue
        if world.terrain(c.position) is not Terrain.EMPTY:
            problems.append(f"cybug {c.id} stands on {world.terrain(c.position).name} at {c.position}")
        if c.position in seen:
            problems.append(f"cybugs {seen[c.position]} and {c.id} share {c.position}")
        seen[c.position] = c.id

    for c in world.cybugs:
        if not 0 <= c.vm.fuel <= rules.fuel_max:
            problems.append(f"cybug {c.id} fuel {c.vm.fuel} outside [0, {rules.fuel_max}]")
        if not 0 <= c.vm.damage <= 100:
            problems.append(f"cybug {c.id} damage {c.vm.damage} outside [0, 100]")

    ground = world.count(Terrain.FLAG)
    carried = sum(c.vm.flags_carried for c in world.living())
    if ground + carried + world.banked_flags != world.initial_flags:
        problems.append(
            f"flag conservation: ground {ground} + carried {carried} + banked {world.banked_flags}"
            f" != {world.initial_flags}"
        )
    scored = sum(s.flags for s in world.scores.values())
    if ground + scored != world.initial_flags:
        problems.append(f"flag conservation: ground {ground} + scored {scored} != {world.initial_flags}")

    if world.tick > rules.max_ticks:
        problems.append(f"tick {world.tick} beyond max_ticks {rules.max_ticks}")

    if previous is not None:
        for c, before in zip(world.cybugs, previous.damage):
            if c.vm.damage < before:
                problems.append(f"cybug {c.id} damage decreased {before} -> {c.vm.damage}")
        now = snapshot(world).mines
        if not now <= previous.mines:
            problems.append(f"mines appeared at {sorted(now - previous.mines)}")
        silent = (previous.mines - now) - _tripped_since(world, previous.tick)
        if silent:
            problems.append(f"mines removed without a mine_tripped event at {sorted(silent)}")

    return problems
