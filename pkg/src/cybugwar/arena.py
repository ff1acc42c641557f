"""Sensing, action resolution and the global tick loop.

Cybugs act strictly one after another in spawn order; whatever one of them
does is fully resolved before the next one runs its script.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional

from .events import WORLD, Event, pos
from .models import EntityKind, Heading, Position, ScanResult
from .vm import Action, ActionKind, Percepts, step_tick
from .world import Cybug, Terrain, World

logger = logging.getLogger(__name__)

SCAN_KINDS = ("long", "forward", "backward", "left", "right", "gps")


@dataclass(frozen=True)
class RayHit:
    kind: EntityKind
    distance: int
    position: Position
    cybug_id: Optional[int] = None


@dataclass(frozen=True)
class Outcome:
    reason: str  # team_eliminated | tick_limit
    winner: Optional[str] = None  # None is a draw

    @property
    def draw(self) -> bool:
        return self.winner is None


class _Host:
    def __init__(self, world: World, cybug: Cybug):
        self._world = world
        self._cybug = cybug

    def random_draw(self, upper: int) -> int:
        return self._world.prng.draw(upper)

    def gps(self) -> Position:
        return self._cybug.position


def _step(p: Position, heading: Heading, n: int = 1) -> Position:
    dx, dy = heading.vector
    return (p[0] + dx * n, p[1] + dy * n)


def _chebyshev(a: Position, b: Position) -> int:
    return max(abs(a[0] - b[0]), abs(a[1] - b[1]))


def _scan_heading(heading: Heading, kind: str) -> Heading:
    if kind in ("long", "forward"):
        return heading
    if kind == "backward":
        return heading.reversed()
    return heading.turned(kind)


def cast_scan(world: World, viewer: Cybug, heading: Heading, reach: int) -> Optional[RayHit]:
    """First non-empty cell or enemy along a ray. Teammates are transparent."""
    p = viewer.position
    for d in range(1, reach + 1):
        p = _step(p, heading)
        if not world.in_bounds(p):
            return None
        other = world.cybug_at(p)
        if other is not None and other.team != viewer.team:
            return RayHit(EntityKind.ENEMY, d, p, other.id)
        entity = world.terrain(p).entity
        if entity is not None:
            return RayHit(entity, d, p)
    return None


def cast_weapon(world: World, shooter: Cybug, reach: int) -> Optional[RayHit]:
    """First barrier, mine or Cybug along the firing heading.

    Teammates block too; a Cybug hit always carries `cybug_id`.
    """
    p = shooter.position
    for d in range(1, reach + 1):
        p = _step(p, shooter.vm.heading)
        if not world.in_bounds(p):
            return None
        other = world.cybug_at(p)
        if other is not None:
            return RayHit(EntityKind.ENEMY, d, p, other.id)
        t = world.terrain(p)
        if t in (Terrain.BARRIER, Terrain.MINE):
            return RayHit(t.entity, d, p)
    return None


def perform_scan(world: World, cybug_id: int, kind: str) -> Percepts:
    cybug = _acting(world, cybug_id)
    vm = cybug.vm
    if kind == "gps":
        vm.gps_reg = cybug.position
        return Percepts(scan_result=vm.scan_reg, bump=vm.bump_flag, gps=cybug.position)
    if kind not in SCAN_KINDS:
        raise ValueError(f"unknown scan kind {kind!r}")
    reach = world.rules.scan_range_long if kind == "long" else world.rules.scan_range_directional
    hit = cast_scan(world, cybug, _scan_heading(vm.heading, kind), reach)
    vm.scan_reg = ScanResult(hit.kind, hit.distance) if hit else None
    return Percepts(scan_result=vm.scan_reg, bump=vm.bump_flag, gps=vm.gps_reg)


def _acting(world: World, cybug_id: int) -> Cybug:
    cybug = world.cybug(cybug_id)
    if not cybug.alive:
        raise ValueError(f"cybug {cybug_id} is destroyed")
    return cybug


class _Resolver:
    """Collects the events of one action while it is applied."""

    def __init__(self, world: World, actor: Cybug):
        self.world = world
        self.actor = actor
        self.rules = world.rules
        self.tick = world.tick + 1
        self.events: list[Event] = []

    def emit(self, kind: str, actor=None, **payload) -> None:
        self.events.append(Event(self.tick, self.actor.id if actor is None else actor, kind, payload))

    def damage(self, target: Cybug, base: int, cause: str, source: Optional[Cybug]) -> None:
        if not target.alive:
            return
        vm = target.vm
        amount = math.floor(base * self.rules.shield_factor) if vm.shield_up else base
        vm.damage = min(100, vm.damage + amount)
        self.emit(
            "hit",
            actor=target.id,
            amount=amount,
            damage=vm.damage,
            cause=cause,
            source=source.id if source else None,
        )
        if not target.alive:
            self.destroy(target, source)

    def destroy(self, target: Cybug, source: Optional[Cybug]) -> None:
        credited = None
        if source is not None and source.team != target.team:
            self.world.scores[source.team].kills += 1
            credited = source.team
        self.world.banked_flags += target.vm.flags_carried
        self.emit(
            "destroyed",
            actor=target.id,
            position=pos(target.position),
            by=source.id if source else None,
            credited=credited,
            flags=target.vm.flags_carried,
        )
        target.vm.flags_carried = 0
        self.world.vacate(target)
        logger.debug("cybug %d destroyed at tick %d", target.id, self.tick)

    def clear_mines(self, centre: Position, radius: int) -> list[list[int]]:
        cleared = []
        for y in range(max(0, centre[1] - radius), min(self.world.height, centre[1] + radius + 1)):
            for x in range(max(0, centre[0] - radius), min(self.world.width, centre[0] + radius + 1)):
                if self.world.terrain((x, y)) is Terrain.MINE:
                    self.world.set_terrain((x, y), Terrain.EMPTY)
                    cleared.append([x, y])
        return cleared

    def report_mines(self, cleared: list[list[int]], cause: str) -> None:
        for cell in cleared:
            self.emit("mine_tripped", position=cell, cause=cause)

    def splash(self, centre: Position, radius: int, base: int, cause: str, exclude: Optional[Cybug] = None) -> None:
        for c in list(self.world.living()):
            if c is exclude or _chebyshev(c.position, centre) > radius:
                continue
            self.damage(c, base, cause, self.actor)

    # -- actions --

    def move(self, direction: str) -> None:
        vm = self.actor.vm
        if vm.fuel <= 0:
            self.emit("out_of_fuel", direction=direction)
            return
        heading = vm.heading if direction == "forward" else vm.heading.reversed()
        src = self.actor.position
        dst = _step(src, heading)
        blocked = (
            not self.world.in_bounds(dst)
            or self.world.terrain(dst) is Terrain.BARRIER
            or self.world.cybug_at(dst) is not None
        )
        if blocked:
            vm.bump_flag = True
            vm.fuel = max(0, vm.fuel - self.rules.blocked_move_cost)
            self.emit("bumped", at=pos(dst), fuel=vm.fuel)
            return

        vm.bump_flag = False
        vm.fuel = max(0, vm.fuel - self.rules.move_cost)
        self.world.place(self.actor, dst)
        self.emit("moved", **{"from": pos(src)}, to=pos(dst), fuel=vm.fuel)

        t = self.world.terrain(dst)
        if t is Terrain.MINE:
            self.world.set_terrain(dst, Terrain.EMPTY)
            self.emit("mine_tripped", position=pos(dst), cause="step")
            self.damage(self.actor, self.rules.mine_damage, "mine", None)
        elif t is Terrain.FUEL:
            self.world.set_terrain(dst, Terrain.EMPTY)
            before = vm.fuel
            vm.fuel = min(self.rules.fuel_max, vm.fuel + self.rules.fuel_pickup)
            self.emit("fuel_taken", position=pos(dst), amount=vm.fuel - before, fuel=vm.fuel)
        elif t is Terrain.FLAG:
            self.world.set_terrain(dst, Terrain.EMPTY)
            vm.flags_carried += 1
            score = self.world.scores[self.actor.team]
            score.flags += 1
            self.emit("flag_taken", position=pos(dst), carried=vm.flags_carried, team_flags=score.flags)

    def turn(self, direction: str) -> None:
        vm = self.actor.vm
        vm.heading = vm.heading.turned(direction)
        self.emit("turned", heading=vm.heading.value)

    def scan(self, kind: str) -> None:
        percepts = perform_scan(self.world, self.actor.id, kind)
        found = percepts.scan_result
        self.emit(
            "scanned",
            direction=kind,
            found=found.kind.value if found else None,
            distance=found.distance if found else None,
        )

    def fire(self, weapon: str) -> None:
        vm = self.actor.vm
        if vm.ammo.get(weapon, 0) <= 0:
            self.emit("out_of_ammo", weapon=weapon)
            return
        vm.ammo[weapon] -= 1
        if weapon == "grenade":
            self._grenade()
            return

        reach = self.rules.missile_range if weapon == "missile" else self.rules.gun_range
        hit = cast_weapon(self.world, self.actor, reach)
        self.emit(
            "fired",
            weapon=weapon,
            ammo=vm.ammo[weapon],
            impact=pos(hit.position) if hit else None,
            target=hit.cybug_id if hit else None,
        )
        if hit is None or hit.kind is EntityKind.BARRIER:
            return
        if hit.cybug_id is not None:
            base = self.rules.missile_damage if weapon == "missile" else self.rules.gun_damage
            self.damage(self.world.cybug(hit.cybug_id), base, weapon, self.actor)
            return
        # A mine on the ray goes off where it lies.
        self.world.set_terrain(hit.position, Terrain.EMPTY)
        self.emit("mine_tripped", position=pos(hit.position), cause=weapon)
        self.splash(hit.position, self.rules.discharge_radius, self.rules.mine_damage, "mine")

    def _grenade(self) -> None:
        landing = self.actor.position
        for _ in range(self.rules.grenade_offset):
            nxt = _step(landing, self.actor.vm.heading)
            if not self.world.in_bounds(nxt) or self.world.terrain(nxt) is Terrain.BARRIER:
                break
            landing = nxt
        radius = self.rules.grenade_radius
        cleared = self.clear_mines(landing, radius)
        self.emit(
            "fired",
            weapon="grenade",
            ammo=self.actor.vm.ammo["grenade"],
            impact=pos(landing),
            target=None,
            mines_cleared=cleared,
        )
        self.report_mines(cleared, "grenade")
        self.splash(landing, radius, self.rules.grenade_damage, "grenade")

    def discharge(self) -> None:
        radius = self.rules.discharge_radius
        cleared = self.clear_mines(self.actor.position, radius)
        self.emit("discharged", radius=radius, mines_cleared=cleared)
        self.report_mines(cleared, "discharge")
        self.splash(self.actor.position, radius, self.rules.discharge_damage, "discharge", exclude=self.actor)

    def shield(self, state: str) -> None:
        up = state == "up"
        if up and self.actor.vm.fuel <= 0:
            return
        self.actor.vm.shield_up = up
        self.emit("shield_changed", up=up, fuel=self.actor.vm.fuel)

    def self_destruct(self) -> None:
        actor = self.actor
        radius = self.rules.selfdestruct_radius
        actor.vm.damage = 100
        cleared = self.clear_mines(actor.position, radius)
        self.emit("self_destructed", position=pos(actor.position), radius=radius, mines_cleared=cleared)
        self.report_mines(cleared, "self_destruct")
        self.splash(actor.position, radius, self.rules.selfdestruct_damage, "self_destruct", exclude=actor)
        self.destroy(actor, None)


def apply_action(world: World, cybug_id: int, action: Action) -> list[Event]:
    """Resolve one Action for a living Cybug and return the events it caused."""
    r = _Resolver(world, _acting(world, cybug_id))
    kind = action.kind
    if kind is ActionKind.MOVE:
        r.move(action.arg)
    elif kind is ActionKind.TURN:
        r.turn(action.arg)
    elif kind is ActionKind.SCAN:
        r.scan(action.arg)
    elif kind is ActionKind.FIRE:
        r.fire(action.arg)
    elif kind is ActionKind.DISCHARGE:
        r.discharge()
    elif kind is ActionKind.SHIELD_SET:
        r.shield(action.arg)
    elif kind is ActionKind.SELF_DESTRUCT:
        r.self_destruct()
    elif kind is not ActionKind.IDLE:
        raise ValueError(f"unknown action {action}")
    return r.events


def _upkeep(world: World, cybug: Cybug) -> list[Event]:
    vm = cybug.vm
    if not vm.shield_up:
        return []
    t = world.tick + 1
    vm.fuel = max(0, vm.fuel - world.rules.shield_upkeep_per_tick)
    out = [Event(t, cybug.id, "shield_upkeep", {"fuel": vm.fuel})]
    if vm.fuel == 0:
        vm.shield_up = False
        out.append(Event(t, cybug.id, "shield_changed", {"up": False, "fuel": 0}))
    return out


def tick(world: World) -> list[Event]:
    """Run one global tick and append its events to the world log."""
    if is_over(world) is not None:
        raise RuntimeError("tick on a finished world")
    events: list[Event] = []
    for cybug in world.cybugs:
        if not cybug.alive:
            continue
        events.extend(_upkeep(world, cybug))
        result = step_tick(cybug.vm, _Host(world, cybug))
        cybug.executed.update(result.executed)
        for effect in result.effects:
            events.extend(apply_action(world, cybug.id, effect))
        if result.fault is not None:
            events.append(Event(world.tick + 1, cybug.id, "fault", {"reason": result.fault}))
        if result.action.kind is not ActionKind.IDLE:
            events.extend(apply_action(world, cybug.id, result.action))
    world.tick += 1
    world.log.extend(events)
    return events


def team_points(world: World) -> dict[str, int]:
    return {team: s.points(world.rules) for team, s in sorted(world.scores.items())}


def _leader(points: dict[str, int]) -> Optional[str]:
    if not points:
        return None
    best = max(points.values())
    leaders = [t for t, p in points.items() if p == best]
    return leaders[0] if len(leaders) == 1 else None


def is_over(world: World) -> Optional[Outcome]:
    alive = world.teams_alive()
    if len(alive) == 1:
        return Outcome("team_eliminated", next(iter(alive)))
    if not alive:
        # Nobody left standing: the score decides.
        return Outcome("team_eliminated", _leader(team_points(world)))
    if world.tick >= world.rules.max_ticks:
        return Outcome("tick_limit", _leader(team_points(world)))
    return None


def match_end_event(world: World, outcome: Outcome) -> Event:
    return Event(
        world.tick,
        WORLD,
        "match_end",
        {"reason": outcome.reason, "winner": outcome.winner, "points": team_points(world)},
    )
