"""Per-Cybug interpreter.

Each tick a Cybug runs its script from `pc` until it reaches one ACTING
instruction (move, turn, directional/long scan, fire, discharge, self
destruct) or spends its instruction budget on INSTANT ones (shield set,
gps scan, generate random, goto, gosub, return, name, if-evaluation).
The acting instruction is handed to the arena as an `Action`; the pc
survives between ticks.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Protocol

from .caicl.program import (
    BumpBarrier,
    Command,
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
)
from .config import RuleConfig
from .models import EntityKind, Heading, Position, ScanResult

logger = logging.getLogger(__name__)

MAX_DAMAGE = 100


class ActionKind(str, Enum):
    MOVE = "move"
    TURN = "turn"
    SCAN = "scan"
    FIRE = "fire"
    DISCHARGE = "discharge"
    SHIELD_SET = "shield_set"
    SELF_DESTRUCT = "self_destruct"
    IDLE = "idle"


@dataclass(frozen=True)
class Action:
    kind: ActionKind
    # forward|backward, left|right, long|forward|backward|left|right|gps,
    # missile|gun|grenade, up|down, or the Idle reason.
    arg: str = ""

    def __str__(self) -> str:
        return f"{self.kind.value}({self.arg})" if self.arg else self.kind.value


IDLE_HALTED = Action(ActionKind.IDLE, "program_halted")
IDLE_BUDGET = Action(ActionKind.IDLE, "budget_exhausted")

ACTIONS_BY_OP = {
    Op.MOVE_FORWARD: Action(ActionKind.MOVE, "forward"),
    Op.MOVE_BACKWARD: Action(ActionKind.MOVE, "backward"),
    Op.TURN_LEFT: Action(ActionKind.TURN, "left"),
    Op.TURN_RIGHT: Action(ActionKind.TURN, "right"),
    Op.LONG_RANGE_SCAN: Action(ActionKind.SCAN, "long"),
    Op.SCAN_FORWARD: Action(ActionKind.SCAN, "forward"),
    Op.SCAN_BACKWARD: Action(ActionKind.SCAN, "backward"),
    Op.SCAN_LEFT: Action(ActionKind.SCAN, "left"),
    Op.SCAN_RIGHT: Action(ActionKind.SCAN, "right"),
    Op.LAUNCH_MISSILE: Action(ActionKind.FIRE, "missile"),
    Op.FIRE_GUN: Action(ActionKind.FIRE, "gun"),
    Op.THROW_GRENADE: Action(ActionKind.FIRE, "grenade"),
    Op.DISCHARGE_ENERGY: Action(ActionKind.DISCHARGE),
    Op.SELF_DESTRUCT: Action(ActionKind.SELF_DESTRUCT),
}


@dataclass(frozen=True)
class Percepts:
    scan_result: Optional[ScanResult] = None
    bump: bool = False
    gps: Optional[Position] = None


class VmHost(Protocol):
    """What the interpreter needs from the battlefield during a tick."""

    def random_draw(self, upper: int) -> int: ...

    def gps(self) -> Position: ...


@dataclass
class CybugVmState:
    program: Program
    rules: RuleConfig
    pc: int = 0
    call_stack: list[int] = field(default_factory=list)
    fuel: int = 0
    damage: int = 0
    random_reg: int = 1
    scan_reg: Optional[ScanResult] = None
    gps_reg: Optional[Position] = None
    bump_flag: bool = False
    shield_up: bool = False
    heading: Heading = Heading.NORTH
    ammo: dict[str, int] = field(default_factory=dict)
    flags_carried: int = 0
    faulted: bool = False

    @property
    def alive(self) -> bool:
        return self.damage < MAX_DAMAGE


@dataclass(frozen=True)
class TickResult:
    action: Action
    executed: tuple[int, ...]
    # Instant side effects the arena must record (shield changes).
    effects: tuple[Action, ...] = ()
    fault: Optional[str] = None


def init_vm(program: Program, config: RuleConfig, heading: Heading = Heading.NORTH) -> CybugVmState:
    return CybugVmState(
        program=program,
        rules=config,
        fuel=min(config.fuel_start, config.fuel_max),
        heading=heading,
        ammo={
            "missile": config.missile_ammo,
            "gun": config.gun_ammo,
            "grenade": config.grenade_ammo,
        },
    )


def eval_condition(cond: Condition, state: CybugVmState) -> bool:
    if isinstance(cond, ScanFound):
        reg = state.scan_reg
        if reg is None or reg.kind is not cond.kind:
            return False
        limit = state.rules.enemy_range if cond.kind is EntityKind.ENEMY else state.rules.scan_range_long
        return reg.distance <= limit
    if isinstance(cond, BumpBarrier):
        return state.bump_flag
    if isinstance(cond, RandomIs):
        return state.random_reg == cond.value
    if isinstance(cond, FuelCmp):
        return cond.comparator.apply(state.fuel, cond.value)
    if isinstance(cond, DamageCmp):
        return cond.comparator.apply(state.damage, cond.value)
    raise TypeError(f"unknown condition {cond!r}")


class _Fault(Exception):
    pass


def _execute(state: CybugVmState, instr: Instruction, index: int, host: VmHost, effects: list[Action]) -> Optional[Action]:
    """Run one non-If instruction. Returns the Action if it is ACTING."""
    if isinstance(instr, Command):
        op = instr.op
        if op.acting:
            return ACTIONS_BY_OP[op]
        if op is Op.RAISE_SHIELD:
            if not state.shield_up and state.fuel > 0:
                state.shield_up = True
                effects.append(Action(ActionKind.SHIELD_SET, "up"))
        elif op is Op.LOWER_SHIELD:
            if state.shield_up:
                state.shield_up = False
                effects.append(Action(ActionKind.SHIELD_SET, "down"))
        elif op is Op.GPS_SCAN:
            state.gps_reg = host.gps()
        elif op is Op.GENERATE_RANDOM:
            state.random_reg = host.random_draw(state.rules.random_max)
        elif op is Op.RETURN:
            state.pc = state.call_stack.pop() if state.call_stack else len(state.program)
        return None
    if isinstance(instr, Name):
        return None
    if isinstance(instr, Goto):
        target = state.program.resolve(instr.label)
        if target is not None:
            state.pc = target
        return None
    if isinstance(instr, Gosub):
        target = state.program.resolve(instr.label)
        if target is None:
            return None
        if len(state.call_stack) >= state.rules.call_depth:
            raise _Fault(f"call stack overflow at instruction {index} (depth {len(state.call_stack)})")
        state.call_stack.append(index + 1)
        state.pc = target
        return None
    raise TypeError(f"unexpected instruction {instr!r}")


def step_tick(state: CybugVmState, host: VmHost) -> TickResult:
    """Advance one Cybug by one tick; mutates `state` in place."""
    if not state.alive:
        raise ValueError("step_tick on a destroyed Cybug")

    program = state.program
    instructions = program.instructions
    n = len(instructions)
    if state.faulted:
        return TickResult(IDLE_HALTED, ())

    budget = state.rules.budget
    executed: list[int] = []
    effects: list[Action] = []
    units = 0
    # pc -> (units, len(executed)) at its first visit since VM state last changed.
    visits: Optional[dict[int, tuple[int, int]]] = {}

    while units < budget:
        if state.pc >= n:
            state.pc = n
            return TickResult(IDLE_HALTED, tuple(executed), tuple(effects))

        index = state.pc
        if visits is not None:
            first = visits.get(index)
            if first is None:
                visits[index] = (units, len(executed))
            else:
                # Same pc, same state: the loop since then repeats exactly, so skip whole laps.
                lap_units = units - first[0]
                laps = (budget - units) // lap_units
                executed.extend(executed[first[1] :] * laps)
                units += lap_units * laps
                visits = None
                continue
        executed.append(index)
        instr = instructions[index]
        state.pc = index + 1

        if isinstance(instr, If):
            units += 1
            if not eval_condition(instr.condition, state):
                continue
            instr = instr.body

        try:
            action = _execute(state, instr, index, host, effects)
        except _Fault as e:
            state.faulted = True
            state.pc = n
            state.call_stack.clear()
            logger.info("program %s faulted: %s", program.name, e)
            return TickResult(IDLE_HALTED, tuple(executed), tuple(effects), fault=str(e))
        if action is not None:
            return TickResult(action, tuple(executed), tuple(effects))
        if visits is not None and not isinstance(instr, (Goto, Name)):
            visits = {}
        units += 1

    return TickResult(IDLE_BUDGET, tuple(executed), tuple(effects))
