"""In-memory form of a CAICL script."""

from __future__ import annotations

import operator
from functools import cached_property
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Optional, Tuple, Union

from ..models import EntityKind
from .diagnostics import SourceSpan


class Op(str, Enum):
    """Nullary statements. The value is the canonical source spelling."""

    RAISE_SHIELD = "raise shield"
    LOWER_SHIELD = "lower shield"
    MOVE_FORWARD = "move forward"
    MOVE_BACKWARD = "move backward"
    TURN_LEFT = "turn left"
    TURN_RIGHT = "turn right"
    LONG_RANGE_SCAN = "long range scan"
    SCAN_FORWARD = "scan forward"
    SCAN_BACKWARD = "scan backward"
    SCAN_LEFT = "scan left"
    SCAN_RIGHT = "scan right"
    GPS_SCAN = "gps scan"
    LAUNCH_MISSILE = "launch missile"
    FIRE_GUN = "fire gun"
    THROW_GRENADE = "throw grenade"
    DISCHARGE_ENERGY = "discharge energy"
    GENERATE_RANDOM = "generate random"
    SELF_DESTRUCT = "self destruct"
    RETURN = "return"

    @property
    def acting(self) -> bool:
        return self not in INSTANT_OPS


INSTANT_OPS = frozenset({Op.RAISE_SHIELD, Op.LOWER_SHIELD, Op.GPS_SCAN, Op.GENERATE_RANDOM, Op.RETURN})


class Comparator(str, Enum):
    LT = "<"
    GT = ">"
    EQ = "="
    LE = "<="
    GE = ">="

    def apply(self, left: int, right: int) -> bool:
        return _CMP[self](left, right)


_CMP = {
    Comparator.LT: operator.lt,
    Comparator.GT: operator.gt,
    Comparator.EQ: operator.eq,
    Comparator.LE: operator.le,
    Comparator.GE: operator.ge,
}


@dataclass(frozen=True)
class ScanFound:
    kind: EntityKind

    def __str__(self) -> str:
        return f"scan found {self.kind.value}"


@dataclass(frozen=True)
class BumpBarrier:
    def __str__(self) -> str:
        return "bump barrier"


@dataclass(frozen=True)
class RandomIs:
    value: int

    def __str__(self) -> str:
        return f"random is {self.value}"


@dataclass(frozen=True)
class FuelCmp:
    comparator: Comparator
    value: int

    def __str__(self) -> str:
        return f"fuel is {self.comparator.value} {self.value}"


@dataclass(frozen=True)
class DamageCmp:
    comparator: Comparator
    value: int

    def __str__(self) -> str:
        return f"damage is {self.comparator.value} {self.value}"


Condition = Union[ScanFound, BumpBarrier, RandomIs, FuelCmp, DamageCmp]


@dataclass(frozen=True)
class Command:
    op: Op

    def __str__(self) -> str:
        return self.op.value


@dataclass(frozen=True)
class Name:
    ident: str

    def __str__(self) -> str:
        return f"name {self.ident}"


@dataclass(frozen=True)
class Goto:
    # Case-folded target; `text` keeps the author's spelling for printing.
    label: str
    text: str = field(default="", compare=False)

    def __str__(self) -> str:
        return f"goto {self.text or self.label}"


@dataclass(frozen=True)
class Gosub:
    label: str
    text: str = field(default="", compare=False)

    def __str__(self) -> str:
        return f"gosub {self.text or self.label}"


@dataclass(frozen=True)
class If:
    condition: Condition
    body: "Simple"

    def __post_init__(self) -> None:
        if isinstance(self.body, If):
            raise ValueError("conditionals cannot nest")

    def __str__(self) -> str:
        return f"if {self.condition} then {self.body}"


Simple = Union[Command, Name, Goto, Gosub]
Instruction = Union[Command, Name, Goto, Gosub, If]


def jump_label(instr: Instruction) -> Optional[str]:
    """Folded label referenced by a jump (directly or inside an If)."""
    if isinstance(instr, If):
        instr = instr.body
    if isinstance(instr, (Goto, Gosub)):
        return instr.label
    return None


@dataclass(frozen=True)
class Statement:
    span: SourceSpan = field(compare=False)
    instruction: Instruction


@dataclass(frozen=True)
class Program:
    name: str = "unnamed"
    statements: Tuple[Statement, ...] = ()
    labels: Mapping[str, int] = field(default_factory=dict)
    # Folded label -> spelling at its definition.
    label_text: Mapping[str, str] = field(default_factory=dict, compare=False)
    label_spans: Mapping[str, SourceSpan] = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        for key, index in self.labels.items():
            if not 0 <= index < len(self.statements):
                raise ValueError(f"label {key!r} points outside the program")

    def __len__(self) -> int:
        return len(self.statements)

    @cached_property
    def instructions(self) -> Tuple[Instruction, ...]:
        return tuple(s.instruction for s in self.statements)

    def resolve(self, label: str) -> Optional[int]:
        return self.labels.get(label.casefold())

    def labels_at(self, index: int) -> list[str]:
        return sorted(k for k, v in self.labels.items() if v == index)


def format_program(program: Program) -> str:
    """Canonical source text; parsing it gives back an equal Program."""
    lines: list[str] = []
    for index, stmt in enumerate(program.statements):
        for key in program.labels_at(index):
            lines.append(f"{program.label_text.get(key, key)}:")
        lines.append(str(stmt.instruction))
    return "\n".join(lines) + ("\n" if lines else "")
