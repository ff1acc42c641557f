from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Tuple

Position = Tuple[int, int]


class EntityKind(str, Enum):
    ENEMY = "enemy"
    FLAG = "flag"
    BARRIER = "barrier"
    MINE = "mine"
    FUEL = "fuel"


class Heading(str, Enum):
    # y grows southwards, so north is (0, -1).
    NORTH = "north"
    EAST = "east"
    SOUTH = "south"
    WEST = "west"

    @property
    def vector(self) -> Position:
        return _VECTORS[self]

    def turned(self, direction: str) -> "Heading":
        order = list(Heading)
        step = 1 if direction == "right" else -1
        return order[(order.index(self) + step) % 4]

    def reversed(self) -> "Heading":
        return self.turned("right").turned("right")


_VECTORS = {
    Heading.NORTH: (0, -1),
    Heading.EAST: (1, 0),
    Heading.SOUTH: (0, 1),
    Heading.WEST: (-1, 0),
}


@dataclass(frozen=True)
class ScanResult:
    kind: EntityKind
    distance: int

    def __post_init__(self) -> None:
        if self.distance < 1:
            raise ValueError(f"scan distance must be >= 1, got {self.distance}")
