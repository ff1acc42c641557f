"""Match events and their JSON-lines form."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Mapping, Union

WORLD = "world"

EVENT_KINDS = frozenset(
    {
        "spawned",
        "moved",
        "bumped",
        "turned",
        "scanned",
        "fired",
        "hit",
        "shield_changed",
        "shield_upkeep",
        "discharged",
        "mine_tripped",
        "fuel_taken",
        "flag_taken",
        "self_destructed",
        "destroyed",
        "out_of_ammo",
        "out_of_fuel",
        "fault",
        "match_end",
    }
)

Actor = Union[int, str]

_COMPACT = json.JSONEncoder(separators=(",", ":"), ensure_ascii=False)


@dataclass(frozen=True)
class Event:
    tick: int
    actor: Actor
    kind: str
    # JSON-native values only (positions are [x, y] lists).
    payload: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.kind not in EVENT_KINDS:
            raise ValueError(f"unknown event kind: {self.kind}")

    def to_dict(self) -> dict[str, Any]:
        return {
            "tick": self.tick,
            "actor": self.actor,
            "kind": self.kind,
            "payload": {k: self.payload[k] for k in sorted(self.payload)},
        }

    def to_json(self) -> str:
        return _COMPACT.encode(self.to_dict())

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "Event":
        return cls(int(d["tick"]), d["actor"], str(d["kind"]), dict(d.get("payload") or {}))


def pos(p: tuple[int, int]) -> list[int]:
    return [p[0], p[1]]
