"""Replay files: one JSON event per line, then a single result line.

The digest of a match is the SHA-256 of the exact file bytes, so two runs
are identical exactly when their replays are.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Mapping, Optional

from .events import Event


def encode(events: Iterable[Event], result: Mapping[str, Any]) -> bytes:
    lines = [e.to_json() for e in events]
    lines.append(json.dumps({"result": result}, separators=(",", ":"), sort_keys=True, ensure_ascii=False))
    return ("\n".join(lines) + "\n").encode("utf-8")


def digest(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def write_replay(path: Path, data: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(data)


def decode(text: str) -> tuple[list[Event], Optional[dict[str, Any]]]:
    events: list[Event] = []
    result: Optional[dict[str, Any]] = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as e:
            raise ValueError(f"line {lineno}: not JSON ({e.msg})") from None
        if "result" in obj and "kind" not in obj:
            result = obj["result"]
            continue
        events.append(Event.from_dict(obj))
    return events, result


def read_replay(path: Path) -> tuple[list[Event], Optional[dict[str, Any]]]:
    return decode(path.read_text(encoding="utf-8"))


@dataclass
class CybugTrack:
    team: str
    name: str
    position: tuple[int, int]
    heading: str
    fuel: int
    damage: int = 0
    shield_up: bool = False
    flags: int = 0
    alive: bool = True


@dataclass
class ReplayState:
    cybugs: dict[int, CybugTrack] = field(default_factory=dict)
    flags: dict[str, int] = field(default_factory=dict)
    kills: dict[str, int] = field(default_factory=dict)
    tick: int = 0
    outcome: Optional[dict[str, Any]] = None

    def survivors(self) -> list[int]:
        return sorted(i for i, c in self.cybugs.items() if c.alive)


def reconstruct(events: Iterable[Event]) -> ReplayState:
    """Rebuild match state from events alone."""
    st = ReplayState()
    for e in events:
        st.tick = max(st.tick, e.tick)
        p = e.payload
        if e.kind == "spawned":
            st.cybugs[e.actor] = CybugTrack(
                team=p["team"],
                name=p.get("name", ""),
                position=tuple(p["position"]),
                heading=p["heading"],
                fuel=p["fuel"],
            )
            st.flags.setdefault(p["team"], 0)
            st.kills.setdefault(p["team"], 0)
            continue
        if e.kind == "match_end":
            st.outcome = dict(p)
            continue
        c = st.cybugs[e.actor]
        if e.kind == "moved":
            c.position = tuple(p["to"])
            c.fuel = p["fuel"]
        elif e.kind in ("bumped", "shield_upkeep", "fuel_taken"):
            c.fuel = p["fuel"]
        elif e.kind == "turned":
            c.heading = p["heading"]
        elif e.kind == "shield_changed":
            c.shield_up = bool(p["up"])
            c.fuel = p["fuel"]
        elif e.kind == "hit":
            c.damage = p["damage"]
        elif e.kind == "self_destructed":
            c.damage = 100
        elif e.kind == "flag_taken":
            c.flags += 1
            st.flags[c.team] += 1
        elif e.kind == "destroyed":
            c.alive = False
            if p.get("credited"):
                st.kills[p["credited"]] += 1
    return st
