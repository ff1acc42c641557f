from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Mapping, Optional, Union

from .errors import ConfigError


def _default_config_paths() -> list[Path]:
    """Search order for the rules file.

    An explicit CYBUG_CONFIG wins; otherwise a cybug.conf in the working
    directory is picked up when present.
    """

    p = (os.getenv("CYBUG_CONFIG") or "").strip()
    if p:
        return [Path(p)]
    return [Path.cwd() / "cybug.conf"]


def find_config_file() -> Optional[Path]:
    for p in _default_config_paths():
        if p.exists():
            return p
    return None


@dataclass(frozen=True)
class RuleConfig:
    # Grid size is taken from the map when a world is built.
    width: int = 16
    height: int = 16

    # Fuel points.
    fuel_start: int = 100
    fuel_max: int = 100
    move_cost: int = 1
    blocked_move_cost: int = 1
    shield_upkeep_per_tick: int = 1
    fuel_pickup: int = 50

    missile_ammo: int = 20
    missile_damage: int = 30
    missile_range: int = 8
    gun_ammo: int = 50
    gun_damage: int = 10
    gun_range: int = 3
    grenade_ammo: int = 5
    grenade_damage: int = 20
    grenade_offset: int = 3
    grenade_radius: int = 1
    discharge_damage: int = 20
    discharge_radius: int = 1
    selfdestruct_damage: int = 60
    selfdestruct_radius: int = 2
    mine_damage: int = 25

    # Incoming damage multiplier while the shield is up (floor-rounded).
    shield_factor: float = 0.5

    scan_range_long: int = 8
    scan_range_directional: int = 4

    budget: int = 64
    call_depth: int = 16
    random_max: int = 4

    flag_points: int = 10
    kill_points: int = 5

    max_ticks: int = 1000
    seed: int = 0

    @property
    def enemy_range(self) -> int:
        """Distance at which a scanned enemy counts as "in range"."""
        return self.missile_range

    def with_overrides(self, overrides: Mapping[str, Union[str, int, float]]) -> "RuleConfig":
        known = {f.name: f for f in fields(self)}
        changes: dict[str, Union[int, float]] = {}
        for key, raw in overrides.items():
            name = key.strip().lower().replace("-", "_")
            f = known.get(name)
            if f is None:
                raise ConfigError(f"unknown rule '{key}'")
            try:
                if f.type in ("float", float):
                    changes[name] = float(raw)
                else:
                    changes[name] = int(str(raw).strip(), 0) if isinstance(raw, str) else int(raw)
            except ValueError:
                raise ConfigError(f"rule '{key}' expects a number, got {raw!r}") from None
        out = replace(self, **changes)
        out.validate()
        return out

    def validate(self) -> None:
        for f in fields(self):
            value = getattr(self, f.name)
            if value < 0:
                raise ConfigError(f"rule '{f.name}' must be >= 0, got {value}")
        for name in (
            "missile_range",
            "gun_range",
            "grenade_offset",
            "scan_range_long",
            "scan_range_directional",
            "budget",
            "random_max",
            "width",
            "height",
        ):
            if getattr(self, name) < 1:
                raise ConfigError(f"rule '{name}' must be >= 1")
        if not 0.0 <= self.shield_factor <= 1.0:
            raise ConfigError(f"shield_factor must be within [0, 1], got {self.shield_factor}")
        if self.fuel_start > self.fuel_max:
            raise ConfigError("fuel_start cannot exceed fuel_max")


def read_kv_file(path: Path) -> dict[str, str]:
    """Read a `key=value` file; blank lines and `#` comments are skipped."""
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    out: dict[str, str] = {}
    for line in path.read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#") or "=" not in line:
            continue
        k, v = line.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def load_rules(path: Optional[Path] = None, base: Optional[RuleConfig] = None) -> RuleConfig:
    """Defaults, then the rules file (explicit path or discovered one)."""
    rules = base or RuleConfig()
    path = path or find_config_file()
    if path is None:
        return rules
    return rules.with_overrides(read_kv_file(path))


def env_seed(default: int = 0) -> int:
    v = (os.getenv("CYBUG_SEED") or "").strip()
    if not v:
        return default
    try:
        return int(v)
    except ValueError:
        raise ConfigError(f"CYBUG_SEED must be an integer, got {v!r}") from None
