from __future__ import annotations

from importlib import resources

BUILTIN_MAPS = ("duel", "minefield")


def builtin_map_text(name: str) -> str:
    if name not in BUILTIN_MAPS:
        raise KeyError(f"unknown builtin map '{name}' (known: {', '.join(BUILTIN_MAPS)})")
    return resources.files(__package__).joinpath(f"{name}.map").read_text(encoding="utf-8")
