from __future__ import annotations

import json
import logging
from enum import Enum
from pathlib import Path
from typing import List, Optional

import typer
from rich.console import Console
from rich.logging import RichHandler

from .caicl.diagnostics import Diagnostic, has_errors, sort_key
from .caicl.lint import lint as lint_program
from .caicl.parser import parse as parse_source
from .caicl.program import format_program
from .config import RuleConfig, env_seed, load_rules
from .errors import CybugError, ScriptLoadError, TournamentError

app = typer.Typer(add_completion=False, no_args_is_help=True, help="Cybug war toolchain: scripts, matches, tournaments.")
# No markup or highlighting: script text and paths are printed as-is.
console = Console(markup=False, highlight=False, soft_wrap=True)
err_console = Console(stderr=True, markup=False, highlight=False, soft_wrap=True)

logger = logging.getLogger("cybugwar")


class ReplayFormat(str, Enum):
    text = "text"
    summary = "summary"


@app.callback()
def main(verbose: bool = typer.Option(False, "--verbose", "-v", help="Debug logging on stderr.")) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(message)s",
        handlers=[RichHandler(console=err_console, show_time=False, show_path=False)],
        force=True,
    )


def _print_diagnostics(diags: List[Diagnostic], filename: str) -> None:
    for d in sorted(diags, key=sort_key):
        console.print(d.render(filename))


def _rules(config: Optional[Path]) -> RuleConfig:
    return load_rules(config)


def _seed(flag: Optional[int], rules: RuleConfig) -> int:
    return flag if flag is not None else env_seed(rules.seed)


def _fail(e: CybugError) -> None:
    err_console.print(f"error: {e}")
    if isinstance(e, TournamentError) and isinstance(e.cause, ScriptLoadError):
        e = e.cause
    if isinstance(e, ScriptLoadError):
        for d in e.diagnostics:
            err_console.print(d.render(e.label))
    raise typer.Exit(1)


@app.command()
def parse(
    file: Path = typer.Argument(..., exists=True, dir_okay=False, help="CAICL script (.cb)."),
    strict: bool = typer.Option(False, "--strict", help="Reject input that needs recovery."),
    fmt: bool = typer.Option(False, "--format", help="Print the canonical source instead of a summary."),
) -> None:
    """Parse a script and print its summary and diagnostics."""
    result = parse_source(file.read_text(encoding="utf-8"), mode="strict" if strict else "lenient")
    program = result.program
    if program is not None:
        if fmt:
            console.print(format_program(program), end="")
        else:
            labels = ",".join(sorted(program.labels))
            console.print(f"name={program.name} instructions={len(program)} labels={labels}")
    _print_diagnostics(list(result.diagnostics), str(file))
    raise typer.Exit(1 if program is None or has_errors(result.diagnostics) else 0)


@app.command()
def lint(
    file: Path = typer.Argument(..., exists=True, dir_okay=False, help="CAICL script (.cb)."),
    strict: bool = typer.Option(False, "--strict", help="Parse in strict mode first."),
) -> None:
    """Parse, then report unreachable code, undefined/unused labels and more."""
    result = parse_source(file.read_text(encoding="utf-8"), mode="strict" if strict else "lenient")
    diags = list(result.diagnostics)
    if result.program is not None:
        # The parser already reports undefined labels.
        seen = {(d.code, d.span.line) for d in diags}
        diags.extend(d for d in lint_program(result.program) if (d.code, d.span.line) not in seen)
    _print_diagnostics(diags, str(file))
    raise typer.Exit(1 if result.program is None or has_errors(diags) else 0)


@app.command()
def run(
    map_ref: str = typer.Option(..., "--map", help="Map file or builtin map name (duel, minefield)."),
    bot: List[str] = typer.Option(..., "--bot", help="Script path or builtin bot, optionally FILE:team. Repeat per bot."),
    seed: Optional[int] = typer.Option(None, "--seed", help="Match seed (default: CYBUG_SEED, then config)."),
    max_ticks: Optional[int] = typer.Option(None, "--max-ticks", min=1),
    replay_out: Optional[Path] = typer.Option(None, "--replay", help="Write the JSON-lines replay here."),
    config: Optional[Path] = typer.Option(None, "--config", help="key=value rules file."),
) -> None:
    """Run one match and print its result."""
    from .match_runner import BotEntry, MatchConfig, run_match
    from .replay import write_replay

    try:
        rules = _rules(config)
        entries = tuple(BotEntry.parse(spec, chr(ord("A") + i)) for i, spec in enumerate(bot))
        cfg = MatchConfig(map=map_ref, bots=entries, rules=rules, seed=_seed(seed, rules), max_ticks=max_ticks)
        result, data = run_match(cfg)
    except CybugError as e:
        _fail(e)
        return

    if replay_out is not None:
        write_replay(replay_out, data)

    console.print(f"outcome={result.outcome.reason} winner={result.winner or 'draw'} ticks={result.ticks}")
    for team, t in sorted(result.teams.items()):
        console.print(f"team={team} flags={t.flags} kills={t.kills} points={t.points}")
    console.print(f"survivors={','.join(str(i) for i in result.survivors) or '-'}")
    console.print(f"digest={result.digest}")


def _bot_sources(spec: str) -> List[str]:
    p = Path(spec)
    if p.is_dir():
        return [str(f) for f in sorted(p.glob("*.cb"))]
    return [s.strip() for s in spec.split(",") if s.strip()]


@app.command()
def tournament(
    bots: str = typer.Option(..., "--bots", help="Directory of .cb scripts or comma-separated list."),
    map_ref: str = typer.Option(..., "--map", help="Map file or builtin map name."),
    rounds: int = typer.Option(1, "--rounds", min=1),
    seed: Optional[int] = typer.Option(None, "--seed", help="Base seed (default: CYBUG_SEED, then config)."),
    report: Optional[Path] = typer.Option(None, "--report", help="Write the standings JSON here."),
    workers: int = typer.Option(1, "--workers", min=1, help="Matches run in parallel."),
    max_ticks: Optional[int] = typer.Option(None, "--max-ticks", min=1),
    config: Optional[Path] = typer.Option(None, "--config", help="key=value rules file."),
) -> None:
    """Round-robin every pair of bots and print the standings."""
    from dataclasses import replace

    from .match_runner import BotEntry
    from .tournament import run_tournament

    try:
        rules = _rules(config)
        if max_ticks is not None:
            rules = replace(rules, max_ticks=max_ticks)
        sources = _bot_sources(bots)
        standings = run_tournament(
            sources,
            map_ref,
            rounds,
            _seed(seed, rules),
            rules,
            workers=workers,
            label=lambda s: BotEntry(s, "").label,
        )
    except CybugError as e:
        _fail(e)
        return

    if report is not None:
        report.parent.mkdir(parents=True, exist_ok=True)
        report.write_text(json.dumps(standings.to_dict(), indent=2) + "\n", encoding="utf-8")

    console.print(f"bots={len(standings.bots)} matches={len(standings.matches)}")
    for name, r in standings.ranked():
        console.print(f"bot={name} wins={r.wins} draws={r.draws} losses={r.losses} points={r.points}")


@app.command()
def replay(
    file: Path = typer.Argument(..., exists=True, dir_okay=False, help="Replay file (.jsonl)."),
    fmt: ReplayFormat = typer.Option(ReplayFormat.text, "--format", help="text: one line per event; summary: final state."),
) -> None:
    """Pretty-print a replay."""
    from .replay import digest, read_replay, reconstruct

    try:
        events, result = read_replay(file)
    except ValueError as e:
        err_console.print(f"error: {file}: {e}")
        raise typer.Exit(1)

    if fmt is ReplayFormat.text:
        for e in events:
            fields = " ".join(f"{k}={json.dumps(v, separators=(',', ':'))}" for k, v in e.to_dict()["payload"].items())
            console.print(f"{e.tick:>5} {str(e.actor):>5} {e.kind} {fields}".rstrip())
        return

    state = reconstruct(events)
    outcome = state.outcome or {}
    console.print(f"events={len(events)} ticks={state.tick} digest={digest(file.read_bytes())}")
    console.print(f"outcome={outcome.get('reason', '-')} winner={outcome.get('winner') or 'draw'}")
    for team in sorted(state.flags):
        console.print(f"team={team} flags={state.flags[team]} kills={state.kills[team]}")
    for i, c in sorted(state.cybugs.items()):
        console.print(
            f"cybug={i} team={c.team} name={c.name} alive={str(c.alive).lower()} "
            f"position={c.position[0]},{c.position[1]} heading={c.heading} fuel={c.fuel} damage={c.damage}"
        )
    if result is not None and result.get("survivors") != state.survivors():
        err_console.print("warning: result record disagrees with reconstructed survivors")
