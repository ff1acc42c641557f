"""Round-robin tournaments.

Every unordered pair of bots plays `rounds` matches; round r uses seed
base_seed + r and swaps the spawn order on odd rounds. Matches are CPU-bound,
so `workers` > 1 spreads them over worker processes; results are gathered by
match index so standings never depend on completion order.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from itertools import combinations
from typing import Any, Callable, Mapping, Optional, Sequence

from .caicl.program import Program
from .config import RuleConfig
from .errors import CybugError, MatchSetupError, TournamentError
from .match_runner import MatchResult, load_bot, load_map_text, play

logger = logging.getLogger(__name__)

WIN_POINTS = 3
DRAW_POINTS = 1

TEAM_A = "A"
TEAM_B = "B"


@dataclass(frozen=True)
class Pairing:
    index: int
    a: str
    b: str
    round: int
    seed: int

    @property
    def swapped(self) -> bool:
        return self.round % 2 == 1


@dataclass
class BotRecord:
    wins: int = 0
    draws: int = 0
    losses: int = 0

    @property
    def played(self) -> int:
        return self.wins + self.draws + self.losses

    @property
    def points(self) -> int:
        return self.wins * WIN_POINTS + self.draws * DRAW_POINTS


@dataclass
class Standings:
    bots: list[str]
    table: dict[str, BotRecord]
    matches: list[dict[str, Any]] = field(default_factory=list)

    def ranked(self) -> list[tuple[str, BotRecord]]:
        return sorted(self.table.items(), key=lambda kv: (-kv[1].points, -kv[1].wins, kv[0]))

    def to_dict(self) -> dict[str, Any]:
        return {
            "bots": list(self.bots),
            "matches": list(self.matches),
            "table": [
                {
                    "bot": name,
                    "wins": r.wins,
                    "draws": r.draws,
                    "losses": r.losses,
                    "points": r.points,
                }
                for name, r in self.ranked()
            ],
        }


def unique_names(sources: Sequence[str], label: Callable[[str], str]) -> list[str]:
    """Display names for bots; repeated names get a #n suffix."""
    seen: dict[str, int] = {}
    out: list[str] = []
    for s in sources:
        base = label(s)
        seen[base] = seen.get(base, 0) + 1
        out.append(base if seen[base] == 1 else f"{base}#{seen[base]}")
    return out


def schedule(names: Sequence[str], rounds: int, base_seed: int) -> list[Pairing]:
    out: list[Pairing] = []
    for a, b in combinations(names, 2):
        for r in range(rounds):
            out.append(Pairing(len(out), a, b, r, base_seed + r))
    return out


def _play_pairing(
    pairing: Pairing,
    programs: Mapping[str, Program],
    map_text: str,
    rules: RuleConfig,
) -> MatchResult:
    lineup = [(programs[pairing.a], TEAM_A), (programs[pairing.b], TEAM_B)]
    if pairing.swapped:
        lineup.reverse()
    result, _ = play(map_text, lineup, replace(rules, seed=pairing.seed))
    return result


def run_tournament(
    bots: Sequence[str],
    map_ref: str,
    rounds: int,
    base_seed: int,
    rules: Optional[RuleConfig] = None,
    *,
    workers: int = 1,
    label: Callable[[str], str] = lambda s: s,
) -> Standings:
    if len(bots) < 2:
        raise MatchSetupError("a tournament needs at least two bots")
    if rounds < 1:
        raise MatchSetupError("rounds must be >= 1")
    rules = rules or RuleConfig()

    names = unique_names(bots, label)
    programs: dict[str, Program] = {}
    for name, source in zip(names, bots):
        try:
            programs[name] = load_bot(source)
        except CybugError as e:
            raise TournamentError(name, e) from e
    map_text = load_map_text(map_ref)

    pairings = schedule(names, rounds, base_seed)
    logger.info("tournament: %d bots, %d matches, workers=%d", len(names), len(pairings), workers)

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futs = [pool.submit(_play_pairing, p, programs, map_text, rules) for p in pairings]
            results = [f.result() for f in futs]
    else:
        results = [_play_pairing(p, programs, map_text, rules) for p in pairings]

    standings = Standings(bots=names, table={n: BotRecord() for n in names})
    for p, res in zip(pairings, results):
        a, b = standings.table[p.a], standings.table[p.b]
        if res.winner == TEAM_A:
            a.wins += 1
            b.losses += 1
        elif res.winner == TEAM_B:
            b.wins += 1
            a.losses += 1
        else:
            a.draws += 1
            b.draws += 1
        standings.matches.append(
            {
                "index": p.index,
                "a": p.a,
                "b": p.b,
                "round": p.round,
                "seed": p.seed,
                "winner": {TEAM_A: p.a, TEAM_B: p.b}.get(res.winner or ""),
                "reason": res.outcome.reason,
                "ticks": res.ticks,
                "digest": res.digest,
            }
        )
        logger.debug("match %d: %s vs %s -> %s", p.index, p.a, p.b, res.winner or "draw")
    return standings
