import time

import pytest

from cybugwar import replay
from cybugwar.arena import tick
from cybugwar.audit import check_world, snapshot
from cybugwar.bots import BUILTIN_BOTS, builtin_bot
from cybugwar.config import RuleConfig
from cybugwar.errors import MatchSetupError, ScriptLoadError
from cybugwar.match_runner import BotEntry, MatchConfig, build_world, play, run_match
from cybugwar.models import EntityKind, ScanResult
from cybugwar.tournament import run_tournament
from support import IDLE, world_of


def config(a: str, b: str, *, map_ref: str = "duel", seed: int = 42, **kw) -> MatchConfig:
    return MatchConfig(map=map_ref, bots=(BotEntry(a, "A"), BotEntry(b, "B")), seed=seed, **kw)


class Auditor:
    """on_tick hook asserting world invariants after every tick."""

    def __init__(self):
        self.previous = None
        self.ticks = 0

    def __call__(self, world):
        problems = check_world(world, self.previous)
        assert problems == [], f"tick {world.tick}: {problems}"
        self.previous = snapshot(world)
        self.ticks += 1


def first_tick(events, actor, predicate):
    return next((e.tick for e in events if e.actor == actor and predicate(e)), None)


def test_ghazu_spec_beats_idle():
    result, data = run_match(config("ghazu_spec", "idle"))
    assert result.outcome.reason == "team_eliminated"
    assert result.winner == "A"
    assert result.ticks < 1000
    assert result.teams["A"].kills == 1
    assert result.survivors == (0,)


def test_ghazu_spec_fires_soon_after_seeing_the_enemy():
    result, data = run_match(config("ghazu_spec", "idle"))
    events, _ = replay.decode(data.decode("utf-8"))
    seen = first_tick(events, 0, lambda e: e.kind == "scanned" and e.payload["found"] == "enemy")
    shot = first_tick(events, 0, lambda e: e.kind in ("fired", "discharged"))
    assert seen is not None and shot is not None
    assert 0 <= shot - seen <= 5


def test_same_config_same_digest():
    cfg = config("ghazu_spec", "wanderer", map_ref="minefield")
    a, data_a = run_match(cfg)
    b, data_b = run_match(cfg)
    assert a.digest == b.digest == replay.digest(data_a)
    assert data_a == data_b


def test_different_seeds_differ():
    digests = {run_match(config("wanderer", "wanderer", map_ref="minefield", seed=s, max_ticks=200))[0].digest for s in range(5)}
    assert len(digests) == 5


def test_replay_reconstructs_result():
    for bots in (("ghazu_spec", "idle"), ("ghazu_spec", "wanderer"), ("ghazu_corpus", "wanderer")):
        result, data = run_match(config(*bots, map_ref="minefield", seed=7, max_ticks=400))
        events, record = replay.decode(data.decode("utf-8"))
        state = replay.reconstruct(events)
        assert record == result.record()
        assert state.survivors() == list(result.survivors)
        for team, t in result.teams.items():
            assert state.flags[team] == t.flags
            assert state.kills[team] == t.kills
        assert state.outcome["winner"] == result.winner
        assert events[-1].kind == "match_end"


def test_replay_lines_are_stable_json():
    _, data = run_match(config("ghazu_spec", "idle", max_ticks=5))
    lines = data.decode("utf-8").splitlines()
    assert lines[0].startswith('{"tick":0,"actor":0,"kind":"spawned","payload":{')
    assert lines[-1].startswith('{"result":')


def test_invariants_hold_every_tick():
    for bots, map_ref in (
        (("ghazu_spec", "wanderer"), "minefield"),
        (("ghazu_corpus", "wanderer"), "duel"),
        (("wanderer", "wanderer"), "minefield"),
    ):
        auditor = Auditor()
        result, _ = run_match(config(*bots, map_ref=map_ref, seed=3), on_tick=auditor)
        assert auditor.ticks == result.ticks


def test_one_team_is_rejected():
    cfg = MatchConfig(map="duel", bots=(BotEntry("idle", "A"), BotEntry("wanderer", "A")))
    with pytest.raises(MatchSetupError):
        run_match(cfg)


def test_bad_script_fails_before_simulation(tmp_path):
    bad = tmp_path / "bad.cb"
    bad.write_text("name BAD\nmove sideways\n", encoding="utf-8")
    with pytest.raises(ScriptLoadError) as exc:
        run_match(config(str(bad), "idle"))
    assert exc.value.diagnostics[0].code == "syntax-error"


def test_missing_map_and_bot():
    with pytest.raises(MatchSetupError):
        run_match(config("idle", "idle", map_ref="no/such.map"))
    with pytest.raises(MatchSetupError):
        run_match(config("no/such.cb", "idle"))


def test_overrides_and_max_ticks():
    cfg = config("idle", "idle", overrides={"missile_damage": "45"}, max_ticks=10)
    rules = cfg.effective_rules()
    assert rules.missile_damage == 45
    assert rules.max_ticks == 10
    assert rules.seed == 42
    result, _ = run_match(cfg)
    assert (result.outcome.reason, result.winner, result.ticks) == ("tick_limit", None, 10)


def test_bot_entry_parsing():
    assert BotEntry.parse("bots/ghazu.cb:red", "A") == BotEntry("bots/ghazu.cb", "red")
    assert BotEntry.parse("idle", "B") == BotEntry("idle", "B")
    assert BotEntry("bots/ghazu.cb", "A").label == "ghazu"
    assert BotEntry("wanderer", "A").label == "wanderer"


def test_suicide_rule_in_a_world():
    w = world_of(["..2..", "..1..", "....."], ("ghazu_spec", "A"), (IDLE, "B"))
    me = w.cybugs[0]
    me.vm.damage = 96
    me.vm.scan_reg = ScanResult(EntityKind.ENEMY, 1)
    events = tick(w)
    assert [e.kind for e in events if e.actor == 0][0] == "self_destructed"
    hit = next(e for e in events if e.kind == "hit" and e.actor == 1)
    assert hit.payload["amount"] == RuleConfig().selfdestruct_damage
    assert not me.alive


def test_suicide_rule_scans_first_when_register_is_empty():
    w = world_of(["..2..", "..1..", "....."], ("ghazu_spec", "A"), (IDLE, "B"))
    w.cybugs[0].vm.damage = 96
    first = [e.kind for e in tick(w) if e.actor == 0]
    assert first == ["scanned"]
    second = [e.kind for e in tick(w) if e.actor == 0]
    assert second[0] == "self_destructed"


def test_play_with_programs():
    lineup = [(builtin_bot("ghazu_spec"), "A"), (builtin_bot("idle"), "B")]
    from cybugwar.maps import builtin_map_text

    result, _ = play(builtin_map_text("duel"), lineup, RuleConfig(seed=42))
    assert result.winner == "A"
    with pytest.raises(MatchSetupError):
        build_world(builtin_map_text("duel"), lineup[:1], RuleConfig())


@pytest.mark.slow
def test_determinism_ten_runs():
    digests = {run_match(config("ghazu_spec", "wanderer", map_ref="minefield"))[0].digest for _ in range(10)}
    assert len(digests) == 1


@pytest.mark.slow
def test_seed_sensitivity_hundred_seeds():
    digests = {run_match(config("ghazu_spec", "wanderer", map_ref="minefield", seed=s))[0].digest for s in range(100)}
    assert len(digests) >= 90


@pytest.mark.slow
def test_ghazu_spec_vs_idle_hundred_seeds():
    wins = 0
    for seed in range(100):
        auditor = Auditor()
        result, data = run_match(config("ghazu_spec", "idle", seed=seed), on_tick=auditor)
        if result.winner != "A" or result.outcome.reason != "team_eliminated":
            continue
        wins += 1
        events, _ = replay.decode(data.decode("utf-8"))
        seen = first_tick(events, 0, lambda e: e.kind == "scanned" and e.payload["found"] == "enemy")
        shot = first_tick(events, 0, lambda e: e.kind in ("fired", "discharged"))
        assert seen is not None and shot is not None and shot - seen <= 5
    assert wins >= 95


@pytest.mark.slow
def test_eight_bot_match_on_32x32_is_fast():
    rows = ["#" * 32] + ["#" + "." * 30 + "#" for _ in range(30)] + ["#" * 32]
    spots = [(4, 4), (27, 4), (4, 27), (27, 27), (15, 4), (15, 27), (4, 15), (27, 15)]
    grid = [list(r) for r in rows]
    for digit, (x, y) in enumerate(spots, start=1):
        grid[y][x] = str(digit)
    map_text = "\n".join("".join(r) for r in grid)
    lineup = [(builtin_bot("wanderer"), "AB"[i % 2]) for i in range(8)]
    start = time.perf_counter()
    result, _ = play(map_text, lineup, RuleConfig(seed=1, max_ticks=1000))
    elapsed = time.perf_counter() - start
    assert result.ticks == 1000
    assert elapsed < 1.0


@pytest.mark.slow
def test_ten_bot_ten_round_tournament_is_fast():
    bots = [BUILTIN_BOTS[i % len(BUILTIN_BOTS)] for i in range(10)]
    start = time.perf_counter()
    standings = run_tournament(bots, "duel", 10, 1)
    elapsed = time.perf_counter() - start
    assert len(standings.matches) == 45 * 10
    assert elapsed < 30.0
