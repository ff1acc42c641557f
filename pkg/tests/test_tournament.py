import pytest

from cybugwar.config import RuleConfig
from cybugwar.errors import MatchSetupError, TournamentError
from cybugwar.tournament import run_tournament, schedule, unique_names

SHORT = RuleConfig(max_ticks=150)


def test_schedule_counts_and_seeds():
    pairings = schedule(["a", "b", "c"], 2, 10)
    assert len(pairings) == 6
    assert [(p.a, p.b, p.round, p.seed) for p in pairings[:2]] == [("a", "b", 0, 10), ("a", "b", 1, 11)]
    assert [p.swapped for p in pairings[:2]] == [False, True]
    assert [p.index for p in pairings] == list(range(6))


def test_unique_names():
    assert unique_names(["idle", "idle", "x"], lambda s: s) == ["idle", "idle#2", "x"]


def test_three_bots_two_rounds():
    st = run_tournament(["ghazu_spec", "idle", "wanderer"], "duel", 2, 1, SHORT)
    assert len(st.matches) == 6
    total = sum(r.played for r in st.table.values())
    assert total == 2 * len(st.matches)
    for r in st.table.values():
        assert r.played == 4
    wins = sum(r.wins for r in st.table.values())
    losses = sum(r.losses for r in st.table.values())
    assert wins == losses


def test_idle_vs_idle_draws():
    st = run_tournament(["idle", "idle"], "duel", 3, 0, RuleConfig(max_ticks=20))
    assert [m["reason"] for m in st.matches] == ["tick_limit"] * 3
    assert all(r.draws == 3 and r.points == 3 for r in st.table.values())


def test_repeatable():
    a = run_tournament(["ghazu_spec", "idle", "wanderer"], "minefield", 2, 5, SHORT)
    b = run_tournament(["ghazu_spec", "idle", "wanderer"], "minefield", 2, 5, SHORT)
    assert a.to_dict() == b.to_dict()


def test_parallel_equals_sequential():
    bots = ["ghazu_spec", "idle", "wanderer", "ghazu_corpus"]
    seq = run_tournament(bots, "minefield", 2, 9, SHORT)
    par = run_tournament(bots, "minefield", 2, 9, SHORT, workers=4)
    assert par.to_dict() == seq.to_dict()


def test_bad_bot_is_named(tmp_path):
    bad = tmp_path / "broken.cb"
    bad.write_text("fly away\n", encoding="utf-8")
    with pytest.raises(TournamentError) as exc:
        run_tournament(["idle", str(bad)], "duel", 1, 0, SHORT)
    assert exc.value.bot == str(bad)


def test_needs_two_bots():
    with pytest.raises(MatchSetupError):
        run_tournament(["idle"], "duel", 1, 0)


def test_report_shape():
    st = run_tournament(["ghazu_spec", "idle"], "duel", 1, 42, SHORT)
    d = st.to_dict()
    assert set(d) == {"bots", "matches", "table"}
    assert d["table"][0]["bot"] == "ghazu_spec"
    assert d["matches"][0]["winner"] == "ghazu_spec"
