from cybugwar.arena import tick
from cybugwar.audit import check_world, snapshot
from cybugwar.world import Terrain
from support import IDLE, world_of

ROWS = ["F....", ".1.#.", ".....", ".*.2.", "....."]


def fresh():
    return world_of(ROWS, (IDLE, "A"), (IDLE, "B"))


def test_fresh_world_is_healthy():
    w = fresh()
    assert check_world(w, snapshot(w)) == []


def test_overlap_and_terrain():
    w = fresh()
    w.cybugs[1].position = w.cybugs[0].position
    assert any("share" in p for p in check_world(w))

    w = fresh()
    w.cybugs[0].position = (3, 1)
    assert any("stands on BARRIER" in p for p in check_world(w))


def test_fuel_and_damage_ranges():
    w = fresh()
    w.cybugs[0].vm.fuel = -1
    w.cybugs[1].vm.damage = 120
    problems = check_world(w)
    assert any("fuel -1" in p for p in problems)
    assert any("damage 120" in p for p in problems)


def test_flag_that_vanishes_is_reported():
    w = fresh()
    w.set_terrain((0, 0), Terrain.EMPTY)
    assert any(p.startswith("flag conservation") for p in check_world(w))


def test_monotonic_checks_against_previous_tick():
    w = fresh()
    w.cybugs[0].vm.damage = 40
    before = snapshot(w)
    w.cybugs[0].vm.damage = 10
    w.set_terrain((2, 2), Terrain.MINE)
    problems = check_world(w, before)
    assert any("damage decreased 40 -> 10" in p for p in problems)
    assert any("mines appeared at [(2, 2)]" in p for p in problems)


def test_mine_removed_without_event_is_reported():
    w = fresh()
    before = snapshot(w)
    w.set_terrain((1, 3), Terrain.EMPTY)
    assert check_world(w, before) == ["mines removed without a mine_tripped event at [(1, 3)]"]


def test_mine_removed_by_a_blast_is_paired():
    w = world_of(["2....", ".....", "..*..", "..1..", "....."], ("discharge energy\n", "A"), (IDLE, "B"))
    before = snapshot(w)
    tick(w)
    assert w.count(Terrain.MINE) == 0
    assert check_world(w, before) == []


def test_occupancy_index_out_of_step():
    w = fresh()
    w.cybugs[0].position = (0, 4)
    assert any("occupancy index" in p for p in check_world(w))
