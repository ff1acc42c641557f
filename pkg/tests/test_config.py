import pytest

from cybugwar.config import RuleConfig, env_seed, load_rules, read_kv_file
from cybugwar.errors import ConfigError
from cybugwar.prng import XorShift64Star


def test_defaults():
    r = RuleConfig()
    assert (r.fuel_start, r.missile_damage, r.missile_range, r.budget) == (100, 30, 8, 64)
    assert r.enemy_range == 8
    r.validate()


def test_overrides_coerce_types():
    r = RuleConfig().with_overrides({"missile-damage": "40", "shield_factor": "0.25", "max_ticks": 50})
    assert (r.missile_damage, r.shield_factor, r.max_ticks) == (40, 0.25, 50)


@pytest.mark.parametrize(
    "overrides",
    [{"warp_speed": "9"}, {"gun_damage": "lots"}, {"shield_factor": "1.5"}, {"scan_range_long": "0"}, {"fuel_start": "150"}],
)
def test_bad_overrides(overrides):
    with pytest.raises(ConfigError):
        RuleConfig().with_overrides(overrides)


def test_kv_file_and_discovery(tmp_path, monkeypatch):
    conf = tmp_path / "cybug.conf"
    conf.write_text("# rules\nmissile_damage = 35\n\nseed=7\n", encoding="utf-8")
    assert read_kv_file(conf) == {"missile_damage": "35", "seed": "7"}
    assert load_rules(conf).missile_damage == 35

    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("CYBUG_CONFIG", raising=False)
    assert load_rules().seed == 7

    monkeypatch.setenv("CYBUG_CONFIG", str(tmp_path / "missing.conf"))
    assert load_rules() == RuleConfig()


def test_missing_explicit_file(tmp_path):
    with pytest.raises(ConfigError):
        load_rules(tmp_path / "nope.conf")


def test_env_seed(monkeypatch):
    monkeypatch.delenv("CYBUG_SEED", raising=False)
    assert env_seed(3) == 3
    monkeypatch.setenv("CYBUG_SEED", "99")
    assert env_seed(3) == 99
    monkeypatch.setenv("CYBUG_SEED", "abc")
    with pytest.raises(ConfigError):
        env_seed()


def test_prng_is_deterministic_and_in_range():
    a = XorShift64Star.from_seed(42)
    b = XorShift64Star.from_seed(42)
    draws = [a.draw(4) for _ in range(1000)]
    assert draws == [b.draw(4) for _ in range(1000)]
    assert set(draws) == {1, 2, 3, 4}
    assert XorShift64Star.from_seed(0).state != 0
    assert [XorShift64Star.from_seed(1).next_u64() for _ in range(2)] != [XorShift64Star.from_seed(2).next_u64() for _ in range(2)]
    with pytest.raises(ValueError):
        a.draw(0)
