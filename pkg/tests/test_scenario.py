"""World-model unit tests: placement draws, traffic, mobility, reproducibility."""

import math

import pytest

from wifislice.scenario import (
    MOBILE_SLICES,
    OFFERED_RATE_RANGES_BPS,
    PAYLOAD_BITS,
    ScenarioParams,
    SETTING_NAMES,
    SLICES,
    _reflect,
    advance_mobility,
    build_scenario,
    parse_setting,
    rng_stream,
)


def test_parse_setting():
    assert parse_setting("2-100-6") == (2, 100, 6)
    assert parse_setting("0-0-1") == (0, 0, 1)
    for bad in ("", "4-100", "4-100-4-1", "a-b-c", "-1-2-3", "0-0-0"):
        with pytest.raises(ValueError):
            parse_setting(bad)


def test_reference_settings_have_108_stations():
    for setting in SETTING_NAMES:
        assert sum(parse_setting(setting)) == 108


def test_scenario_params_validation():
    with pytest.raises(ValueError):
        ScenarioParams(0, 0, 0)
    with pytest.raises(ValueError):
        ScenarioParams(1, 1, 1, sim_time_s=1.5, control_interval_s=1.0)
    with pytest.raises(ValueError):
        ScenarioParams(1, 1, 1, control_interval_s=0.0)
    assert ScenarioParams(1, 1, 1, sim_time_s=15.0).n_intervals == 15


def test_station_counts_and_order():
    sc = build_scenario("2-100-6", seed=1)
    assert len(sc.stations) == 108
    assert [s.station_id for s in sc.stations] == list(range(108))
    assert len(sc.slice_stations("A")) == 2
    assert len(sc.slice_stations("B")) == 100
    assert len(sc.slice_stations("C")) == 6
    assert sc.setting == "2-100-6"


def test_draws_stay_inside_documented_ranges():
    # Over 10,000 station draws per slice, every sample must respect the
    # documented rate ranges and the room geometry.
    count = 0
    for seed in range(90):
        sc = build_scenario("112-112-112", seed=seed)
        count += len(sc.stations)
        for st in sc.stations:
            lo, hi = OFFERED_RATE_RANGES_BPS[st.slice_name]
            assert lo <= st.offered_bps <= hi
            assert 0.0 <= st.x <= 20.0
            assert 0.0 <= st.y <= 10.0
            assert st.height_m == 1.5
            assert 0 <= st.phase_ns < st.arrival_gap_ns
    assert count >= 3 * 10_000


def test_slice_demand_sums_offered_rates():
    sc = build_scenario("2-100-6", seed=3)
    for name in SLICES:
        expected = sum(s.offered_bps for s in sc.stations if s.slice_name == name)
        assert sc.slice_demand_bps(name) == expected


def test_arrival_schedule_is_cbr():
    sc = build_scenario("1-1-1", seed=5)
    horizon = 15_000_000_000
    for st in sc.stations:
        gap = PAYLOAD_BITS * 1e9 / st.offered_bps
        assert st.arrival_gap_ns == gap
        n = st.arrivals_up_to(horizon)
        # Count within one packet of horizon/gap, and consistent with the
        # individual arrival times at the fence.
        assert abs(n - horizon / gap) <= 1.0
        assert st.arrival_time_ns(n - 1) <= horizon < st.arrival_time_ns(n)
        assert st.arrival_time_ns(0) == st.phase_ns
    idle = sc.stations[0]
    idle.offered_bps = 0.0
    assert idle.arrival_gap_ns == math.inf
    assert idle.arrivals_up_to(horizon) == 0


def test_reflection_folds_into_range():
    assert _reflect(-1.0, 10.0) == pytest.approx(1.0)
    assert _reflect(12.0, 10.0) == pytest.approx(8.0)
    assert _reflect(25.0, 10.0) == pytest.approx(5.0)
    assert _reflect(7.0, 10.0) == pytest.approx(7.0)
    assert _reflect(-13.0, 10.0) == pytest.approx(7.0)


def test_mobility_moves_only_walking_slices():
    sc = build_scenario("2-100-6", seed=7)
    before = {s.station_id: (s.x, s.y) for s in sc.stations}
    rng = rng_stream(7, "mobility")
    advance_mobility(sc, rng, dt_s=1.0)
    for st in sc.stations:
        if st.slice_name in MOBILE_SLICES:
            assert (st.x, st.y) != before[st.station_id]
        else:
            assert (st.x, st.y) == before[st.station_id]


def test_mobility_respects_walls_over_a_million_steps():
    sc = build_scenario("500-0-500", seed=11)
    rng = rng_stream(11, "mobility")
    for _ in range(1000):
        advance_mobility(sc, rng, dt_s=1.0)
        for st in sc.stations:
            assert 0.0 <= st.x <= 20.0
            assert 0.0 <= st.y <= 10.0


def test_mobility_leaves_traffic_and_shadowing_alone():
    sc = build_scenario("4-100-4", seed=13)
    frozen = [(s.offered_bps, s.shadowing_db, s.phase_ns, s.height_m)
              for s in sc.stations]
    rng = rng_stream(13, "mobility")
    for _ in range(5):
        advance_mobility(sc, rng)
    assert [(s.offered_bps, s.shadowing_db, s.phase_ns, s.height_m)
            for s in sc.stations] == frozen


def test_build_scenario_is_seed_deterministic():
    a = build_scenario("4-100-4", seed=42)
    b = build_scenario("4-100-4", seed=42)
    assert a.stations == b.stations
    c = build_scenario("4-100-4", seed=43)
    assert a.stations != c.stations


def test_rng_streams_are_independent():
    assert rng_stream(1, "scenario").random() == rng_stream(1, "scenario").random()
    assert rng_stream(1, "scenario").random() != rng_stream(1, "mac").random()
    assert rng_stream(1, "scenario").random() != rng_stream(2, "scenario").random()
