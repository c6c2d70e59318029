"""Simulated world: room geometry, station placement, per-slice traffic, random-walk mobility."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, replace
from typing import List, Optional, Tuple

SLICES = ("A", "B", "C")

# Per-station constant-bit-rate draw ranges (bit/s).
OFFERED_RATE_RANGES_BPS = {
    "A": (80e6, 100e6),
    "B": (30e3, 50e3),
    "C": (20e6, 40e6),
}

# Sensors stay put; the other slices walk.
MOBILE_SLICES = ("A", "C")
SPEED_RANGE_MPS = (2.0, 4.0)

SHADOWING_SIGMA_DB = 4.0

PAYLOAD_BYTES = 1472
PAYLOAD_BITS = PAYLOAD_BYTES * 8

SETTING_NAMES = ("2-100-6", "4-100-4", "6-100-2")


@dataclass(frozen=True)
class ScenarioParams:
    """Experiment geometry and timing; defaults match the reference setup."""

    n_sta_a: int
    n_sta_b: int
    n_sta_c: int
    room_x_m: float = 20.0
    room_y_m: float = 10.0
    station_height_m: float = 1.5
    ap_position: Tuple[float, float, float] = (10.0, 5.0, 3.0)
    sim_time_s: float = 15.0
    control_interval_s: float = 1.0

    def __post_init__(self):
        if min(self.n_sta_a, self.n_sta_b, self.n_sta_c) < 0:
            raise ValueError("station counts must be non-negative")
        if self.n_sta_a + self.n_sta_b + self.n_sta_c == 0:
            raise ValueError("at least one station required")
        if self.control_interval_s <= 0:
            raise ValueError("control interval must be positive")
        intervals = self.sim_time_s / self.control_interval_s
        if self.sim_time_s <= 0 or abs(intervals - round(intervals)) > 1e-9:
            raise ValueError("sim time must be a positive multiple of the control interval")

    @property
    def n_intervals(self) -> int:
        return round(self.sim_time_s / self.control_interval_s)


@dataclass
class Station:
    """One uplink flow: fixed traffic and shadowing, position mutable under mobility."""

    station_id: int
    slice_name: str
    x: float
    y: float
    offered_bps: float
    shadowing_db: float
    phase_ns: int
    height_m: float

    @property
    def position(self) -> Tuple[float, float, float]:
        return (self.x, self.y, self.height_m)

    @property
    def arrival_gap_ns(self) -> float:
        """Inter-packet gap of the constant-bit-rate source, in ns (inf when idle)."""
        if self.offered_bps <= 0:
            return math.inf
        return PAYLOAD_BITS * 1e9 / self.offered_bps

    def arrival_time_ns(self, index: int) -> int:
        return self.phase_ns + round(index * self.arrival_gap_ns)

    def arrivals_up_to(self, t_ns: int) -> int:
        """Number of packets generated at times <= t_ns."""
        if self.offered_bps <= 0 or t_ns < self.phase_ns:
            return 0
        count = int((t_ns - self.phase_ns) / self.arrival_gap_ns) + 1
        while self.arrival_time_ns(count) <= t_ns:  # guard rounding of the estimate
            count += 1
        while count > 0 and self.arrival_time_ns(count - 1) > t_ns:
            count -= 1
        return count


@dataclass
class Scenario:
    params: ScenarioParams
    seed: int
    stations: List[Station]
    setting: str = ""

    def slice_stations(self, slice_name: str) -> List[Station]:
        return [s for s in self.stations if s.slice_name == slice_name]

    def slice_demand_bps(self, slice_name: str) -> float:
        return sum(s.offered_bps for s in self.stations if s.slice_name == slice_name)


def parse_setting(setting: str) -> Tuple[int, int, int]:
    """Parse an 'nA-nB-nC' station-count triple."""
    parts = setting.split("-")
    try:
        counts = tuple(int(p) for p in parts)
    except ValueError:
        counts = ()
    if len(counts) != 3 or any(c < 0 for c in counts) or sum(counts) == 0:
        raise ValueError(f"setting must look like '4-100-4', got {setting!r}")
    return counts  # type: ignore[return-value]


def rng_stream(seed: int, name: str) -> random.Random:
    """Independent named generator so scenario, MAC, and mobility draws never interleave."""
    return random.Random(f"{seed}:{name}")


def build_scenario(setting: str, seed: int,
                   params: Optional[ScenarioParams] = None) -> Scenario:
    """Draw stations (position, rate, shadowing, traffic phase) for one experiment."""
    counts = parse_setting(setting)
    if params is None:
        params = ScenarioParams(*counts)
    else:
        params = replace(params, n_sta_a=counts[0], n_sta_b=counts[1], n_sta_c=counts[2])
    rng = rng_stream(seed, "scenario")
    stations: List[Station] = []
    sid = 0
    for slice_name, count in zip(SLICES, counts):
        lo, hi = OFFERED_RATE_RANGES_BPS[slice_name]
        for _ in range(count):
            x = rng.uniform(0.0, params.room_x_m)
            y = rng.uniform(0.0, params.room_y_m)
            offered = rng.uniform(lo, hi)
            shadowing = rng.gauss(0.0, SHADOWING_SIGMA_DB)
            gap_ns = PAYLOAD_BITS * 1e9 / offered
            phase_ns = int(rng.random() * gap_ns)
            stations.append(Station(sid, slice_name, x, y, offered, shadowing,
                                    phase_ns, params.station_height_m))
            sid += 1
    return Scenario(params, seed, stations, setting=setting)


def _reflect(value: float, limit: float) -> float:
    """Fold a coordinate back into [0, limit] by specular wall reflection."""
    period = 2.0 * limit
    value = math.fmod(value, period)
    if value < 0.0:
        value += period
    return value if value <= limit else period - value


def advance_mobility(scenario: Scenario, rng: random.Random,
                     dt_s: float = 1.0) -> None:
    """Redraw heading and speed for every mobile station and move it for dt seconds."""
    room_x, room_y = scenario.params.room_x_m, scenario.params.room_y_m
    for st in scenario.stations:
        if st.slice_name not in MOBILE_SLICES:
            continue
        heading = rng.uniform(0.0, 2.0 * math.pi)
        speed = rng.uniform(*SPEED_RANGE_MPS)
        st.x = _reflect(st.x + speed * math.cos(heading) * dt_s, room_x)
        st.y = _reflect(st.y + speed * math.sin(heading) * dt_s, room_y)
