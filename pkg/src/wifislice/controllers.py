"""Per-slice radio controllers: single-channel, static demand-sized, and KPI-driven dynamic.

All controllers are pure functions of their inputs (demands, measurements,
last-interval KPIs, prior controller state), which keeps them replayable in
isolation from the event engine.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from .phy import (
    CHANNEL_WIDTHS_MHZ,
    MCS_MIN_SNR_DB,
    ChannelSpec,
    channel_plan_highest,
    channel_plan_lowest,
    data_rate,
    noise_power_dbm,
)

# Flow-level error budget a slice is expected to stay under.
SLA_PE = 0.02
# Relaxed per-station budget for the sensor slice, required of 90 % of stations.
SLICE_B_PE = 0.2
SLICE_B_PE_FRACTION = 0.9

# The sensor slice always sits on the same narrow mid-band channel.
SLICE_B_WIDTH = 20
SLICE_B_CHANNEL_NUMBER = 100

MCS_ADD_MIN, MCS_ADD_MAX = 1, 4
TX_ADD_MIN, TX_ADD_MAX = 1, 6

TX_POWER_CAP_DBM = 20.0
TX_POWER_FLOOR_DBM = -20.0


@dataclass(frozen=True)
class SliceConfig:
    """Radio configuration applied to every station of one slice."""

    width_mhz: int
    channel: int
    gi_ns: int
    mcs: int
    tx_power_dbm: float

    def __post_init__(self):
        ChannelSpec(self.channel, self.width_mhz)  # validates the pair
        if not 0 <= self.mcs <= 11:
            raise ValueError(f"MCS {self.mcs} outside 0..11")
        if not TX_POWER_FLOOR_DBM <= self.tx_power_dbm <= TX_POWER_CAP_DBM:
            raise ValueError(f"tx power {self.tx_power_dbm} dBm outside "
                             f"[{TX_POWER_FLOOR_DBM}, {TX_POWER_CAP_DBM}]")

    @property
    def spec(self) -> ChannelSpec:
        return ChannelSpec(self.channel, self.width_mhz)


@dataclass
class SliceAState:
    """Two-state width multiplier of the throughput slice (1 = sized, 2 = doubled)."""

    width_multiplier: int = 1


@dataclass
class SliceBMargins:
    """Adaptive margins of the sensor slice power/MCS controller."""

    mcs_add: int = 1
    tx_power_add: int = 3


def cb_wmin(required_bps: float, mcs: int, gi_ns: int) -> Tuple[int, bool]:
    """Smallest channel width whose rate covers `required_bps`.

    Returns (width, saturated); saturated means even 160 MHz falls short.
    """
    for width in CHANNEL_WIDTHS_MHZ:
        if data_rate(width, mcs, gi_ns) >= required_bps:
            return width, False
    return 160, True


def mcs_min(required_bps: float, width_mhz: int, gi_ns: int) -> Tuple[int, bool]:
    """Smallest MCS whose rate covers `required_bps` at the given width.

    Returns (mcs, saturated); saturated means even MCS 11 falls short.
    """
    for mcs in range(12):
        if data_rate(width_mhz, mcs, gi_ns) >= required_bps:
            return mcs, False
    return 11, True


def mcs_max(rx_power_dbm: float, width_mhz: int) -> int:
    """Largest MCS still decodable (Pe <= 0.001) at the given receive power.

    Falls back to MCS 0 when even that is out of budget.
    """
    snr_db = rx_power_dbm - noise_power_dbm(width_mhz)
    best = 0
    for mcs in range(12):
        if snr_db >= MCS_MIN_SNR_DB[mcs]:
            best = mcs
    return best


def p_rx_min(mcs: int, width_mhz: int) -> float:
    """Receive power (dBm) at which `mcs` just meets the 0.001 error budget."""
    if not 0 <= mcs <= 11:
        raise ValueError(f"MCS {mcs} outside 0..11")
    return noise_power_dbm(width_mhz) + MCS_MIN_SNR_DB[mcs]


# The link-budget MCS cap is quoted against the 20 MHz reference noise floor,
# the same convention receiver sensitivity figures use; the width chosen from
# it then only moves the rate floor (the mcs_min side of the branch).
REFERENCE_WIDTH_MHZ = 20


def _weakest_usable_mcs(rx_power_min_dbm: float) -> int:
    return mcs_max(rx_power_min_dbm, REFERENCE_WIDTH_MHZ)


def single_channel_config() -> SliceConfig:
    """One wide shared channel for everybody; no slicing."""
    return SliceConfig(width_mhz=160, channel=50, gi_ns=1600, mcs=5, tx_power_dbm=20.0)


@dataclass
class StaticAllocation:
    configs: dict
    saturated: dict
    warnings: List[str]


def static_allocate(data_rate_a_bps: float, data_rate_b_bps: float,
                    data_rate_c_bps: float) -> StaticAllocation:
    """Demand-sized fixed allocation: A lowest in band, B on its reserved channel, C highest."""
    width_a, sat_a = cb_wmin(data_rate_a_bps, 5, 1600)
    width_c, sat_c = cb_wmin(data_rate_c_bps, 5, 1600)
    configs = {
        "A": SliceConfig(width_a, channel_plan_lowest(width_a).number, 1600, 5, 20.0),
        "B": SliceConfig(SLICE_B_WIDTH, SLICE_B_CHANNEL_NUMBER, 1600, 5, 20.0),
        "C": SliceConfig(width_c, channel_plan_highest(width_c).number, 1600, 5, 20.0),
    }
    saturated = {"A": sat_a, "B": False, "C": sat_c}
    warnings = []
    names = sorted(configs)
    for i, a in enumerate(names):
        for b in names[i + 1:]:
            lo_a, hi_a = configs[a].spec.span_mhz
            lo_b, hi_b = configs[b].spec.span_mhz
            if min(hi_a, hi_b) > max(lo_a, lo_b):
                warnings.append(f"slices {a} and {b} overlap in frequency "
                                f"({configs[a].channel}/{configs[a].width_mhz} MHz vs "
                                f"{configs[b].channel}/{configs[b].width_mhz} MHz)")
    return StaticAllocation(configs, saturated, warnings)


def _slice_a_config(data_rate_bps: float, rx_power_min_dbm: float,
                    multiplier: int) -> Tuple[SliceConfig, bool]:
    usable = _weakest_usable_mcs(rx_power_min_dbm)
    width, saturated = cb_wmin(data_rate_bps, usable, 800)
    width = min(160, width * multiplier)
    needed, _ = mcs_min(data_rate_bps, width, 800)
    # Back off one notch from the bare minimum when the link budget allows it;
    # otherwise run at the best the weakest station can decode.
    mcs = needed + 1 if usable > needed else usable
    cfg = SliceConfig(width, channel_plan_lowest(width).number, 800, mcs, 20.0)
    return cfg, saturated


def dynamic_init_a(data_rate_bps: float,
                   rx_power_min_dbm: float) -> Tuple[SliceConfig, SliceAState, bool]:
    state = SliceAState(width_multiplier=1)
    cfg, saturated = _slice_a_config(data_rate_bps, rx_power_min_dbm, state.width_multiplier)
    return cfg, state, saturated


def dynamic_update_a(data_rate_bps: float, rx_power_min_dbm: float,
                     flow_pes: Sequence[float], agg_pe: float,
                     prev_agg_pe: Optional[float],
                     state: SliceAState) -> Tuple[SliceConfig, SliceAState, bool]:
    """Width doubles while the SLA is missed and errors keep rising; halves back once clean."""
    sla_ok = all(pe <= SLA_PE for pe in flow_pes)
    worsened = prev_agg_pe is not None and agg_pe > prev_agg_pe
    improved = prev_agg_pe is not None and agg_pe < prev_agg_pe
    multiplier = state.width_multiplier
    if multiplier == 1 and not sla_ok and worsened:
        multiplier = 2
    elif multiplier == 2 and sla_ok and improved:
        multiplier = 1
    new_state = SliceAState(width_multiplier=multiplier)
    cfg, saturated = _slice_a_config(data_rate_bps, rx_power_min_dbm, multiplier)
    return cfg, new_state, saturated


def _slice_b_config(data_rate_bps: float, losses_db: Sequence[float],
                    margins: SliceBMargins) -> SliceConfig:
    base_mcs, _ = mcs_min(data_rate_bps, SLICE_B_WIDTH, 1600)
    mcs = min(11, base_mcs + margins.mcs_add)
    ordered = sorted(losses_db)
    # Loss of the station at the 90th percentile (0-based index).
    pivot = ordered[(9 * len(ordered)) // 10]
    tx = pivot + p_rx_min(mcs, SLICE_B_WIDTH) + margins.tx_power_add
    tx = min(TX_POWER_CAP_DBM, max(TX_POWER_FLOOR_DBM, tx))
    return SliceConfig(SLICE_B_WIDTH, SLICE_B_CHANNEL_NUMBER, 1600, mcs, tx)


def dynamic_init_b(data_rate_bps: float,
                   losses_db: Sequence[float]) -> Tuple[SliceConfig, SliceBMargins]:
    margins = SliceBMargins()
    return _slice_b_config(data_rate_bps, losses_db, margins), margins


def dynamic_update_b(data_rate_bps: float, losses_db: Sequence[float],
                     flow_pes: Sequence[float], agg_pe: float,
                     prev_agg_pe: Optional[float],
                     margins: SliceBMargins) -> Tuple[SliceConfig, SliceBMargins]:
    """Raise power (then MCS) while the sensor SLA is missed; walk both back once met."""
    ok_count = sum(1 for pe in flow_pes if pe <= SLICE_B_PE)
    sla_ok = ok_count >= SLICE_B_PE_FRACTION * len(flow_pes)
    worsened = prev_agg_pe is not None and agg_pe > prev_agg_pe
    improved = prev_agg_pe is not None and agg_pe < prev_agg_pe
    mcs_add, tx_add = margins.mcs_add, margins.tx_power_add
    if not sla_ok and worsened:
        if tx_add < TX_ADD_MAX:
            tx_add += 1
        elif mcs_add < MCS_ADD_MAX:
            mcs_add += 1
            tx_add = 3
    elif sla_ok and improved:
        if tx_add > TX_ADD_MIN:
            tx_add -= 1
        elif mcs_add > MCS_ADD_MIN:
            mcs_add -= 1
            tx_add = 3
    new_margins = SliceBMargins(mcs_add=mcs_add, tx_power_add=tx_add)
    return _slice_b_config(data_rate_bps, losses_db, new_margins), new_margins


def dynamic_update_c(data_rate_bps: float,
                     rx_power_min_dbm: float) -> Tuple[SliceConfig, bool]:
    """Stateless latency-slice fit, recomputed every interval from the weakest station."""
    usable = _weakest_usable_mcs(rx_power_min_dbm)
    width, saturated = cb_wmin(data_rate_bps, usable, 800)
    needed, _ = mcs_min(data_rate_bps, width, 800)
    # Run as fast as the weakest station allows; failing that, one notch above
    # the bare minimum to keep airtime short.
    mcs = usable if usable > needed else min(11, needed + 1)
    cfg = SliceConfig(width, channel_plan_highest(width).number, 800, mcs, 20.0)
    return cfg, saturated
