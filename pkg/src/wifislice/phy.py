"""Radio layer: 5 GHz channel plan, HE single-stream rates, error and propagation models.

Everything in this module is a pure function of its arguments so the MAC
engine and the slice controllers can share it freely.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence, Tuple

CHANNEL_WIDTHS_MHZ = (20, 40, 80, 160)
GUARD_INTERVALS_NS = (800, 1600, 3200)

# Data subcarriers per channel width, single spatial stream.
DATA_SUBCARRIERS = {20: 234, 40: 468, 80: 980, 160: 1960}

# Payload bits carried per data subcarrier per OFDM symbol (modulation x coding).
MCS_BITS_PER_SUBCARRIER = (0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 4.5, 5.0, 6.0, 6.667, 7.5, 8.333)

# SNR (dB) at which a packet decodes with error probability 0.001.
MCS_MIN_SNR_DB = (2.0, 5.0, 9.0, 11.0, 15.0, 18.0, 20.0, 25.0, 29.0, 31.0, 34.0, 37.0)

OFDM_SYMBOL_BASE_US = 12.8

# Logistic packet-error curve: Pe = 0.5 at minSnr - 3 dB, Pe = 0.001 at minSnr.
PER_MIDPOINT_OFFSET_DB = 3.0
PER_SLOPE = math.log(999.0) / 3.0

# Log-distance indoor propagation, exponent 3, 1 m reference.
PATH_LOSS_REF_DB = 46.4
PATH_LOSS_EXPONENT = 3.0
PATH_LOSS_MIN_DISTANCE_M = 1.0

THERMAL_NOISE_DBM_PER_HZ = -174.0
NOISE_FIGURE_DB = 7.0

TX_POWER_MIN_DBM = -20.0
TX_POWER_MAX_DBM = 20.0

# ETSI 5 GHz allocation; centre frequency is 5000 + 5 * number MHz.
CHANNEL_PLAN = {
    20: (36, 40, 44, 48, 52, 56, 60, 64,
         100, 104, 108, 112, 116, 120, 124, 128, 132, 136, 140,
         149, 153, 157, 161, 165),
    40: (38, 46, 54, 62, 102, 110, 118, 126, 134, 151, 159),
    80: (42, 58, 106, 122, 138, 155),
    160: (50, 114),
}


@dataclass(frozen=True)
class McsEntry:
    """One row of the single-stream HE rate ladder."""

    index: int
    bits_per_subcarrier: float
    min_snr_db: float


MCS_TABLE: Tuple[McsEntry, ...] = tuple(
    McsEntry(i, MCS_BITS_PER_SUBCARRIER[i], MCS_MIN_SNR_DB[i]) for i in range(12)
)


@dataclass(frozen=True)
class ChannelSpec:
    """A (number, width) pair from the 5 GHz plan."""

    number: int
    width_mhz: int

    def __post_init__(self):
        if self.width_mhz not in CHANNEL_PLAN:
            raise ValueError(f"unknown channel width {self.width_mhz} MHz")
        if self.number not in CHANNEL_PLAN[self.width_mhz]:
            raise ValueError(f"channel {self.number} is not a {self.width_mhz} MHz channel")

    @property
    def center_freq_mhz(self) -> float:
        return 5000.0 + 5.0 * self.number

    @property
    def span_mhz(self) -> Tuple[float, float]:
        half = self.width_mhz / 2.0
        c = self.center_freq_mhz
        return (c - half, c + half)


@dataclass(frozen=True)
class PhyParams:
    """Radio parameters shared by every station of a slice."""

    mcs: int
    gi_ns: int
    tx_power_dbm: float

    def __post_init__(self):
        if not 0 <= self.mcs <= 11:
            raise ValueError(f"MCS {self.mcs} outside 0..11")
        if self.gi_ns not in GUARD_INTERVALS_NS:
            raise ValueError(f"guard interval {self.gi_ns} ns not in {GUARD_INTERVALS_NS}")
        if not TX_POWER_MIN_DBM <= self.tx_power_dbm <= TX_POWER_MAX_DBM:
            raise ValueError(f"tx power {self.tx_power_dbm} dBm outside "
                             f"[{TX_POWER_MIN_DBM}, {TX_POWER_MAX_DBM}]")


def data_rate(width_mhz: int, mcs: int, gi_ns: int) -> float:
    """PHY data rate in bit/s for one spatial stream."""
    if width_mhz not in DATA_SUBCARRIERS:
        raise ValueError(f"unknown channel width {width_mhz} MHz")
    if not 0 <= mcs <= 11:
        raise ValueError(f"MCS {mcs} outside 0..11")
    if gi_ns not in GUARD_INTERVALS_NS:
        raise ValueError(f"guard interval {gi_ns} ns not in {GUARD_INTERVALS_NS}")
    symbol_s = OFDM_SYMBOL_BASE_US * 1e-6 + gi_ns * 1e-9
    return DATA_SUBCARRIERS[width_mhz] * MCS_BITS_PER_SUBCARRIER[mcs] / symbol_s


def packet_error_rate(snr_db: float, mcs: int) -> float:
    """Probability that a data packet at `mcs` is lost at the given SNR."""
    if not 0 <= mcs <= 11:
        raise ValueError(f"MCS {mcs} outside 0..11")
    midpoint = MCS_MIN_SNR_DB[mcs] - PER_MIDPOINT_OFFSET_DB
    x = PER_SLOPE * (snr_db - midpoint)
    if x > 700.0:
        return 0.0
    if x < -700.0:
        return 1.0
    return 1.0 / (1.0 + math.exp(x))


def path_loss_db(tx_pos: Sequence[float], rx_pos: Sequence[float],
                 shadowing_db: float = 0.0) -> float:
    """Log-distance path loss between two 3-D points, plus a fixed shadowing term."""
    d = math.dist(tx_pos, rx_pos)
    d = max(d, PATH_LOSS_MIN_DISTANCE_M)
    return PATH_LOSS_REF_DB + 10.0 * PATH_LOSS_EXPONENT * math.log10(d) + shadowing_db


def noise_power_dbm(width_mhz: int) -> float:
    """Receiver noise floor over a channel of the given width."""
    if width_mhz not in DATA_SUBCARRIERS:
        raise ValueError(f"unknown channel width {width_mhz} MHz")
    return THERMAL_NOISE_DBM_PER_HZ + 10.0 * math.log10(width_mhz * 1e6) + NOISE_FIGURE_DB


def channel_overlap(a: ChannelSpec, b: ChannelSpec) -> float:
    """Fraction of channel `a` covered by channel `b` (0.0 .. 1.0)."""
    lo_a, hi_a = a.span_mhz
    lo_b, hi_b = b.span_mhz
    inter = min(hi_a, hi_b) - max(lo_a, lo_b)
    if inter <= 0.0:
        return 0.0
    return inter / a.width_mhz


def sinr_db(rx_power_dbm: float, width_mhz: int,
            interferers: Iterable[Tuple[float, float]] = ()) -> float:
    """SINR at the receiver.

    `interferers` holds (power dBm, overlap fraction) pairs; each contributes
    its linear power weighted by the overlap with the receiving channel.
    """
    noise_mw = 10.0 ** (noise_power_dbm(width_mhz) / 10.0)
    denom_mw = noise_mw
    for power_dbm, frac in interferers:
        if frac > 0.0:
            denom_mw += frac * 10.0 ** (power_dbm / 10.0)
    return rx_power_dbm - 10.0 * math.log10(denom_mw)


def channel_plan_lowest(width_mhz: int) -> ChannelSpec:
    """Lowest-frequency channel of the given width."""
    if width_mhz not in CHANNEL_PLAN:
        raise ValueError(f"unknown channel width {width_mhz} MHz")
    return ChannelSpec(min(CHANNEL_PLAN[width_mhz]), width_mhz)


def channel_plan_highest(width_mhz: int) -> ChannelSpec:
    """Highest-frequency channel of the given width."""
    if width_mhz not in CHANNEL_PLAN:
        raise ValueError(f"unknown channel width {width_mhz} MHz")
    return ChannelSpec(max(CHANNEL_PLAN[width_mhz]), width_mhz)
