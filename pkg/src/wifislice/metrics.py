"""Flow KPIs: packet error probability, mean latency, throughput, bandwidth use, efficiency."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .scenario import PAYLOAD_BITS


@dataclass
class FlowRecord:
    """Counters of one uplink flow; tx counts every generated packet, delivered or not."""

    flow_id: int
    slice_name: str
    tx_packets: int = 0
    rx_packets: int = 0
    delay_sum_ns: int = 0
    # Loss breakdown, for conservation checks: queue overflow, contention
    # give-up, channel errors, and packets still queued or in flight at the end.
    dropped_overflow: int = 0
    dropped_contention: int = 0
    dropped_channel: int = 0
    unfinished: int = 0

    @property
    def dropped_packets(self) -> int:
        return (self.dropped_overflow + self.dropped_contention
                + self.dropped_channel + self.unfinished)


def packet_error_probability(tx_packets: int, rx_packets: int) -> float:
    """Fraction of generated packets never delivered; 0 for an empty flow."""
    if tx_packets == 0:
        return 0.0
    return (tx_packets - rx_packets) / tx_packets


def mean_latency_s(delay_sum_ns: int, rx_packets: int) -> Optional[float]:
    """Mean generation-to-delivery delay; None when nothing was delivered."""
    if rx_packets == 0:
        return None
    return delay_sum_ns / rx_packets / 1e9


def total_throughput_bps(rx_packets: Sequence[int], sim_time_s: float) -> float:
    return sum(rx_packets) * PAYLOAD_BITS / sim_time_s


def used_bandwidth_mhz(strategy: str,
                       interval_width_sums_mhz: Sequence[float]) -> float:
    """Bandwidth the strategy occupies: the full 160 MHz channel when unsliced,
    the per-slice sum when static, the interval-mean of per-slice sums when dynamic."""
    if strategy == "single":
        return 160.0
    if strategy == "static":
        return float(interval_width_sums_mhz[0])
    if strategy == "dynamic":
        return sum(interval_width_sums_mhz) / len(interval_width_sums_mhz)
    raise ValueError(f"unknown strategy {strategy!r}")


def spectrum_efficiency(throughput_bps: float, used_bandwidth_mhz: float) -> float:
    return throughput_bps / (used_bandwidth_mhz * 1e6)


def aggregate_error_probability(flows: Sequence[FlowRecord]) -> float:
    """Packet-pooled error probability across flows."""
    tx = sum(f.tx_packets for f in flows)
    rx = sum(f.rx_packets for f in flows)
    return packet_error_probability(tx, rx)
