"""Event-driven CSMA/CA (DCF with RTS/CTS) per channel: contention, collisions,
burst data transfer, cross-channel interference, queues, and delivery bookkeeping.

Time is integer nanoseconds throughout; all randomness comes from one injected
generator consumed in event order, so a (scenario, seed) pair fully determines
the run.
"""

from __future__ import annotations

import heapq
import itertools
from collections import deque
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .controllers import SliceConfig
from .metrics import FlowRecord
from .phy import (
    channel_overlap,
    data_rate,
    noise_power_dbm,
    packet_error_rate,
    path_loss_db,
    sinr_db,
)
from .scenario import Scenario, Station

DIFS_NS = 34_000
SLOT_NS = 9_000
SIFS_NS = 16_000
RTS_NS = 52_000
CTS_NS = 44_000
ACK_NS = 44_000
PREAMBLE_NS = 40_000

CW_MIN = 15
CW_MAX = 1023

# 1472 B payload plus MAC framing on the air.
FRAME_BYTES = 1528
FRAME_BITS = FRAME_BYTES * 8

# A contention win transfers a burst of queued frames under one RTS/CTS/ACK
# exchange; otherwise the ~330 us of fixed per-exchange overhead caps every
# channel near 35 Mbit/s regardless of PHY rate.
MAX_BURST_PACKETS = 64
MAX_BURST_AIRTIME_NS = 6_000_000

# Below this loss probability, skip the per-frame Bernoulli draws outright.
NEGLIGIBLE_PER = 1e-9

_WAKE, _ROUND, _RESOLVE = 0, 1, 2


class _Queue:
    """FIFO of generated-packet indices, stored as index segments.

    Arrivals are implied by the station's deterministic CBR schedule, so the
    queue only records which arrival indices are waiting; drop-tail gaps split
    the index range into segments.
    """

    __slots__ = ("segments", "length")

    def __init__(self):
        self.segments: deque = deque()
        self.length = 0

    def push_range(self, start: int, end: int) -> None:
        if self.segments and self.segments[-1][1] == start:
            self.segments[-1][1] = end
        else:
            self.segments.append([start, end])
        self.length += end - start

    def pop_front(self, n: int) -> List[int]:
        out: List[int] = []
        while n > 0 and self.segments:
            seg = self.segments[0]
            take = min(n, seg[1] - seg[0])
            out.extend(range(seg[0], seg[0] + take))
            seg[0] += take
            if seg[0] == seg[1]:
                self.segments.popleft()
            n -= take
        self.length -= len(out)
        return out


class _StationState:
    __slots__ = ("station", "flow", "queue", "accounted", "cw", "backoff",
                 "contending", "medium", "wake_scheduled")

    def __init__(self, station: Station):
        self.station = station
        self.flow = FlowRecord(station.station_id, station.slice_name)
        self.queue = _Queue()
        self.accounted = 0  # arrival indices below this are classified
        self.cw = CW_MIN
        self.backoff = -1  # remaining slots; negative means draw anew
        self.contending = False
        self.medium: Optional[_Medium] = None
        self.wake_scheduled = False


class _Medium:
    """One contention domain: a channel plus the stations tuned to it."""

    __slots__ = ("name", "config", "members", "contenders", "busy_until",
                 "version", "round_pending", "pending_resolve", "mpdu_ns",
                 "noise_dbm", "tx_log", "foreign")

    def __init__(self, name: str, config: SliceConfig):
        self.name = name
        self.config = config
        self.members: List[_StationState] = []
        self.contenders: List[_StationState] = []
        self.busy_until = 0
        self.version = 0
        self.round_pending = False
        self.pending_resolve: Optional[Tuple[int, int, List[_StationState]]] = None
        self.tx_log: List[Tuple[int, int, float]] = []
        self.foreign: List[Tuple["_Medium", float]] = []
        self._apply_config(config)

    def _apply_config(self, config: SliceConfig) -> None:
        self.config = config
        rate = data_rate(config.width_mhz, config.mcs, config.gi_ns)
        self.mpdu_ns = round(FRAME_BITS * 1e9 / rate)
        self.noise_dbm = noise_power_dbm(config.width_mhz)


class MacEngine:
    def __init__(self, scenario: Scenario, rng, horizon_ns: int,
                 queue_capacity: int = 500,
                 max_burst_packets: int = MAX_BURST_PACKETS,
                 max_burst_airtime_ns: int = MAX_BURST_AIRTIME_NS,
                 trace: Optional[Callable[[int, int, str, str], None]] = None):
        self.scenario = scenario
        self.rng = rng
        self.horizon_ns = horizon_ns
        self.queue_capacity = queue_capacity
        self.max_burst_packets = max_burst_packets
        self.max_burst_airtime_ns = max_burst_airtime_ns
        self.trace = trace
        self.now = 0
        self.media: List[_Medium] = []
        self.states: Dict[int, _StationState] = {}
        self.flows: Dict[int, FlowRecord] = {}
        self._heap: list = []
        self._seq = itertools.count()
        self._ap_busy: List[Tuple[int, int]] = []
        self._interference_on = False
        # Contention health counters, per medium name (diagnostics and tests).
        self.stats: Dict[str, Dict[str, int]] = {}

    # -- construction -----------------------------------------------------

    def add_medium(self, name: str, config: SliceConfig,
                   stations: Sequence[Station]) -> _Medium:
        medium = _Medium(name, config)
        self.stats[name] = {"rounds": 0, "collisions": 0, "ap_blocked": 0,
                            "grants": 0, "frames": 0, "contenders_sum": 0}
        for station in stations:
            st = _StationState(station)
            st.medium = medium
            medium.members.append(st)
            self.states[station.station_id] = st
            self.flows[station.station_id] = st.flow
            if station.offered_bps > 0:
                first = station.arrival_time_ns(0)
                if first <= self.horizon_ns:
                    st.wake_scheduled = True
                    self._push(first, _WAKE, st, 0)
        self.media.append(medium)
        self._refresh_overlaps()
        return medium

    def reconfigure(self, medium: _Medium, config: SliceConfig, now_ns: int) -> None:
        """Swap a medium's radio parameters at `now_ns`.

        An exchange already granted completes under the old parameters (its
        timeline was fixed at grant time); a pending backoff is abandoned and
        contention restarts under the new configuration.
        """
        if config == medium.config:
            return
        medium._apply_config(config)
        medium.version += 1
        medium.pending_resolve = None
        for st in medium.contenders:
            st.backoff = -1  # backoff restarts under the new configuration
        self._refresh_overlaps()
        if medium.contenders and not medium.round_pending:
            medium.round_pending = True
            self._push(max(now_ns, medium.busy_until), _ROUND, medium, 0)

    def _refresh_overlaps(self) -> None:
        for m in self.media:
            m.foreign = []
            for other in self.media:
                if other is m:
                    continue
                frac = channel_overlap(other.config.spec, m.config.spec)
                if frac > 0.0:
                    m.foreign.append((other, frac))
        self._interference_on = any(m.foreign for m in self.media)

    # -- event loop -------------------------------------------------------

    def _push(self, t_ns: int, kind: int, target, tag: int) -> None:
        heapq.heappush(self._heap, (t_ns, next(self._seq), kind, target, tag))

    def run_until(self, t_ns: int) -> None:
        heap = self._heap
        while heap and heap[0][0] <= t_ns:
            when, _, kind, target, tag = heapq.heappop(heap)
            self.now = when
            if kind == _WAKE:
                self._on_wake(when, target)
            elif kind == _ROUND:
                self._on_round(when, target)
            else:
                self._on_resolve(when, target, tag)
        self.now = t_ns

    def account_all(self, t_ns: int) -> None:
        """Classify every arrival up to t_ns so KPI snapshots see exact counts."""
        for st in self.states.values():
            self._account(st, t_ns)

    def finalize(self) -> None:
        """Close the books at the horizon: whatever still sits in a queue is lost."""
        self.account_all(self.horizon_ns)
        for st in self.states.values():
            st.flow.unfinished += st.queue.length
            st.queue.pop_front(st.queue.length)

    # -- station bookkeeping ----------------------------------------------

    def _account(self, st: _StationState, t_ns: int) -> None:
        arrived = st.station.arrivals_up_to(t_ns)
        fresh = arrived - st.accounted
        if fresh <= 0:
            return
        space = self.queue_capacity - st.queue.length
        taken = min(space, fresh)
        if taken > 0:
            st.queue.push_range(st.accounted, st.accounted + taken)
        st.flow.tx_packets += fresh
        st.flow.dropped_overflow += fresh - taken
        st.accounted = arrived

    def _leave_contention(self, st: _StationState, t_ns: int) -> None:
        st.contending = False
        st.medium.contenders.remove(st)
        # Arrivals since the last accounting may already be waiting; never let
        # the wake land in the past.
        nxt = max(st.station.arrival_time_ns(st.accounted), t_ns)
        if st.station.offered_bps > 0 and nxt <= self.horizon_ns and not st.wake_scheduled:
            st.wake_scheduled = True
            self._push(nxt, _WAKE, st, 0)

    def _draw_backoff(self, st: _StationState) -> None:
        st.backoff = int(self.rng.random() * (st.cw + 1))

    def _join_contention(self, st: _StationState, t_ns: int) -> None:
        st.contending = True
        self._draw_backoff(st)
        medium = st.medium
        lo, hi = 0, len(medium.contenders)
        sid = st.station.station_id
        while lo < hi:  # insertion sorted by id keeps draw order deterministic
            mid = (lo + hi) // 2
            if medium.contenders[mid].station.station_id < sid:
                lo = mid + 1
            else:
                hi = mid
        medium.contenders.insert(lo, st)
        if (medium.busy_until <= t_ns and not medium.round_pending
                and medium.pending_resolve is None):
            medium.round_pending = True
            self._push(t_ns, _ROUND, medium, 0)

    # -- handlers -----------------------------------------------------------

    def _on_wake(self, t_ns: int, st: _StationState) -> None:
        st.wake_scheduled = False
        if st.contending:
            return
        self._account(st, t_ns)
        if st.queue.length == 0:
            nxt = st.station.arrival_time_ns(st.accounted)
            if nxt <= self.horizon_ns:
                st.wake_scheduled = True
                self._push(nxt, _WAKE, st, 0)
            return
        if self.trace:
            self.trace(t_ns, st.station.station_id, st.medium.name, "wake")
        self._join_contention(st, t_ns)

    def _on_round(self, t_ns: int, medium: _Medium) -> None:
        medium.round_pending = False
        if not medium.contenders or medium.pending_resolve is not None:
            return
        st_counts = self.stats[medium.name]
        st_counts["rounds"] += 1
        st_counts["contenders_sum"] += len(medium.contenders)
        # Counters persist across rounds (frozen while the medium is busy);
        # the idle stretch this round consumes `best` slots from everyone.
        best = -1
        winners: List[_StationState] = []
        for st in medium.contenders:
            if st.backoff < 0:
                self._draw_backoff(st)
            if best < 0 or st.backoff < best:
                best = st.backoff
                winners = [st]
            elif st.backoff == best:
                winners.append(st)
        for st in medium.contenders:
            st.backoff -= best
        t_win = t_ns + DIFS_NS + best * SLOT_NS
        medium.version += 1
        medium.pending_resolve = (medium.version, t_win, winners)
        self._push(t_win, _RESOLVE, medium, medium.version)

    def _on_resolve(self, t_ns: int, medium: _Medium, version: int) -> None:
        if medium.pending_resolve is None or medium.pending_resolve[0] != version:
            return
        _, t_win, winners = medium.pending_resolve
        medium.pending_resolve = None
        if len(winners) > 1:
            self.stats[medium.name]["collisions"] += 1
            self._rts_round_failed(medium, t_win, winners, "collision")
            return
        st = winners[0]
        self._account(st, t_win)
        # Burst size and the full exchange timeline are fixed at grant time.
        n_air = max(1, self.max_burst_airtime_ns // medium.mpdu_ns)
        n = min(st.queue.length, self.max_burst_packets, n_air)
        cts_start = t_win + RTS_NS + SIFS_NS
        data_start = cts_start + CTS_NS + SIFS_NS
        data_end = data_start + PREAMBLE_NS + n * medium.mpdu_ns
        ack_start = data_end + SIFS_NS
        ack_end = ack_start + ACK_NS
        # The AP cannot form two CTS replies at once across the channels it
        # hosts; a grant whose CTS window overlaps another pending CTS fails
        # silently for the requester.
        if self._ap_radio_busy(cts_start, cts_start + CTS_NS):
            self.stats[medium.name]["ap_blocked"] += 1
            self._rts_round_failed(medium, t_win, winners, "ap-busy")
            return
        self._ap_busy.append((cts_start, cts_start + CTS_NS))
        self.stats[medium.name]["grants"] += 1
        self.stats[medium.name]["frames"] += n

        station = st.station
        cfg = medium.config
        rx_dbm = cfg.tx_power_dbm - path_loss_db(
            station.position, self.scenario.params.ap_position, station.shadowing_db)
        if self._interference_on:
            medium.tx_log.append((t_win, t_win + RTS_NS, rx_dbm))
            medium.tx_log.append((data_start, data_end, rx_dbm))
        indices = st.queue.pop_front(n)
        st.cw = CW_MIN
        if st.queue.length > 0:
            self._draw_backoff(st)
        flow = st.flow
        if ack_end > self.horizon_ns:
            flow.unfinished += n
        else:
            self._receive_burst(medium, st, indices, data_start, data_end, rx_dbm, ack_end)
        if self.trace:
            self.trace(t_win, station.station_id, medium.name, f"grant n={n}")
        medium.busy_until = ack_end
        medium.round_pending = True
        self._push(ack_end, _ROUND, medium, 0)
        if st.queue.length == 0:
            self._leave_contention(st, ack_end)

    def _receive_burst(self, medium: _Medium, st: _StationState,
                       indices: List[int], data_start: int, data_end: int,
                       rx_dbm: float, ack_end: int) -> None:
        cfg = medium.config
        flow = st.flow
        station = st.station
        segs = self._foreign_segments(medium, data_start, data_end)
        if not segs:
            pe = packet_error_rate(rx_dbm - medium.noise_dbm, cfg.mcs)
            if pe < NEGLIGIBLE_PER:
                flow.rx_packets += len(indices)
                for k in indices:
                    flow.delay_sum_ns += ack_end - station.arrival_time_ns(k)
                return
            rand = self.rng.random
            for k in indices:
                if rand() < pe:
                    flow.dropped_channel += 1
                else:
                    flow.rx_packets += 1
                    flow.delay_sum_ns += ack_end - station.arrival_time_ns(k)
            return
        # Interference present: evaluate each frame against the transmissions
        # overlapping its own slice of air time.
        rand = self.rng.random
        t = data_start + PREAMBLE_NS
        for k in indices:
            t_next = t + medium.mpdu_ns
            interferers = [(p, frac) for (s, e, p), frac in segs if s < t_next and e > t]
            snr = sinr_db(rx_dbm, cfg.width_mhz, interferers)
            pe = packet_error_rate(snr, cfg.mcs)
            if pe >= NEGLIGIBLE_PER and rand() < pe:
                flow.dropped_channel += 1
            else:
                flow.rx_packets += 1
                flow.delay_sum_ns += ack_end - station.arrival_time_ns(k)
            t = t_next

    def _foreign_segments(self, medium: _Medium, start: int,
                          end: int) -> List[Tuple[Tuple[int, int, float], float]]:
        if not medium.foreign:
            return []
        out = []
        for other, frac in medium.foreign:
            if len(other.tx_log) > 64:
                other.tx_log = [s for s in other.tx_log if s[1] > self.now - 20_000_000]
            for seg in other.tx_log:
                if seg[0] < end and seg[1] > start:
                    out.append((seg, frac))
        return out

    def _rts_round_failed(self, medium: _Medium, t_win: int,
                          winners: List[_StationState], why: str) -> None:
        if self._interference_on:
            for st in winners:
                rx = medium.config.tx_power_dbm - path_loss_db(
                    st.station.position, self.scenario.params.ap_position,
                    st.station.shadowing_db)
                medium.tx_log.append((t_win, t_win + RTS_NS, rx))
        busy_end = t_win + RTS_NS + SIFS_NS + CTS_NS  # silent CTS window
        for st in winners:
            if self.trace:
                self.trace(t_win, st.station.station_id, medium.name, why)
            if st.cw >= CW_MAX:
                # Out of retries: head-of-line packet is abandoned.
                st.queue.pop_front(1)
                st.flow.dropped_contention += 1
                st.cw = CW_MIN
                if st.queue.length == 0:
                    self._leave_contention(st, busy_end)
                else:
                    self._draw_backoff(st)
            else:
                st.cw = st.cw * 2 + 1
                self._draw_backoff(st)
        medium.busy_until = busy_end
        medium.round_pending = True
        self._push(busy_end, _ROUND, medium, 0)

    def _ap_radio_busy(self, start: int, end: int) -> bool:
        if len(self._ap_busy) > 16:
            self._ap_busy = [(s, e) for s, e in self._ap_busy if e > start]
        return any(s < end and e > start for s, e in self._ap_busy)
