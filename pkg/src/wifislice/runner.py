"""Experiment orchestration: drive one run or the full sweep, write CSVs, summarize.

CSV column orders are part of the package contract (the figures tooling keys on
them): floats are written with repr so a re-run reproduces files byte for byte.
"""

from __future__ import annotations

import csv
import os
import statistics
from dataclasses import dataclass
from multiprocessing import Pool
from typing import Dict, List, Optional, Sequence, Tuple

from . import controllers, mac, metrics, phy
from .controllers import SliceConfig
from .scenario import (
    SETTING_NAMES,
    SLICES,
    Scenario,
    ScenarioParams,
    advance_mobility,
    build_scenario,
    parse_setting,
    rng_stream,
)

STRATEGIES = ("single", "static", "dynamic")
DEFAULT_SEEDS = tuple(range(1, 21))

PER_FLOW_COLUMNS = ("run_id", "setting", "strategy", "seed", "slice", "flow_id",
                    "tx_packets", "rx_packets", "pe", "latency_ms")
PER_RUN_COLUMNS = ("run_id", "setting", "strategy", "seed", "th_sum_bps",
                   "b_w_mhz", "mu_bit_s_hz", "mean_txpower_b_dbm",
                   "saturated_slices")
CONFIG_COLUMNS = ("run_id", "setting", "strategy", "seed", "time_s", "slice",
                  "width_mhz", "channel", "gi_ns", "mcs", "tx_power_dbm", "state")

PER_FLOW_CSV = "per_flow.csv"
PER_RUN_CSV = "per_run.csv"
CONFIGS_CSV = "slice_configs.csv"
SUMMARY_TXT = "summary.txt"


@dataclass(frozen=True)
class RunConfig:
    setting: str
    strategy: str
    seed: int
    sim_time_s: float = 15.0
    control_interval_s: float = 1.0
    queue_capacity: int = 500
    max_burst_packets: int = mac.MAX_BURST_PACKETS
    max_burst_airtime_ns: int = mac.MAX_BURST_AIRTIME_NS
    trace: bool = False
    # Extra ScenarioParams overrides (room geometry, AP position, ...).
    scenario_overrides: Optional[dict] = None

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}; "
                             f"expected one of {', '.join(STRATEGIES)}")
        parse_setting(self.setting)

    @property
    def run_id(self) -> str:
        return f"{self.setting}:{self.strategy}:{self.seed}"


@dataclass
class FlowResult:
    flow_id: int
    slice_name: str
    offered_bps: float
    tx_packets: int
    rx_packets: int
    delay_sum_ns: int
    dropped_packets: int

    @property
    def pe(self) -> float:
        return metrics.packet_error_probability(self.tx_packets, self.rx_packets)

    @property
    def latency_s(self) -> Optional[float]:
        return metrics.mean_latency_s(self.delay_sum_ns, self.rx_packets)


@dataclass
class ConfigLogEntry:
    time_s: float
    slice_name: str
    config: SliceConfig
    state: str = ""


@dataclass
class RunResult:
    config: RunConfig
    flows: List[FlowResult]
    config_log: List[ConfigLogEntry]
    th_sum_bps: float
    b_w_mhz: float
    mu: float
    mean_txpower_b_dbm: Optional[float]
    saturated_slices: Tuple[str, ...] = ()


def _measured_loss(station, ap_position) -> float:
    """Controller-visible link budget (idealized, error-free measurement)."""
    return phy.path_loss_db(station.position, ap_position, station.shadowing_db)


class _DynamicController:
    """Holds per-slice controller state across intervals and applies the updates."""

    def __init__(self, scenario: Scenario):
        self.scenario = scenario
        self.state_a = None
        self.margins_b = None
        self.prev_agg: Dict[str, Optional[float]] = {"A": None, "B": None, "C": None}
        self.saturated: set = set()

    def _rx_min(self, slice_name: str) -> float:
        ap = self.scenario.params.ap_position
        return min(20.0 - _measured_loss(st, ap)
                   for st in self.scenario.slice_stations(slice_name))

    def _losses(self) -> List[float]:
        ap = self.scenario.params.ap_position
        return [_measured_loss(st, ap) for st in self.scenario.slice_stations("B")]

    def init_configs(self) -> Dict[str, Tuple[SliceConfig, str]]:
        out: Dict[str, Tuple[SliceConfig, str]] = {}
        sc = self.scenario
        if sc.slice_stations("A"):
            cfg, self.state_a, sat = controllers.dynamic_init_a(
                sc.slice_demand_bps("A"), self._rx_min("A"))
            if sat:
                self.saturated.add("A")
            out["A"] = (cfg, f"mul={self.state_a.width_multiplier}")
        if sc.slice_stations("B"):
            cfg, self.margins_b = controllers.dynamic_init_b(
                sc.slice_demand_bps("B"), self._losses())
            out["B"] = (cfg, f"mcs_add={self.margins_b.mcs_add},"
                             f"tx_add={self.margins_b.tx_power_add}")
        if sc.slice_stations("C"):
            cfg, sat = controllers.dynamic_update_c(
                sc.slice_demand_bps("C"), self._rx_min("C"))
            if sat:
                self.saturated.add("C")
            out["C"] = (cfg, "")
        return out

    def update_configs(self, interval_kpis) -> Dict[str, Tuple[SliceConfig, str]]:
        """interval_kpis: slice -> (per-flow Pe list, pooled aggregate Pe)."""
        out: Dict[str, Tuple[SliceConfig, str]] = {}
        sc = self.scenario
        if sc.slice_stations("A"):
            flow_pes, agg = interval_kpis["A"]
            cfg, self.state_a, sat = controllers.dynamic_update_a(
                sc.slice_demand_bps("A"), self._rx_min("A"),
                flow_pes, agg, self.prev_agg["A"], self.state_a)
            if sat:
                self.saturated.add("A")
            self.prev_agg["A"] = agg
            out["A"] = (cfg, f"mul={self.state_a.width_multiplier}")
        if sc.slice_stations("B"):
            flow_pes, agg = interval_kpis["B"]
            cfg, self.margins_b = controllers.dynamic_update_b(
                sc.slice_demand_bps("B"), self._losses(),
                flow_pes, agg, self.prev_agg["B"], self.margins_b)
            self.prev_agg["B"] = agg
            out["B"] = (cfg, f"mcs_add={self.margins_b.mcs_add},"
                             f"tx_add={self.margins_b.tx_power_add}")
        if sc.slice_stations("C"):
            _, agg = interval_kpis["C"]
            cfg, sat = controllers.dynamic_update_c(
                sc.slice_demand_bps("C"), self._rx_min("C"))
            if sat:
                self.saturated.add("C")
            self.prev_agg["C"] = agg
            out["C"] = (cfg, "")
        return out


def run_experiment(cfg: RunConfig) -> RunResult:
    counts = parse_setting(cfg.setting)
    params = ScenarioParams(*counts, sim_time_s=cfg.sim_time_s,
                            control_interval_s=cfg.control_interval_s,
                            **(cfg.scenario_overrides or {}))
    scenario = build_scenario(cfg.setting, cfg.seed, params)
    horizon_ns = round(cfg.sim_time_s * 1e9)
    interval_ns = round(cfg.control_interval_s * 1e9)
    n_intervals = params.n_intervals

    mac_rng = rng_stream(cfg.seed, "mac")
    mobility_rng = rng_stream(cfg.seed, "mobility")
    trace_fn = None
    if cfg.trace:
        def trace_fn(t_ns, station_id, medium, kind):
            print(f"{t_ns / 1e9:.6f} sta={station_id} ch={medium} {kind}")

    engine = mac.MacEngine(scenario, mac_rng, horizon_ns,
                           queue_capacity=cfg.queue_capacity,
                           max_burst_packets=cfg.max_burst_packets,
                           max_burst_airtime_ns=cfg.max_burst_airtime_ns,
                           trace=trace_fn)

    config_log: List[ConfigLogEntry] = []
    media: Dict[str, mac._Medium] = {}
    saturated: set = set()
    dyn: Optional[_DynamicController] = None

    if cfg.strategy == "single":
        shared = controllers.single_channel_config()
        media["all"] = engine.add_medium("all", shared, scenario.stations)
        config_log.append(ConfigLogEntry(0.0, "all", shared))
    elif cfg.strategy == "static":
        alloc = controllers.static_allocate(scenario.slice_demand_bps("A"),
                                            scenario.slice_demand_bps("B"),
                                            scenario.slice_demand_bps("C"))
        saturated.update(s for s, flag in alloc.saturated.items() if flag)
        for name in SLICES:
            media[name] = engine.add_medium(
                name, alloc.configs[name], scenario.slice_stations(name))
            config_log.append(ConfigLogEntry(0.0, name, alloc.configs[name]))
    else:
        dyn = _DynamicController(scenario)
        for name, (config, state) in sorted(dyn.init_configs().items()):
            media[name] = engine.add_medium(
                name, config, scenario.slice_stations(name))
            config_log.append(ConfigLogEntry(0.0, name, config, state))
        saturated.update(dyn.saturated)

    flows = engine.flows
    prev_counts = {fid: (0, 0) for fid in flows}
    txpower_b: List[float] = []
    interval_width_sums: List[float] = []

    current_configs = {name: m.config for name, m in media.items()}

    for k in range(1, n_intervals + 1):
        interval_width_sums.append(
            float(sum(c.width_mhz for c in current_configs.values())))
        if "B" in current_configs:
            txpower_b.append(current_configs["B"].tx_power_dbm)
        elif cfg.strategy == "single":
            txpower_b.append(current_configs["all"].tx_power_dbm)

        t_ns = k * interval_ns
        engine.run_until(t_ns)
        engine.account_all(t_ns)

        if k == n_intervals:
            break

        # KPI snapshot of the interval that just ended.
        interval_kpis = {}
        if dyn is not None:
            for name in SLICES:
                members = scenario.slice_stations(name)
                if not members:
                    continue
                pes, tx_sum, rx_sum = [], 0, 0
                for st in members:
                    f = flows[st.station_id]
                    tx0, rx0 = prev_counts[st.station_id]
                    dtx, drx = f.tx_packets - tx0, f.rx_packets - rx0
                    pes.append(metrics.packet_error_probability(dtx, drx))
                    tx_sum += dtx
                    rx_sum += drx
                interval_kpis[name] = (
                    pes, metrics.packet_error_probability(tx_sum, rx_sum))
        prev_counts = {fid: (f.tx_packets, f.rx_packets) for fid, f in flows.items()}

        advance_mobility(scenario, mobility_rng, cfg.control_interval_s)

        if dyn is not None:
            t_s = t_ns / 1e9
            for name, (config, state) in sorted(dyn.update_configs(interval_kpis).items()):
                engine.reconfigure(media[name], config, t_ns)
                config_log.append(ConfigLogEntry(t_s, name, config, state))
                current_configs[name] = config
            saturated.update(dyn.saturated)

    engine.finalize()

    flow_results = []
    for st in scenario.stations:
        f = flows[st.station_id]
        flow_results.append(FlowResult(
            st.station_id, st.slice_name, st.offered_bps,
            f.tx_packets, f.rx_packets, f.delay_sum_ns, f.dropped_packets))

    th_sum = metrics.total_throughput_bps(
        [f.rx_packets for f in flow_results], cfg.sim_time_s)
    b_w = metrics.used_bandwidth_mhz(cfg.strategy, interval_width_sums)
    mu = metrics.spectrum_efficiency(th_sum, b_w)
    mean_txp_b = sum(txpower_b) / len(txpower_b) if txpower_b else None

    return RunResult(cfg, flow_results, config_log, th_sum, b_w, mu,
                     mean_txp_b, tuple(sorted(saturated)))


# -- sweep ------------------------------------------------------------------


def sweep_plan(settings: Sequence[str] = SETTING_NAMES,
               strategies: Sequence[str] = STRATEGIES,
               seeds: Sequence[int] = DEFAULT_SEEDS) -> List[RunConfig]:
    plan = [RunConfig(setting, strategy, seed)
            for setting in settings for strategy in strategies for seed in seeds]
    if len({(c.setting, c.strategy, c.seed) for c in plan}) != len(plan):
        raise ValueError("sweep plan contains duplicate (setting, strategy, seed)")
    return plan


def _run_entry(cfg: RunConfig):
    try:
        return run_experiment(cfg), None
    except Exception as exc:  # propagate per-entry failures to the merger
        return None, f"{cfg.run_id}: {exc}"


def run_sweep(out_dir: str, jobs: int = 1,
              plan: Optional[List[RunConfig]] = None) -> List[str]:
    """Run the full experiment plan and write merged CSVs; returns failure list."""
    os.makedirs(out_dir, exist_ok=True)
    plan = sweep_plan() if plan is None else plan
    if jobs > 1:
        with Pool(jobs) as pool:
            outcomes = pool.map(_run_entry, plan)
    else:
        outcomes = [_run_entry(cfg) for cfg in plan]
    results = [r for r, _ in outcomes if r is not None]
    failures = [e for _, e in outcomes if e is not None]
    write_csvs(results, out_dir)
    with open(os.path.join(out_dir, SUMMARY_TXT), "w") as fh:
        fh.write(summarize(out_dir))
        for failure in failures:
            fh.write(f"FAILED {failure}\n")
    return failures


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csvs(results: Sequence[RunResult], out_dir: str) -> None:
    with open(os.path.join(out_dir, PER_FLOW_CSV), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(PER_FLOW_COLUMNS)
        for r in results:
            c = r.config
            for f in r.flows:
                latency_ms = None if f.latency_s is None else f.latency_s * 1e3
                w.writerow([c.run_id, c.setting, c.strategy, c.seed,
                            f.slice_name, f.flow_id, f.tx_packets, f.rx_packets,
                            _fmt(f.pe), _fmt(latency_ms)])
    with open(os.path.join(out_dir, PER_RUN_CSV), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(PER_RUN_COLUMNS)
        for r in results:
            c = r.config
            w.writerow([c.run_id, c.setting, c.strategy, c.seed,
                        _fmt(r.th_sum_bps), _fmt(r.b_w_mhz), _fmt(r.mu),
                        _fmt(r.mean_txpower_b_dbm),
                        " ".join(r.saturated_slices)])
    with open(os.path.join(out_dir, CONFIGS_CSV), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CONFIG_COLUMNS)
        for r in results:
            c = r.config
            for entry in r.config_log:
                cc = entry.config
                w.writerow([c.run_id, c.setting, c.strategy, c.seed,
                            _fmt(entry.time_s), entry.slice_name, cc.width_mhz,
                            cc.channel, cc.gi_ns, cc.mcs,
                            _fmt(cc.tx_power_dbm), entry.state])


# -- summary ----------------------------------------------------------------


def _quartiles(values: List[float]) -> Tuple[float, float, float]:
    if len(values) == 1:
        return values[0], values[0], values[0]
    q = statistics.quantiles(values, n=4, method="inclusive")
    return q[0], q[1], q[2]


def summarize(out_dir: str) -> str:
    per_flow = os.path.join(out_dir, PER_FLOW_CSV)
    per_run = os.path.join(out_dir, PER_RUN_CSV)
    if not (os.path.exists(per_flow) and os.path.exists(per_run)):
        raise FileNotFoundError(f"no sweep CSVs under {out_dir}")

    pe: Dict[Tuple[str, str], List[float]] = {}
    lat: Dict[Tuple[str, str], List[float]] = {}
    with open(per_flow, newline="") as fh:
        for row in csv.DictReader(fh):
            key = (row["strategy"], row["slice"])
            pe.setdefault(key, []).append(float(row["pe"]))
            if row["latency_ms"]:
                lat.setdefault(key, []).append(float(row["latency_ms"]))

    mu: Dict[str, List[float]] = {}
    txp: Dict[str, List[float]] = {}
    with open(per_run, newline="") as fh:
        for row in csv.DictReader(fh):
            mu.setdefault(row["strategy"], []).append(float(row["mu_bit_s_hz"]))
            if row["mean_txpower_b_dbm"]:
                txp.setdefault(row["strategy"], []).append(
                    float(row["mean_txpower_b_dbm"]))

    lines = ["metric      strategy   slice   q1        median    q3"]
    for (strategy, slice_name), values in sorted(pe.items()):
        q1, med, q3 = _quartiles(values)
        lines.append(f"pe          {strategy:<10} {slice_name:<7} "
                     f"{q1:<9.4f} {med:<9.4f} {q3:<9.4f}")
    for (strategy, slice_name), values in sorted(lat.items()):
        q1, med, q3 = _quartiles(values)
        lines.append(f"latency_ms  {strategy:<10} {slice_name:<7} "
                     f"{q1:<9.2f} {med:<9.2f} {q3:<9.2f}")
    for strategy, values in sorted(mu.items()):
        q1, med, q3 = _quartiles(values)
        lines.append(f"mu          {strategy:<10} {'':<7} "
                     f"{q1:<9.3f} {med:<9.3f} {q3:<9.3f}")
    for strategy, values in sorted(txp.items()):
        q1, med, q3 = _quartiles(values)
        lines.append(f"txpower_b   {strategy:<10} {'':<7} "
                     f"{q1:<9.2f} {med:<9.2f} {q3:<9.2f}")
    return "\n".join(lines) + "\n"
