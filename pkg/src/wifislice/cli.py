"""Command-line entry points: run one experiment, run the sweep, summarize results.

Exit codes: 0 on success, 1 on configuration errors, 2 when some sweep entries fail.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import fields
from typing import Optional

from . import runner
from .scenario import ScenarioParams


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wifislice",
        description="Uplink Wi-Fi network-slicing simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run one experiment")
    run_p.add_argument("--setting", required=True,
                       help="station counts as nA-nB-nC, e.g. 4-100-4")
    run_p.add_argument("--strategy", required=True,
                       help="single | static | dynamic")
    run_p.add_argument("--seed", required=True, type=int)
    run_p.add_argument("--sim-time", type=float, default=None,
                       help="simulated seconds (default 15)")
    run_p.add_argument("--interval", type=float, default=None,
                       help="control interval seconds (default 1)")
    run_p.add_argument("--config", default=None,
                       help="JSON file overriding scenario/engine parameters")
    run_p.add_argument("--trace", action="store_true",
                       help="print one line per MAC event")
    run_p.add_argument("--out", default=None,
                       help="directory for CSV output (prints a summary if omitted)")

    sweep_p = sub.add_parser("sweep", help="run the full 3x3x20 sweep")
    sweep_p.add_argument("--out", required=True)
    sweep_p.add_argument("--jobs", type=int, default=1)

    sum_p = sub.add_parser("summarize", help="print summary statistics of a sweep")
    sum_p.add_argument("--in", dest="in_dir", required=True)
    return parser


_RUN_CONFIG_KEYS = {"sim_time_s", "control_interval_s", "queue_capacity",
                    "max_burst_packets", "max_burst_airtime_ns"}
# Timing keys ride on the run config, which forwards them to the scenario;
# counts come from --setting.
_SCENARIO_KEYS = {f.name for f in fields(ScenarioParams)} - {
    "n_sta_a", "n_sta_b", "n_sta_c"} - _RUN_CONFIG_KEYS


def _load_config_file(path: str) -> dict:
    with open(path) as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ValueError(f"{path}: expected a JSON object")
    unknown = set(data) - _RUN_CONFIG_KEYS - _SCENARIO_KEYS
    if unknown:
        raise ValueError(f"{path}: unknown keys {sorted(unknown)}")
    if "ap_position" in data:
        data["ap_position"] = tuple(data["ap_position"])
    return data


def _cmd_run(args) -> int:
    overrides = _load_config_file(args.config) if args.config else {}
    kwargs = {k: v for k, v in overrides.items() if k in _RUN_CONFIG_KEYS}
    scenario_overrides = {k: v for k, v in overrides.items() if k in _SCENARIO_KEYS}
    if args.sim_time is not None:
        kwargs["sim_time_s"] = args.sim_time
    if args.interval is not None:
        kwargs["control_interval_s"] = args.interval
    cfg = runner.RunConfig(args.setting, args.strategy, args.seed,
                           trace=args.trace,
                           scenario_overrides=scenario_overrides, **kwargs)
    result = runner.run_experiment(cfg)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        runner.write_csvs([result], args.out)
    else:
        _print_run_result(result)
    return 0


def _print_run_result(result) -> None:
    r = result
    print(f"run {r.config.run_id}: throughput {r.th_sum_bps / 1e6:.1f} Mbit/s, "
          f"bandwidth {r.b_w_mhz:.1f} MHz, efficiency {r.mu:.3f} bit/s/Hz")
    if r.mean_txpower_b_dbm is not None:
        print(f"  slice-B mean tx power {r.mean_txpower_b_dbm:.2f} dBm")
    if r.saturated_slices:
        print(f"  saturated slices: {', '.join(r.saturated_slices)}")
    for slice_name in ("A", "B", "C"):
        flows = [f for f in r.flows if f.slice_name == slice_name]
        if not flows:
            continue
        pes = sorted(f.pe for f in flows)
        lats = sorted(f.latency_s for f in flows if f.latency_s is not None)
        med_pe = pes[len(pes) // 2]
        med_lat = f"{lats[len(lats) // 2] * 1e3:.2f} ms" if lats else "n/a"
        print(f"  slice {slice_name}: {len(flows)} flows, "
              f"median pe {med_pe:.4f}, median latency {med_lat}")


def _cmd_sweep(args) -> int:
    failures = runner.run_sweep(args.out, jobs=args.jobs)
    for failure in failures:
        print(f"FAILED {failure}", file=sys.stderr)
    print(f"sweep complete, results in {args.out}")
    return 2 if failures else 0


def _cmd_summarize(args) -> int:
    print(runner.summarize(args.in_dir), end="")
    return 0


def main(argv: Optional[list] = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "sweep":
            return _cmd_sweep(args)
        return _cmd_summarize(args)
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
