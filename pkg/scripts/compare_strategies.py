#!/usr/bin/env python3
"""Run one setting under all three channel-allocation strategies and print a
side-by-side KPI table (per-slice error probability and latency, plus run-level
throughput, bandwidth, spectrum efficiency, and slice-B transmit power).

Useful as a quick sanity check without waiting for the full sweep.
"""

import argparse
import statistics
import sys

from wifislice import runner
from wifislice.scenario import SETTING_NAMES, SLICES


def _median_kpis(result, slice_name):
    flows = [f for f in result.flows if f.slice_name == slice_name]
    if not flows:
        return "-", "-"
    pe = statistics.median(f.pe for f in flows)
    lats = [f.latency_s for f in flows if f.latency_s is not None]
    lat = f"{statistics.median(lats) * 1e3:8.2f}" if lats else "     n/a"
    return f"{pe:6.4f}", lat


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--setting", default="4-100-4",
                    help=f"station counts, one of {', '.join(SETTING_NAMES)} "
                         "or any A-B-C triple")
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--sim-time", type=float, default=15.0,
                    help="simulated seconds (multiple of the 1 s interval)")
    args = ap.parse_args()

    results = {}
    for strategy in runner.STRATEGIES:
        cfg = runner.RunConfig(args.setting, strategy, args.seed,
                               sim_time_s=args.sim_time)
        print(f"running {cfg.run_id} ...", flush=True)
        results[strategy] = runner.run_experiment(cfg)

    print(f"\nsetting {args.setting}, seed {args.seed}, "
          f"{args.sim_time:g} s simulated")
    print(f"{'':14}" + "".join(f"{s:>18}" for s in runner.STRATEGIES))
    for slice_name in SLICES:
        pes, lats = [], []
        for strategy in runner.STRATEGIES:
            pe, lat = _median_kpis(results[strategy], slice_name)
            pes.append(pe)
            lats.append(lat)
        print(f"{slice_name} med pe      " + "".join(f"{v:>18}" for v in pes))
        print(f"{slice_name} med lat ms  " + "".join(f"{v:>18}" for v in lats))
    for label, fmt, attr in (
            ("thpt Mbit/s", "{:18.1f}", "th_sum_bps"),
            ("bandwidth MHz", "{:18.1f}", "b_w_mhz"),
            ("mu bit/s/Hz", "{:18.3f}", "mu")):
        row = ""
        for strategy in runner.STRATEGIES:
            value = getattr(results[strategy], attr)
            if attr == "th_sum_bps":
                value /= 1e6
            row += fmt.format(value)
        print(f"{label:<14}" + row)
    row = ""
    for strategy in runner.STRATEGIES:
        txp = results[strategy].mean_txpower_b_dbm
        row += f"{txp:18.2f}" if txp is not None else f"{'n/a':>18}"
    print(f"{'B txpwr dBm':<14}" + row)
    return 0


if __name__ == "__main__":
    sys.exit(main())
