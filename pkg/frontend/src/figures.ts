/** Figure assembly: pick the CSV, group its rows, compute box statistics.
 *
 * Per-flow kinds (pe, latency) group per_flow.csv by slice x strategy; a full
 * sweep yields 9 boxes. Per-run kinds (txpower, efficiency) group per_run.csv
 * by strategy; a full sweep yields 3 boxes of 60 runs. Rows pool every
 * setting present in the CSV; filter upstream for per-setting views.
 */

import * as path from "path";

import { readCsvTable } from "./csv";
import { boxStats, BoxStats } from "./stats";
import { renderBoxplot } from "./svg";

export const FIGURE_KINDS = ["pe", "latency", "txpower", "efficiency"] as const;
export type FigureKind = (typeof FIGURE_KINDS)[number];

interface KindSpec {
  file: string;
  valueColumn: string;
  groupColumns: string[];
  title: string;
  yLabel: string;
}

const KINDS: Record<FigureKind, KindSpec> = {
  pe: {
    file: "per_flow.csv",
    valueColumn: "pe",
    groupColumns: ["slice", "strategy"],
    title: "Per-flow packet error probability",
    yLabel: "packet error probability",
  },
  latency: {
    file: "per_flow.csv",
    valueColumn: "latency_ms",
    groupColumns: ["slice", "strategy"],
    title: "Per-flow mean latency",
    yLabel: "mean latency (ms)",
  },
  txpower: {
    file: "per_run.csv",
    valueColumn: "mean_txpower_b_dbm",
    groupColumns: ["strategy"],
    title: "Slice B mean transmit power",
    yLabel: "mean TX power (dBm)",
  },
  efficiency: {
    file: "per_run.csv",
    valueColumn: "mu_bit_s_hz",
    groupColumns: ["strategy"],
    title: "Spectrum efficiency",
    yLabel: "spectrum efficiency (bit/s/Hz)",
  },
};

// Canonical display order; values outside these lists sort after, lexically.
const SLICE_ORDER = ["A", "B", "C"];
const STRATEGY_ORDER = ["single", "static", "dynamic"];

export interface GroupStats {
  /** Group key, group-column values joined with ":" (e.g. "A:single"). */
  key: string;
  /** Space-separated label shown under the box. */
  label: string;
  stats: BoxStats;
}

export interface Figure {
  kind: FigureKind;
  title: string;
  groups: GroupStats[];
  svg: string;
}

function orderIndex(order: string[], value: string): number {
  const i = order.indexOf(value);
  return i === -1 ? order.length : i;
}

function compareKeys(a: string[], b: string[]): number {
  const orders = [SLICE_ORDER, STRATEGY_ORDER];
  for (let i = 0; i < a.length; i++) {
    // Single-column grouping is by strategy.
    const order = a.length === 1 ? STRATEGY_ORDER : orders[Math.min(i, 1)];
    const d = orderIndex(order, a[i]) - orderIndex(order, b[i]);
    if (d !== 0) return d;
    if (a[i] !== b[i]) return a[i] < b[i] ? -1 : 1;
  }
  return 0;
}

export function buildFigure(inDir: string, kind: string): Figure {
  if (!(FIGURE_KINDS as readonly string[]).includes(kind)) {
    throw new Error(
      `unknown figure kind "${kind}"; expected ${FIGURE_KINDS.join("|")}`);
  }
  const spec = KINDS[kind as FigureKind];
  const file = path.join(inDir, spec.file);
  const table = readCsvTable(file);
  for (const column of [...spec.groupColumns, spec.valueColumn]) {
    if (!table.fields.includes(column)) {
      throw new Error(`${file}: missing column "${column}"`);
    }
  }
  if (table.rows.length === 0) {
    throw new Error(`${file}: no data rows`);
  }

  // Groups are keyed by the values observed in the CSV; a group whose every
  // value cell is empty is an error, a group absent from the CSV is not.
  const groups = new Map<string, number[]>();
  for (const row of table.rows) {
    const key = spec.groupColumns.map((c) => row[c]).join(":");
    let values = groups.get(key);
    if (values === undefined) {
      values = [];
      groups.set(key, values);
    }
    const raw = row[spec.valueColumn];
    if (raw === "" || raw === undefined) continue; // e.g. latency of rx=0 flow
    const value = Number(raw);
    if (!Number.isFinite(value)) {
      throw new Error(
        `${file}: non-numeric ${spec.valueColumn} value "${raw}" in group ${key}`);
    }
    values.push(value);
  }

  const keys = [...groups.keys()].sort((a, b) =>
    compareKeys(a.split(":"), b.split(":")));
  const groupStats: GroupStats[] = keys.map((key) => {
    const values = groups.get(key)!;
    if (values.length === 0) {
      throw new Error(
        `${file}: group ${key} has no ${spec.valueColumn} values`);
    }
    return { key, label: key.split(":").join(" "), stats: boxStats(values) };
  });

  const svg = renderBoxplot(groupStats, {
    title: spec.title,
    yLabel: spec.yLabel,
  });
  return { kind: kind as FigureKind, title: spec.title, groups: groupStats, svg };
}
