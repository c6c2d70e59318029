import * as fs from "fs";
import * as os from "os";
import * as path from "path";

import { beforeAll, describe, expect, it } from "vitest";

import { main } from "../src/cli";
import { buildFigure } from "../src/figures";

const SLICES = ["A", "B", "C"];
const STRATEGIES = ["single", "static", "dynamic"];

const PER_FLOW_HEADER =
  "run_id,setting,strategy,seed,slice,flow_id,tx_packets,rx_packets,pe,latency_ms";
const PER_RUN_HEADER =
  "run_id,setting,strategy,seed,th_sum_bps,b_w_mhz,mu_bit_s_hz," +
  "mean_txpower_b_dbm,saturated_slices";

/** Reference quartile, written independently of src/stats.ts: exact integer
 * rank arithmetic for the p = num/den quantile at position p * (n - 1). */
function refQuantile(values: number[], num: number, den: number): number {
  const xs = [...values].sort((a, b) => a - b);
  const t = num * (xs.length - 1);
  const k = Math.floor(t / den);
  const r = t - k * den;
  return r === 0 ? xs[k] : xs[k] * ((den - r) / den) + xs[k + 1] * (r / den);
}

interface Fixture {
  dir: string;
  pe: Map<string, number[]>;       // "slice:strategy" -> values
  latency: Map<string, number[]>;
  mu: Map<string, number[]>;       // "strategy" -> values
  txp: Map<string, number[]>;
}

/** Synthesizes CSVs shaped like a real sweep: 9 per-flow groups of 7 flows
 * (one latency cell empty per group) and 60 runs per strategy. */
function writeFixture(): Fixture {
  const dir = fs.mkdtempSync(path.join(os.tmpdir(), "figures-"));
  const pe = new Map<string, number[]>();
  const latency = new Map<string, number[]>();
  const flowLines = [PER_FLOW_HEADER];
  let g = 0;
  for (const slice of SLICES) {
    for (const strategy of STRATEGIES) {
      const key = `${slice}:${strategy}`;
      pe.set(key, []);
      latency.set(key, []);
      for (let j = 0; j < 7; j++) {
        const p = (((g * 7 + j) * 37) % 100) / 100;
        pe.get(key)!.push(p);
        let lat = "";
        if (j !== 3) {
          const v = 0.5 + (((g * 13 + j * 5) % 50) / 10);
          latency.get(key)!.push(v);
          lat = String(v);
        }
        flowLines.push(
          `set:${strategy}:1,set,${strategy},1,${slice},${g * 7 + j},100,90,${p},${lat}`);
      }
      g++;
    }
  }
  fs.writeFileSync(path.join(dir, "per_flow.csv"), flowLines.join("\n") + "\n");

  const mu = new Map<string, number[]>();
  const txp = new Map<string, number[]>();
  const runLines = [PER_RUN_HEADER];
  STRATEGIES.forEach((strategy, si) => {
    mu.set(strategy, []);
    txp.set(strategy, []);
    for (let i = 0; i < 60; i++) {
      const m = 1 + (i % 40) / 20 + si * 0.3;
      const t = strategy === "dynamic" ? -15 + (i % 21) : 20.0;
      mu.get(strategy)!.push(m);
      txp.get(strategy)!.push(t);
      runLines.push(
        `set:${strategy}:${i},set,${strategy},${i},1e9,160.0,${m},${t},`);
    }
  });
  fs.writeFileSync(path.join(dir, "per_run.csv"), runLines.join("\n") + "\n");
  return { dir, pe, latency, mu, txp };
}

function svgBoxes(svg: string): Map<string, Record<string, number>> {
  const boxes = new Map<string, Record<string, number>>();
  const re = /<g class="box" data-group="([^"]+)" data-n="([^"]+)" data-lo="([^"]+)" data-q1="([^"]+)" data-median="([^"]+)" data-q3="([^"]+)" data-hi="([^"]+)">/g;
  for (const m of svg.matchAll(re)) {
    boxes.set(m[1], {
      n: Number(m[2]), lo: Number(m[3]), q1: Number(m[4]),
      median: Number(m[5]), q3: Number(m[6]), hi: Number(m[7]),
    });
  }
  return boxes;
}

function expectBoxMatches(box: Record<string, number>, values: number[]) {
  const sorted = [...values].sort((a, b) => a - b);
  expect(box.n).toBe(values.length);
  expect(box.lo).toBe(sorted[0]);
  expect(box.hi).toBe(sorted[sorted.length - 1]);
  expect(Math.abs(box.q1 - refQuantile(values, 1, 4))).toBeLessThanOrEqual(1e-9);
  expect(Math.abs(box.median - refQuantile(values, 1, 2))).toBeLessThanOrEqual(1e-9);
  expect(Math.abs(box.q3 - refQuantile(values, 3, 4))).toBeLessThanOrEqual(1e-9);
}

let fx: Fixture;
beforeAll(() => {
  fx = writeFixture();
});

describe("per-flow figures", () => {
  it("pe groups into 9 slice x strategy boxes matching recomputation", () => {
    const fig = buildFigure(fx.dir, "pe");
    expect(fig.groups.map((g) => g.key)).toEqual([
      "A:single", "A:static", "A:dynamic",
      "B:single", "B:static", "B:dynamic",
      "C:single", "C:static", "C:dynamic",
    ]);
    const boxes = svgBoxes(fig.svg);
    expect(boxes.size).toBe(9);
    for (const [key, values] of fx.pe) {
      expectBoxMatches(boxes.get(key)!, values);
    }
  });

  it("latency skips empty cells and stays in milliseconds", () => {
    const fig = buildFigure(fx.dir, "latency");
    const boxes = svgBoxes(fig.svg);
    expect(boxes.size).toBe(9);
    for (const [key, values] of fx.latency) {
      expect(boxes.get(key)!.n).toBe(6);
      expectBoxMatches(boxes.get(key)!, values);
    }
  });
});

describe("per-run figures", () => {
  it("efficiency groups into 3 strategy boxes of 60 runs", () => {
    const fig = buildFigure(fx.dir, "efficiency");
    expect(fig.groups.map((g) => g.key)).toEqual(STRATEGIES);
    const boxes = svgBoxes(fig.svg);
    for (const strategy of STRATEGIES) {
      expect(boxes.get(strategy)!.n).toBe(60);
      expectBoxMatches(boxes.get(strategy)!, fx.mu.get(strategy)!);
    }
  });

  it("txpower renders constant-valued groups as degenerate boxes", () => {
    const fig = buildFigure(fx.dir, "txpower");
    const boxes = svgBoxes(fig.svg);
    expect(boxes.size).toBe(3);
    const single = boxes.get("single")!;
    expect([single.lo, single.q1, single.median, single.q3, single.hi])
      .toEqual([20, 20, 20, 20, 20]);
    expectBoxMatches(boxes.get("dynamic")!, fx.txp.get("dynamic")!);
  });
});

describe("determinism and errors", () => {
  it("renders byte-identical SVG for identical input", () => {
    expect(buildFigure(fx.dir, "pe").svg).toBe(buildFigure(fx.dir, "pe").svg);
  });

  it("rejects unknown kinds", () => {
    expect(() => buildFigure(fx.dir, "violin")).toThrow(/unknown figure kind/);
  });

  it("diagnoses a missing column", () => {
    const dir = fs.mkdtempSync(path.join(os.tmpdir(), "figures-"));
    const header = PER_FLOW_HEADER.replace(",pe,", ",pe_oops,");
    fs.writeFileSync(path.join(dir, "per_flow.csv"),
      header + "\nr,s,single,1,A,0,10,9,0.1,1.0\n");
    expect(() => buildFigure(dir, "pe")).toThrow(/missing column "pe"/);
  });

  it("diagnoses an empty CSV", () => {
    const dir = fs.mkdtempSync(path.join(os.tmpdir(), "figures-"));
    fs.writeFileSync(path.join(dir, "per_flow.csv"), PER_FLOW_HEADER + "\n");
    expect(() => buildFigure(dir, "pe")).toThrow(/no data rows/);
  });

  it("diagnoses a group whose every value cell is empty", () => {
    const dir = fs.mkdtempSync(path.join(os.tmpdir(), "figures-"));
    const lines = [PER_FLOW_HEADER,
      "r1,s,single,1,A,0,10,9,0.1,1.5",
      "r2,s,static,1,B,1,10,0,1.0,",
      "r3,s,static,1,B,2,10,0,1.0,"];
    fs.writeFileSync(path.join(dir, "per_flow.csv"), lines.join("\n") + "\n");
    expect(() => buildFigure(dir, "latency"))
      .toThrow(/group B:static has no latency_ms values/);
  });

  it("diagnoses non-numeric values", () => {
    const dir = fs.mkdtempSync(path.join(os.tmpdir(), "figures-"));
    fs.writeFileSync(path.join(dir, "per_flow.csv"),
      PER_FLOW_HEADER + "\nr,s,single,1,A,0,10,9,oops,1.0\n");
    expect(() => buildFigure(dir, "pe")).toThrow(/non-numeric/);
  });
});

describe("cli", () => {
  it("writes the SVG and reports the box count", () => {
    const out = path.join(fx.dir, "pe.svg");
    expect(main(["--in", fx.dir, "--kind", "pe", "--out", out])).toBe(0);
    const svg = fs.readFileSync(out, "utf8");
    expect(svg.startsWith("<svg")).toBe(true);
    expect(svgBoxes(svg).size).toBe(9);
  });

  it("writes nothing on error", () => {
    const out = path.join(fx.dir, "bad.svg");
    expect(main(["--in", fx.dir, "--kind", "violin", "--out", out])).toBe(1);
    expect(fs.existsSync(out)).toBe(false);
    expect(main(["--in", fx.dir, "--kind", "pe"])).toBe(1);
  });

  it("propagates a missing input directory as exit 1", () => {
    const out = path.join(fx.dir, "missing.svg");
    const code = main(
      ["--in", path.join(fx.dir, "nope"), "--kind", "pe", "--out", out]);
    expect(code).toBe(1);
    expect(fs.existsSync(out)).toBe(false);
  });
});
