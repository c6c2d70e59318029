/** Hand-rolled SVG boxplot renderer.
 *
 * Boxes span q1..q3 with a median line; whiskers reach the sample extremes.
 * Each box group carries its statistics as data- attributes
 * (data-n/-lo/-q1/-median/-q3/-hi) at full precision, so the rendered figure
 * can be checked against a recomputation without parsing coordinates.
 */

import { GroupStats } from "./figures";

const MARGIN = { top: 48, right: 24, bottom: 56, left: 72 };
const SLOT_W = 88; // horizontal room per box
const BOX_W = 42;
const PLOT_H = 300;
const TICKS = 5;

function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function fmtCoord(v: number): string {
  return v.toFixed(2).replace(/\.?0+$/, "");
}

function fmtTick(v: number): string {
  if (v === 0) return "0";
  return String(Number(v.toPrecision(4)));
}

export interface BoxplotOptions {
  title: string;
  yLabel: string;
}

export function renderBoxplot(groups: GroupStats[], opts: BoxplotOptions): string {
  if (groups.length === 0) throw new Error("boxplot with no groups");

  let dataLo = Math.min(0, ...groups.map((g) => g.stats.lo));
  let dataHi = Math.max(...groups.map((g) => g.stats.hi));
  if (dataHi === dataLo) dataHi = dataLo + (Math.abs(dataLo) || 1);
  const pad = 0.05 * (dataHi - dataLo);
  const y0 = dataLo === 0 ? 0 : dataLo - pad;
  const y1 = dataHi + pad;

  const width = MARGIN.left + groups.length * SLOT_W + MARGIN.right;
  const height = MARGIN.top + PLOT_H + MARGIN.bottom;
  const y = (v: number) =>
    MARGIN.top + PLOT_H - ((v - y0) / (y1 - y0)) * PLOT_H;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" ` +
    `height="${height}" viewBox="0 0 ${width} ${height}" ` +
    `font-family="sans-serif" font-size="12">`);
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);
  parts.push(
    `<text x="${width / 2}" y="22" text-anchor="middle" font-size="14" ` +
    `font-weight="bold">${esc(opts.title)}</text>`);
  parts.push(
    `<text x="16" y="${MARGIN.top + PLOT_H / 2}" text-anchor="middle" ` +
    `transform="rotate(-90 16 ${MARGIN.top + PLOT_H / 2})">` +
    `${esc(opts.yLabel)}</text>`);

  for (let i = 0; i <= TICKS; i++) {
    const v = y0 + ((y1 - y0) * i) / TICKS;
    const ty = fmtCoord(y(v));
    parts.push(
      `<line x1="${MARGIN.left}" y1="${ty}" ` +
      `x2="${width - MARGIN.right}" y2="${ty}" stroke="#ddd"/>`);
    parts.push(
      `<text x="${MARGIN.left - 8}" y="${ty}" text-anchor="end" ` +
      `dominant-baseline="middle">${fmtTick(v)}</text>`);
  }
  parts.push(
    `<line x1="${MARGIN.left}" y1="${MARGIN.top}" x2="${MARGIN.left}" ` +
    `y2="${MARGIN.top + PLOT_H}" stroke="#333"/>`);

  groups.forEach((group, i) => {
    const cx = MARGIN.left + i * SLOT_W + SLOT_W / 2;
    const s = group.stats;
    const attrs =
      `data-group="${esc(group.key)}" data-n="${s.n}" data-lo="${s.lo}" ` +
      `data-q1="${s.q1}" data-median="${s.median}" data-q3="${s.q3}" ` +
      `data-hi="${s.hi}"`;
    const [xl, xr] = [cx - BOX_W / 2, cx + BOX_W / 2];
    const [yLo, yQ1, yMed, yQ3, yHi] =
      [s.lo, s.q1, s.median, s.q3, s.hi].map((v) => fmtCoord(y(v)));
    parts.push(`<g class="box" ${attrs}>`);
    parts.push(
      `<line x1="${cx}" y1="${yLo}" x2="${cx}" y2="${yQ1}" stroke="#333"/>`);
    parts.push(
      `<line x1="${cx}" y1="${yQ3}" x2="${cx}" y2="${yHi}" stroke="#333"/>`);
    for (const wy of [yLo, yHi]) {
      parts.push(
        `<line x1="${cx - BOX_W / 4}" y1="${wy}" x2="${cx + BOX_W / 4}" ` +
        `y2="${wy}" stroke="#333"/>`);
    }
    parts.push(
      `<rect x="${fmtCoord(xl)}" y="${yQ3}" width="${BOX_W}" ` +
      `height="${fmtCoord(Number(yQ1) - Number(yQ3))}" fill="#aecde1" ` +
      `stroke="#333"/>`);
    parts.push(
      `<line x1="${fmtCoord(xl)}" y1="${yMed}" x2="${fmtCoord(xr)}" ` +
      `y2="${yMed}" stroke="#9a2617" stroke-width="2"/>`);
    parts.push(
      `<text x="${cx}" y="${MARGIN.top + PLOT_H + 18}" ` +
      `text-anchor="middle">${esc(group.label)}</text>`);
    parts.push(`</g>`);
  });

  parts.push(`</svg>`);
  return parts.join("\n") + "\n";
}
