/**
 * Static SVG figures from a run bundle: per-day median lines with a
 * quantile band for glucose, dose and wellbeing score, plus a
 * per-subject scatter of fasting readings in the desired range. No
 * scripting, no interactivity, plain vector output.
 */

import * as fs from "fs";
import * as path from "path";

import { DayRow, SubjectRow } from "./contract.js";
import { RunBundle } from "./bundle.js";
import { quantile } from "./stats.js";

/** Wellbeing panels cover only the early titration window. */
export const WELLBEING_PANEL_MAX_DAY = 40;

export interface BandPoint {
  day: number;
  lo: number;
  med: number;
  hi: number;
}

export interface BandSpec {
  loPct: number;
  hiPct: number;
}

export const DEFAULT_BAND: BandSpec = { loPct: 25, hiPct: 75 };

/**
 * Collapse per-subject rows to one point per day: median plus the
 * requested quantile band across subjects. Days above maxDay are
 * dropped entirely.
 */
export function bandSeries(
  rows: DayRow[],
  column: keyof DayRow,
  band: BandSpec = DEFAULT_BAND,
  maxDay?: number
): BandPoint[] {
  if (band.loPct > band.hiPct) {
    throw new Error(`band quantiles out of order: ${band.loPct} > ${band.hiPct}`);
  }
  const byDay = new Map<number, number[]>();
  for (const r of rows) {
    if (maxDay !== undefined && r.day > maxDay) continue;
    const bucket = byDay.get(r.day);
    if (bucket) {
      bucket.push(r[column]);
    } else {
      byDay.set(r.day, [r[column]]);
    }
  }
  if (byDay.size === 0) {
    throw new Error(`no rows to plot for column ${String(column)}`);
  }
  const days = [...byDay.keys()].sort((a, b) => a - b);
  return days.map((day) => {
    const vals = byDay.get(day)!;
    return {
      day,
      lo: quantile(vals, band.loPct),
      med: quantile(vals, 50),
      hi: quantile(vals, band.hiPct),
    };
  });
}

interface Scale {
  (v: number): number;
}

function linearScale(d0: number, d1: number, r0: number, r1: number): Scale {
  const span = d1 - d0;
  return (v) => (span === 0 ? (r0 + r1) / 2 : r0 + ((v - d0) / span) * (r1 - r0));
}

function niceStep(span: number, target: number): number {
  const raw = span / target;
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  for (const m of [1, 2, 5]) {
    if (raw <= m * mag) return m * mag;
  }
  return 10 * mag;
}

function ticks(min: number, max: number, target = 5): number[] {
  if (max <= min) return [min];
  const step = niceStep(max - min, target);
  const first = Math.ceil(min / step - 1e-9);
  const out: number[] = [];
  for (let i = first; i * step <= max + 1e-9; i++) {
    out.push(Number((i * step).toPrecision(12)));
  }
  return out;
}

function px(v: number): string {
  return v.toFixed(2);
}

const W = 640;
const H = 360;
const MARGIN = { left: 56, right: 14, top: 30, bottom: 42 };

export interface PanelOptions {
  title: string;
  yLabel: string;
  /** force the x axis to end here; defaults to the last day in the series */
  xMax?: number;
}

/** One framed panel: quantile band, median line, axes with tick labels. */
export function panelSvg(series: BandPoint[], opts: PanelOptions): string {
  if (series.length === 0) {
    throw new Error("empty series");
  }
  const x0 = MARGIN.left;
  const x1 = W - MARGIN.right;
  const y0 = H - MARGIN.bottom;
  const y1 = MARGIN.top;

  const dayMin = series[0].day;
  const dayMax = opts.xMax ?? series[series.length - 1].day;
  let vMin = Math.min(...series.map((p) => p.lo));
  let vMax = Math.max(...series.map((p) => p.hi));
  if (vMin === vMax) {
    vMin -= 1;
    vMax += 1;
  } else {
    const pad = 0.05 * (vMax - vMin);
    vMin -= pad;
    vMax += pad;
  }

  const sx = linearScale(dayMin, dayMax, x0, x1);
  const sy = linearScale(vMin, vMax, y0, y1);

  const xTicks = ticks(dayMin, dayMax);
  if (xTicks[xTicks.length - 1] !== dayMax) {
    xTicks.push(dayMax);
  }
  const yTicks = ticks(vMin, vMax);

  const bandPath =
    "M" +
    series.map((p) => `${px(sx(p.day))},${px(sy(p.hi))}`).join(" L") +
    " L" +
    [...series]
      .reverse()
      .map((p) => `${px(sx(p.day))},${px(sy(p.lo))}`)
      .join(" L") +
    " Z";
  const medianLine = series.map((p) => `${px(sx(p.day))},${px(sy(p.med))}`).join(" ");

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${W} ${H}" ` +
      `font-family="sans-serif" font-size="12">`
  );
  parts.push(`<rect width="${W}" height="${H}" fill="white"/>`);
  parts.push(
    `<text x="${px(W / 2)}" y="18" text-anchor="middle" font-size="14">${opts.title}</text>`
  );
  parts.push(`<path d="${bandPath}" fill="#9ecae1" fill-opacity="0.55" stroke="none"/>`);
  parts.push(
    `<polyline points="${medianLine}" fill="none" stroke="#08519c" stroke-width="1.5"/>`
  );
  parts.push(`<line x1="${px(x0)}" y1="${px(y0)}" x2="${px(x1)}" y2="${px(y0)}" stroke="black"/>`);
  parts.push(`<line x1="${px(x0)}" y1="${px(y0)}" x2="${px(x0)}" y2="${px(y1)}" stroke="black"/>`);
  for (const t of xTicks) {
    const x = sx(t);
    parts.push(`<line x1="${px(x)}" y1="${px(y0)}" x2="${px(x)}" y2="${px(y0 + 5)}" stroke="black"/>`);
    parts.push(`<text x="${px(x)}" y="${px(y0 + 18)}" text-anchor="middle">${t}</text>`);
  }
  for (const t of yTicks) {
    const y = sy(t);
    parts.push(`<line x1="${px(x0 - 5)}" y1="${px(y)}" x2="${px(x0)}" y2="${px(y)}" stroke="black"/>`);
    parts.push(`<text x="${px(x0 - 8)}" y="${px(y + 4)}" text-anchor="end">${t}</text>`);
  }
  parts.push(
    `<text x="${px((x0 + x1) / 2)}" y="${px(H - 8)}" text-anchor="middle">day</text>`
  );
  parts.push(
    `<text x="14" y="${px((y0 + y1) / 2)}" text-anchor="middle" ` +
      `transform="rotate(-90 14 ${px((y0 + y1) / 2)})">${opts.yLabel}</text>`
  );
  parts.push("</svg>");
  return parts.join("\n") + "\n";
}

/** Per-subject share of fasting readings inside [4, 6] mmol/L. */
export function sharesScatterSvg(subjects: SubjectRow[], title: string): string {
  if (subjects.length === 0) {
    throw new Error("no subject rows");
  }
  const x0 = MARGIN.left;
  const x1 = W - MARGIN.right;
  const y0 = H - MARGIN.bottom;
  const y1 = MARGIN.top;
  const idMax = Math.max(...subjects.map((s) => s.subject_id));
  const sx = linearScale(0, Math.max(idMax, 1), x0, x1);
  const sy = linearScale(0, 100, y0, y1);

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${W} ${H}" ` +
      `font-family="sans-serif" font-size="12">`
  );
  parts.push(`<rect width="${W}" height="${H}" fill="white"/>`);
  parts.push(
    `<text x="${px(W / 2)}" y="18" text-anchor="middle" font-size="14">${title}</text>`
  );
  parts.push(`<line x1="${px(x0)}" y1="${px(y0)}" x2="${px(x1)}" y2="${px(y0)}" stroke="black"/>`);
  parts.push(`<line x1="${px(x0)}" y1="${px(y0)}" x2="${px(x0)}" y2="${px(y1)}" stroke="black"/>`);
  for (const t of [0, 25, 50, 75, 100]) {
    const y = sy(t);
    parts.push(`<line x1="${px(x0 - 5)}" y1="${px(y)}" x2="${px(x0)}" y2="${px(y)}" stroke="black"/>`);
    parts.push(`<text x="${px(x0 - 8)}" y="${px(y + 4)}" text-anchor="end">${t}</text>`);
  }
  for (const t of ticks(0, Math.max(idMax, 1))) {
    const x = sx(t);
    parts.push(`<line x1="${px(x)}" y1="${px(y0)}" x2="${px(x)}" y2="${px(y0 + 5)}" stroke="black"/>`);
    parts.push(`<text x="${px(x)}" y="${px(y0 + 18)}" text-anchor="middle">${t}</text>`);
  }
  for (const s of subjects) {
    const v = s.shares.fbg_in_4_6_pct;
    if (Number.isNaN(v)) continue;
    parts.push(`<circle cx="${px(sx(s.subject_id))}" cy="${px(sy(v))}" r="2.5" fill="#08519c"/>`);
  }
  parts.push(
    `<text x="${px((x0 + x1) / 2)}" y="${px(H - 8)}" text-anchor="middle">subject</text>`
  );
  parts.push(
    `<text x="14" y="${px((y0 + y1) / 2)}" text-anchor="middle" ` +
      `transform="rotate(-90 14 ${px((y0 + y1) / 2)})">FBG in [4,6] % of days</text>`
  );
  parts.push("</svg>");
  return parts.join("\n") + "\n";
}

/**
 * Write the default figure set for one bundle. The wellbeing panel is
 * cut at day 40; glucose and dose panels span the whole run.
 */
export function renderTimeseries(
  bundle: RunBundle,
  outDir: string,
  band: BandSpec = DEFAULT_BAND
): string[] {
  fs.mkdirSync(outDir, { recursive: true });
  const paths: string[] = [];

  const panels: Array<{ file: string; column: keyof DayRow; title: string; yLabel: string; maxDay?: number }> = [
    { file: "bg.svg", column: "fbg_true", title: `${bundle.label}: fasting blood glucose`, yLabel: "BG mmol/L" },
    { file: "dose.svg", column: "dose_u", title: `${bundle.label}: insulin dose`, yLabel: "dose U" },
    {
      file: "phg.svg",
      column: "y_s",
      title: `${bundle.label}: reported PHG score`,
      yLabel: "PHG score",
      maxDay: WELLBEING_PANEL_MAX_DAY,
    },
  ];
  for (const p of panels) {
    const series = bandSeries(bundle.days, p.column, band, p.maxDay);
    const svg = panelSvg(series, { title: p.title, yLabel: p.yLabel });
    const out = path.join(outDir, `${bundle.label}_${p.file}`);
    fs.writeFileSync(out, svg);
    paths.push(out);
  }

  const scatter = sharesScatterSvg(
    bundle.subjects,
    `${bundle.label}: fasting readings in range by subject`
  );
  const scatterPath = path.join(outDir, `${bundle.label}_fbg_shares.svg`);
  fs.writeFileSync(scatterPath, scatter);
  paths.push(scatterPath);

  return paths;
}
