import * as fs from "fs";
import * as os from "os";
import * as path from "path";
import { fileURLToPath } from "url";

import { describe, expect, it } from "vitest";

import { loadBundle } from "../src/bundle.js";
import {
  WELLBEING_PANEL_MAX_DAY,
  bandSeries,
  panelSvg,
  renderTimeseries,
  sharesScatterSvg,
} from "../src/figures.js";

const FIXTURES = fileURLToPath(new URL("./fixtures", import.meta.url));

function tmpDir(): string {
  return fs.mkdtempSync(path.join(os.tmpdir(), "report-fig-"));
}

const flat = loadBundle(path.join(FIXTURES, "flat"));

describe("bandSeries", () => {
  it("collapses a constant signal to a zero-width band", () => {
    const series = bandSeries(flat.days, "fbg_true");
    expect(series).toHaveLength(60);
    for (const p of series) {
      expect(p.lo).toBe(5.5);
      expect(p.med).toBe(5.5);
      expect(p.hi).toBe(5.5);
    }
  });

  it("spans min and max per day under the 0-100 band option", () => {
    const series = bandSeries(flat.days, "y_s", { loPct: 0, hiPct: 100 });
    const byDay = new Map<number, number[]>();
    for (const r of flat.days) {
      byDay.set(r.day, [...(byDay.get(r.day) ?? []), r.y_s]);
    }
    for (const p of series) {
      const vals = byDay.get(p.day)!;
      expect(vals).toHaveLength(2);
      expect(p.lo).toBe(Math.min(...vals));
      expect(p.hi).toBe(Math.max(...vals));
    }
  });

  it("interpolates the default 25-75 band between two subjects", () => {
    const series = bandSeries(flat.days, "y_s");
    const byDay = new Map<number, number[]>();
    for (const r of flat.days) {
      byDay.set(r.day, [...(byDay.get(r.day) ?? []), r.y_s]);
    }
    for (const p of series) {
      const [a, b] = byDay.get(p.day)!.sort((x, y) => x - y);
      expect(p.lo).toBeCloseTo(a + 0.25 * (b - a), 12);
      expect(p.hi).toBeCloseTo(a + 0.75 * (b - a), 12);
      expect(p.med).toBeCloseTo((a + b) / 2, 12);
    }
  });

  it("drops days past the cutoff", () => {
    const series = bandSeries(flat.days, "y_s", undefined, WELLBEING_PANEL_MAX_DAY);
    expect(series).toHaveLength(40);
    expect(series[series.length - 1].day).toBe(40);
  });

  it("rejects an inverted band and empty input", () => {
    expect(() => bandSeries(flat.days, "y_s", { loPct: 80, hiPct: 20 })).toThrow(/out of order/);
    expect(() => bandSeries([], "y_s")).toThrow(/no rows/);
  });
});

describe("panelSvg", () => {
  it("draws a flat median as a single horizontal line", () => {
    const series = bandSeries(flat.days, "fbg_true");
    const svg = panelSvg(series, { title: "bg", yLabel: "mmol/L" });
    const match = svg.match(/<polyline points="([^"]+)"/);
    expect(match).not.toBeNull();
    const ys = new Set(match![1].split(" ").map((pt) => pt.split(",")[1]));
    expect(ys.size).toBe(1);
  });

  it("collapses the band path to the median for zero spread", () => {
    const series = bandSeries(flat.days, "fbg_true");
    const svg = panelSvg(series, { title: "bg", yLabel: "mmol/L" });
    const d = svg.match(/<path d="([^"]+)"/)![1];
    const coords = d
      .replace(/[MZ]/g, "")
      .split(/ ?L/)
      .map((pt) => pt.trim())
      .filter((pt) => pt.length > 0)
      .map((pt) => pt.split(","));
    expect(coords).toHaveLength(120);
    const ys = new Set(coords.map((c) => c[1]));
    expect(ys.size).toBe(1);
  });

  it("refuses an empty series", () => {
    expect(() => panelSvg([], { title: "t", yLabel: "y" })).toThrow(/empty/);
  });
});

describe("renderTimeseries", () => {
  it("writes the four figure files for a bundle", () => {
    const out = tmpDir();
    const written = renderTimeseries(flat, out);
    expect(written.map((p) => path.basename(p))).toEqual([
      "flat_bg.svg",
      "flat_dose.svg",
      "flat_phg.svg",
      "flat_fbg_shares.svg",
    ]);
    for (const p of written) {
      expect(fs.existsSync(p)).toBe(true);
      expect(fs.readFileSync(p, "utf8")).toContain("</svg>");
    }
  });

  it("ends the wellbeing panel axis at day 40 on a 60 day run", () => {
    const out = tmpDir();
    renderTimeseries(flat, out);
    const phg = fs.readFileSync(path.join(out, "flat_phg.svg"), "utf8");
    expect(phg).toContain(">40<");
    expect(phg).not.toContain(">50<");
    expect(phg).not.toContain(">60<");
    const bg = fs.readFileSync(path.join(out, "flat_bg.svg"), "utf8");
    expect(bg).toContain(">60<");
  });
});

describe("sharesScatterSvg", () => {
  it("draws one dot per subject", () => {
    const svg = sharesScatterSvg(flat.subjects, "shares");
    const dots = svg.match(/<circle /g) ?? [];
    expect(dots).toHaveLength(2);
  });

  it("skips subjects without metrics", () => {
    const subjects = structuredClone(flat.subjects);
    subjects[0].shares.fbg_in_4_6_pct = NaN;
    const svg = sharesScatterSvg(subjects, "shares");
    expect(svg.match(/<circle /g) ?? []).toHaveLength(1);
  });
});
