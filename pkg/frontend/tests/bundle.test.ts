import * as fs from "fs";
import * as os from "os";
import * as path from "path";
import { fileURLToPath } from "url";

import { describe, expect, it } from "vitest";

import { loadBundle, loadBundles, readDays, readSummary } from "../src/bundle.js";
import { METRIC_FIELDS } from "../src/contract.js";

const FIXTURES = fileURLToPath(new URL("./fixtures", import.meta.url));

function tmpDir(): string {
  return fs.mkdtempSync(path.join(os.tmpdir(), "report-test-"));
}

describe("loadBundle", () => {
  it("loads a complete run directory", () => {
    const b = loadBundle(path.join(FIXTURES, "runA"));
    expect(b.label).toBe("adaos");
    expect(b.summary.n_days).toBe(4);
    expect(b.days).toHaveLength(8);
    expect(b.subjects).toHaveLength(2);
    for (const f of METRIC_FIELDS) {
      expect(typeof b.summary.metrics[f].mean).toBe("number");
      expect(typeof b.summary.metrics[f].iqr).toBe("number");
    }
  });

  it("types day rows as numbers", () => {
    const b = loadBundle(path.join(FIXTURES, "runA"));
    const first = b.days[0];
    expect(first.subject_id).toBe(0);
    expect(first.day).toBe(1);
    expect(first.dose_u).toBe(12);
    expect(first.fbg_true).toBeCloseTo(8.4, 12);
  });

  it("keeps an empty failed_day as null", () => {
    const b = loadBundle(path.join(FIXTURES, "runA"));
    expect(b.subjects[0].failed_day).toBeNull();
  });

  it("rejects a missing directory", () => {
    expect(() => loadBundle(path.join(FIXTURES, "no_such_run"))).toThrow(/not found/);
  });
});

describe("schema validation", () => {
  it("reports missing and unexpected columns as a diff", () => {
    const dir = tmpDir();
    const bad = path.join(dir, "days.csv");
    fs.writeFileSync(
      bad,
      "subject_id,day,dose_u,fbg_true,fbg_meas,x_s,k_p_hat,k_s_hat,cost_total,extra\n" +
        "0,1,1,5,5,0.5,0.3,1,1,9\n"
    );
    expect(() => readDays(bad)).toThrow(/missing \[y_s\], unexpected \[extra\]/);
  });

  it("reports a missing file with its path", () => {
    const p = path.join(tmpDir(), "days.csv");
    expect(() => readDays(p)).toThrow(new RegExp(p.replace(/[/\\]/g, ".")));
  });

  it("rejects non-numeric cells with column context", () => {
    const dir = tmpDir();
    const bad = path.join(dir, "days.csv");
    fs.writeFileSync(
      bad,
      "subject_id,day,dose_u,fbg_true,fbg_meas,y_s,x_s,k_p_hat,k_s_hat,cost_total\n" +
        "0,1,oops,5,5,8,0.5,0.3,1,1\n"
    );
    expect(() => readDays(bad)).toThrow(/non-numeric value "oops" in column dose_u/);
  });

  it("reports metric field mismatches in summary.json", () => {
    const dir = tmpDir();
    const p = path.join(dir, "summary.json");
    fs.writeFileSync(p, JSON.stringify({ scenario: "x", metrics: { tir_pct: { mean: 1, iqr: 0 } } }));
    expect(() => readSummary(p)).toThrow(/metrics field mismatch: missing \[tar1_pct/);
  });
});

describe("summary parsing", () => {
  it("accepts bare NaN tokens from the simulator serializer", () => {
    const dir = tmpDir();
    const p = path.join(dir, "summary.json");
    const metrics = METRIC_FIELDS.map((f) => `"${f}": {"iqr": 0.0, "mean": NaN}`).join(", ");
    fs.writeFileSync(p, `{"scenario": "x", "metrics": {${metrics}}, "max_cond_p": Infinity}\n`);
    const s = readSummary(p);
    expect(Number.isNaN(s.metrics.tir_pct.mean)).toBe(true);
    expect(s.metrics.tir_pct.iqr).toBe(0);
  });
});

describe("loadBundles", () => {
  it("sorts bundles by scenario label regardless of argument order", () => {
    const bundles = loadBundles([path.join(FIXTURES, "runB"), path.join(FIXTURES, "runA")]);
    expect(bundles.map((b) => b.label)).toEqual(["adaos", "step"]);
  });

  it("disambiguates duplicate labels with the directory name", () => {
    const copy = path.join(tmpDir(), "runA_copy");
    fs.cpSync(path.join(FIXTURES, "runA"), copy, { recursive: true });
    const bundles = loadBundles([path.join(FIXTURES, "runA"), copy]);
    const labels = bundles.map((b) => b.label);
    expect(new Set(labels).size).toBe(2);
    expect(labels.every((l) => l.startsWith("adaos"))).toBe(true);
  });
});
