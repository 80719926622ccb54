/**
 * Run-bundle loading. A bundle is one run directory holding days.csv,
 * subjects.csv and summary.json with the columns listed in contract.ts.
 * Loading validates the header of every file and reports any mismatch
 * as an explicit column diff; it never writes to the input directory.
 */

import * as fs from "fs";
import * as path from "path";
import Papa from "papaparse";

import {
  DAY_COLUMNS,
  METRIC_FIELDS,
  SHARE_FIELDS,
  SUBJECT_COLUMNS,
  DayRow,
  MetricField,
  RunSummary,
  SubjectRow,
} from "./contract.js";

export interface RunBundle {
  dir: string;
  label: string;
  summary: RunSummary;
  days: DayRow[];
  subjects: SubjectRow[];
}

function columnDiff(expected: readonly string[], actual: string[]): string | null {
  const want = new Set(expected);
  const got = new Set(actual);
  const missing = expected.filter((c) => !got.has(c));
  const unexpected = actual.filter((c) => !want.has(c));
  if (missing.length === 0 && unexpected.length === 0) return null;
  return `missing [${missing.join(", ")}], unexpected [${unexpected.join(", ")}]`;
}

function parseCsv(filePath: string, expected: readonly string[]): Record<string, string>[] {
  if (!fs.existsSync(filePath)) {
    throw new Error(`${filePath}: file not found`);
  }
  const text = fs.readFileSync(filePath, "utf8");
  const parsed = Papa.parse<Record<string, string>>(text, {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0];
    throw new Error(`${filePath}: parse error at row ${first.row}: ${first.message}`);
  }
  const header = parsed.meta.fields ?? [];
  const diff = columnDiff(expected, header);
  if (diff !== null) {
    throw new Error(`${filePath}: column mismatch: ${diff}`);
  }
  return parsed.data;
}

function toNumber(cell: string, filePath: string, column: string): number {
  const v = Number(cell);
  if (cell.trim() === "" || Number.isNaN(v)) {
    if (cell.trim().toLowerCase() === "nan") return NaN;
    throw new Error(`${filePath}: non-numeric value "${cell}" in column ${column}`);
  }
  return v;
}

export function readDays(filePath: string): DayRow[] {
  const rows = parseCsv(filePath, DAY_COLUMNS);
  return rows.map((r) => {
    const out = {} as Record<string, number>;
    for (const col of DAY_COLUMNS) {
      out[col] = toNumber(r[col], filePath, col);
    }
    return out as unknown as DayRow;
  });
}

export function readSubjects(filePath: string): SubjectRow[] {
  const rows = parseCsv(filePath, SUBJECT_COLUMNS);
  return rows.map((r) => {
    const metrics = {} as Record<MetricField, number>;
    for (const f of METRIC_FIELDS) {
      metrics[f] = toNumber(r[f], filePath, f);
    }
    const shares = {} as SubjectRow["shares"];
    for (const f of SHARE_FIELDS) {
      shares[f] = toNumber(r[f], filePath, f);
    }
    const failedCell = (r.failed_day ?? "").trim();
    return {
      subject_id: toNumber(r.subject_id, filePath, "subject_id"),
      family: r.family,
      metrics,
      shares,
      failed_day: failedCell === "" ? null : Number(failedCell),
    };
  });
}

/**
 * The simulator serializes with Python's json module, which emits bare
 * NaN / Infinity tokens for non-finite floats. Strict JSON.parse rejects
 * those, so they are rewritten to null first and surface as NaN.
 */
function parseLooseJson(text: string): unknown {
  const cleaned = text.replace(/(?<=[:,[\s])-?(?:NaN|Infinity)(?=[,\]}\s])/g, "null");
  return JSON.parse(cleaned);
}

function statNumber(v: unknown): number {
  if (v === null) return NaN;
  if (typeof v !== "number") return NaN;
  return v;
}

export function readSummary(filePath: string): RunSummary {
  if (!fs.existsSync(filePath)) {
    throw new Error(`${filePath}: file not found`);
  }
  const raw = parseLooseJson(fs.readFileSync(filePath, "utf8"));
  if (typeof raw !== "object" || raw === null || Array.isArray(raw)) {
    throw new Error(`${filePath}: expected a JSON object`);
  }
  const obj = raw as Record<string, unknown>;
  if (typeof obj.scenario !== "string") {
    throw new Error(`${filePath}: missing scenario label`);
  }
  const metricsRaw = obj.metrics;
  if (typeof metricsRaw !== "object" || metricsRaw === null) {
    throw new Error(`${filePath}: missing metrics block`);
  }
  const present = Object.keys(metricsRaw as object);
  const diff = columnDiff(METRIC_FIELDS, present);
  if (diff !== null) {
    throw new Error(`${filePath}: metrics field mismatch: ${diff}`);
  }
  const metrics = {} as RunSummary["metrics"];
  for (const f of METRIC_FIELDS) {
    const stat = (metricsRaw as Record<string, Record<string, unknown>>)[f];
    metrics[f] = { mean: statNumber(stat.mean), iqr: statNumber(stat.iqr) };
  }
  return { ...obj, metrics } as RunSummary;
}

export function loadBundle(dir: string): RunBundle {
  if (!fs.existsSync(dir) || !fs.statSync(dir).isDirectory()) {
    throw new Error(`${dir}: run directory not found`);
  }
  const summary = readSummary(path.join(dir, "summary.json"));
  const days = readDays(path.join(dir, "days.csv"));
  const subjects = readSubjects(path.join(dir, "subjects.csv"));
  return { dir, label: summary.scenario, summary, days, subjects };
}

/**
 * Load several run directories. Duplicate scenario labels get the
 * directory basename appended so every row and figure file stays
 * distinct. Bundles come back sorted by label for stable output.
 */
export function loadBundles(dirs: string[]): RunBundle[] {
  const bundles = dirs.map(loadBundle);
  const counts = new Map<string, number>();
  for (const b of bundles) {
    counts.set(b.label, (counts.get(b.label) ?? 0) + 1);
  }
  for (const b of bundles) {
    if ((counts.get(b.label) ?? 0) > 1) {
      b.label = `${b.label}__${path.basename(path.resolve(b.dir))}`;
    }
  }
  bundles.sort((a, b) => (a.label < b.label ? -1 : a.label > b.label ? 1 : 0));
  return bundles;
}
