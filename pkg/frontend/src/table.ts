/**
 * Cohort summary table, one row per run, rendered twice from the same
 * cells: markdown for reading and CSV for diffing. Every number is the
 * mean or IQR taken verbatim from the run's summary.json; nothing is
 * recomputed here, so table and summary can never drift apart.
 */

import {
  GLUCOSE_TARGETS,
  METRIC_FIELDS,
  METRIC_LABELS,
  meetsTarget,
  targetLabel,
} from "./contract.js";
import { RunBundle } from "./bundle.js";

export interface SummaryTable {
  markdown: string;
  csv: string;
  /** flagged metric names per run label, table row order */
  flags: Map<string, string[]>;
}

/** Shortest decimal string that parses back to the same double. */
function fmt(v: number): string {
  return String(v);
}

export function renderSummaryTable(bundles: RunBundle[]): SummaryTable {
  if (bundles.length === 0) {
    throw new Error("summary table needs at least one run bundle");
  }

  const flags = new Map<string, string[]>();
  for (const b of bundles) {
    const out: string[] = [];
    for (const f of METRIC_FIELDS) {
      const rule = GLUCOSE_TARGETS[f];
      if (rule && !meetsTarget(rule, b.summary.metrics[f].mean)) {
        out.push(f);
      }
    }
    flags.set(b.label, out);
  }

  const mdHeader = ["Scenario"];
  for (const f of METRIC_FIELDS) {
    mdHeader.push(`${METRIC_LABELS[f]} mean`, `${METRIC_LABELS[f]} IQR`);
  }
  const mdTargets = ["target"];
  for (const f of METRIC_FIELDS) {
    const rule = GLUCOSE_TARGETS[f];
    mdTargets.push(rule ? targetLabel(rule) : "", "");
  }
  const mdRows = bundles.map((b) => {
    const flagged = new Set(flags.get(b.label));
    const row = [b.label];
    for (const f of METRIC_FIELDS) {
      const stat = b.summary.metrics[f];
      row.push(flagged.has(f) ? `${fmt(stat.mean)}*` : fmt(stat.mean));
      row.push(fmt(stat.iqr));
    }
    return row;
  });

  const mdLine = (cells: string[]) => `| ${cells.join(" | ")} |`;
  const markdown = [
    mdLine(mdHeader),
    mdLine(mdHeader.map(() => "---")),
    mdLine(mdTargets),
    ...mdRows.map(mdLine),
    "",
    "Values marked * fall outside their target.",
    "",
  ].join("\n");

  const csvHeader = ["scenario"];
  for (const f of METRIC_FIELDS) {
    csvHeader.push(`${f}_mean`, `${f}_iqr`);
  }
  csvHeader.push("out_of_target");
  const csvRows = bundles.map((b) => {
    const row = [b.label];
    for (const f of METRIC_FIELDS) {
      const stat = b.summary.metrics[f];
      row.push(fmt(stat.mean), fmt(stat.iqr));
    }
    row.push((flags.get(b.label) ?? []).join(";"));
    return row.join(",");
  });
  const csv = [csvHeader.join(","), ...csvRows, ""].join("\n");

  return { markdown, csv, flags };
}
