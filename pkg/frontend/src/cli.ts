#!/usr/bin/env node
/**
 * Batch report tool over simulator run directories.
 *
 * Usage:
 *   titrasim-report report --runs DIR [DIR ...] --out DIR [--band LO,HI]
 *
 * Reads each run directory (days.csv, subjects.csv, summary.json),
 * writes a combined summary table as markdown and CSV plus one figure
 * set per run into the output directory. Inputs are never modified and
 * re-runs produce byte-identical output. Single process, no services.
 */

import * as fs from "fs";
import * as path from "path";
import { fileURLToPath } from "url";

import { loadBundles } from "./bundle.js";
import { renderSummaryTable } from "./table.js";
import { BandSpec, DEFAULT_BAND, renderTimeseries } from "./figures.js";

const USAGE = "usage: titrasim-report report --runs DIR [DIR ...] --out DIR [--band LO,HI]";

interface ReportArgs {
  runs: string[];
  out: string;
  band: BandSpec;
}

function parseBand(text: string): BandSpec {
  const parts = text.split(",").map((s) => Number(s.trim()));
  if (parts.length !== 2 || parts.some((v) => Number.isNaN(v))) {
    throw new Error(`--band expects LO,HI percentiles, got "${text}"`);
  }
  return { loPct: parts[0], hiPct: parts[1] };
}

function parseReportArgs(argv: string[]): ReportArgs {
  const runs: string[] = [];
  let out: string | null = null;
  let band: BandSpec = DEFAULT_BAND;
  let i = 0;
  while (i < argv.length) {
    const tok = argv[i];
    if (tok === "--runs") {
      i++;
      while (i < argv.length && !argv[i].startsWith("--")) {
        runs.push(argv[i]);
        i++;
      }
      continue;
    }
    if (tok === "--out") {
      if (i + 1 >= argv.length) throw new Error("--out needs a directory");
      out = argv[i + 1];
      i += 2;
      continue;
    }
    if (tok === "--band") {
      if (i + 1 >= argv.length) throw new Error("--band needs LO,HI");
      band = parseBand(argv[i + 1]);
      i += 2;
      continue;
    }
    throw new Error(`unknown argument "${tok}"`);
  }
  if (runs.length === 0) throw new Error("--runs needs at least one run directory");
  if (out === null) throw new Error("--out is required");
  return { runs, out, band };
}

export function main(argv: string[]): number {
  if (argv.length === 0 || argv[0] !== "report") {
    console.error(USAGE);
    return 2;
  }
  let args: ReportArgs;
  try {
    args = parseReportArgs(argv.slice(1));
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    console.error(USAGE);
    return 2;
  }

  try {
    const bundles = loadBundles(args.runs);
    fs.mkdirSync(args.out, { recursive: true });

    const table = renderSummaryTable(bundles);
    const mdPath = path.join(args.out, "summary_table.md");
    const csvPath = path.join(args.out, "summary_table.csv");
    fs.writeFileSync(mdPath, table.markdown);
    fs.writeFileSync(csvPath, table.csv);
    console.log(`wrote ${mdPath}`);
    console.log(`wrote ${csvPath}`);

    for (const bundle of bundles) {
      for (const figPath of renderTimeseries(bundle, args.out, args.band)) {
        console.log(`wrote ${figPath}`);
      }
    }
    return 0;
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return 1;
  }
}

const entry = process.argv[1] ? path.resolve(process.argv[1]) : "";
if (entry && fileURLToPath(import.meta.url) === entry) {
  process.exit(main(process.argv.slice(2)));
}
