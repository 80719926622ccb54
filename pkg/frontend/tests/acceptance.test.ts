// End-to-end gate for the report tool. Each test prints one verdict
// line so a log scan shows what held. Tolerances are pinned here and
// nowhere else.

import * as crypto from "crypto";
import * as fs from "fs";
import * as os from "os";
import * as path from "path";
import { fileURLToPath } from "url";

import { describe, expect, it } from "vitest";

import { main } from "../src/cli.js";
import { METRIC_FIELDS } from "../src/contract.js";

const FIXTURES = fileURLToPath(new URL("./fixtures", import.meta.url));
const TOL = 1e-9;

function tmpDir(): string {
  return fs.mkdtempSync(path.join(os.tmpdir(), "report-acc-"));
}

function verdict(tag: string, ok: boolean, detail: string): void {
  console.log(`[${tag}] ${ok ? "PASS" : "FAIL"} ${detail}`);
}

function hashTree(dir: string): Map<string, string> {
  const out = new Map<string, string>();
  for (const entry of (fs.readdirSync(dir, { recursive: true }) as string[]).sort()) {
    const p = path.join(dir, entry);
    if (fs.statSync(p).isFile()) {
      out.set(entry, crypto.createHash("sha256").update(fs.readFileSync(p)).digest("hex"));
    }
  }
  return out;
}

describe("acceptance", () => {
  it("c14 table values equal the fixture summaries within 1e-9", () => {
    const out = tmpDir();
    const code = main([
      "report",
      "--runs",
      path.join(FIXTURES, "runA"),
      path.join(FIXTURES, "runB"),
      "--out",
      out,
    ]);
    expect(code).toBe(0);

    // independent route: raw JSON.parse of the fixtures, not the loader
    const fixture: Record<string, any> = {
      adaos: JSON.parse(fs.readFileSync(path.join(FIXTURES, "runA", "summary.json"), "utf8")),
      step: JSON.parse(fs.readFileSync(path.join(FIXTURES, "runB", "summary.json"), "utf8")),
    };

    const lines = fs.readFileSync(path.join(out, "summary_table.csv"), "utf8").trim().split("\n");
    const header = lines[0].split(",");
    let worst = 0;
    let cells = 0;
    for (const line of lines.slice(1)) {
      const row = line.split(",");
      const want = fixture[row[0]];
      expect(want).toBeDefined();
      for (const f of METRIC_FIELDS) {
        for (const stat of ["mean", "iqr"] as const) {
          const cell = Number(row[header.indexOf(`${f}_${stat}`)]);
          const gap = Math.abs(cell - want.metrics[f][stat]);
          worst = Math.max(worst, gap);
          cells++;
        }
      }
    }
    const ok = worst <= TOL && cells === 2 * 2 * METRIC_FIELDS.length;
    verdict("C14", ok, `table pass-through, ${cells} cells, worst gap = ${worst.toExponential(2)}`);
    expect(cells).toBe(48);
    expect(worst).toBeLessThanOrEqual(TOL);
  });

  it("c14 wellbeing panel truncates at day 40", () => {
    const out = tmpDir();
    expect(main(["report", "--runs", path.join(FIXTURES, "flat"), "--out", out])).toBe(0);
    const phg = fs.readFileSync(path.join(out, "flat_phg.svg"), "utf8");
    const bg = fs.readFileSync(path.join(out, "flat_bg.svg"), "utf8");
    const ok = phg.includes(">40<") && !phg.includes(">50<") && !phg.includes(">60<") && bg.includes(">60<");
    verdict("C14", ok, "wellbeing axis ends at 40 while the glucose axis runs to 60");
    expect(ok).toBe(true);
  });

  it("c14 re-running the report is byte-idempotent", () => {
    const out = tmpDir();
    const argv = [
      "report",
      "--runs",
      path.join(FIXTURES, "runA"),
      path.join(FIXTURES, "runB"),
      path.join(FIXTURES, "flat"),
      "--out",
      out,
    ];
    const inputsBefore = hashTree(FIXTURES);
    expect(main(argv)).toBe(0);
    const first = hashTree(out);
    expect(main(argv)).toBe(0);
    const second = hashTree(out);
    const sameOutputs =
      first.size === second.size && [...first].every(([k, v]) => second.get(k) === v);
    const inputsUntouched = [...hashTree(FIXTURES)].every(
      ([k, v]) => inputsBefore.get(k) === v
    );
    verdict(
      "C14",
      sameOutputs && inputsUntouched,
      `${first.size} files byte-identical across re-run, inputs untouched`
    );
    expect(sameOutputs).toBe(true);
    expect(inputsUntouched).toBe(true);
  });
});
