import * as crypto from "crypto";
import * as fs from "fs";
import * as os from "os";
import * as path from "path";
import { fileURLToPath } from "url";

import { describe, expect, it } from "vitest";

import { main } from "../src/cli.js";

const FIXTURES = fileURLToPath(new URL("./fixtures", import.meta.url));

function tmpDir(): string {
  return fs.mkdtempSync(path.join(os.tmpdir(), "report-cli-"));
}

function hashTree(dir: string): Map<string, string> {
  const out = new Map<string, string>();
  for (const entry of fs.readdirSync(dir, { recursive: true }) as string[]) {
    const p = path.join(dir, entry);
    if (fs.statSync(p).isFile()) {
      out.set(entry, crypto.createHash("sha256").update(fs.readFileSync(p)).digest("hex"));
    }
  }
  return out;
}

describe("report command", () => {
  it("writes the table pair and one figure set per run", () => {
    const out = tmpDir();
    const code = main(["report", "--runs", path.join(FIXTURES, "runA"), path.join(FIXTURES, "runB"), "--out", out]);
    expect(code).toBe(0);
    const files = fs.readdirSync(out).sort();
    expect(files).toEqual([
      "adaos_bg.svg",
      "adaos_dose.svg",
      "adaos_fbg_shares.svg",
      "adaos_phg.svg",
      "step_bg.svg",
      "step_dose.svg",
      "step_fbg_shares.svg",
      "step_phg.svg",
      "summary_table.csv",
      "summary_table.md",
    ]);
  });

  it("never touches the input directories", () => {
    const before = hashTree(FIXTURES);
    const out = tmpDir();
    expect(main(["report", "--runs", path.join(FIXTURES, "runA"), "--out", out])).toBe(0);
    expect(hashTree(FIXTURES)).toEqual(before);
  });

  it("honours the band option", () => {
    const narrow = tmpDir();
    const wide = tmpDir();
    expect(main(["report", "--runs", path.join(FIXTURES, "flat"), "--out", narrow])).toBe(0);
    expect(main(["report", "--runs", path.join(FIXTURES, "flat"), "--out", wide, "--band", "0,100"])).toBe(0);
    const a = fs.readFileSync(path.join(narrow, "flat_phg.svg"), "utf8");
    const b = fs.readFileSync(path.join(wide, "flat_phg.svg"), "utf8");
    expect(a).not.toBe(b);
  });

  it("rejects usage errors with exit code 2", () => {
    expect(main([])).toBe(2);
    expect(main(["render"])).toBe(2);
    expect(main(["report", "--out", tmpDir()])).toBe(2);
    expect(main(["report", "--runs", path.join(FIXTURES, "runA")])).toBe(2);
    expect(main(["report", "--runs", path.join(FIXTURES, "runA"), "--out", tmpDir(), "--band", "x"])).toBe(2);
    expect(main(["report", "--runs", path.join(FIXTURES, "runA"), "--out", tmpDir(), "--oops"])).toBe(2);
  });

  it("fails with exit code 1 on a bad run directory", () => {
    expect(main(["report", "--runs", path.join(FIXTURES, "missing_run"), "--out", tmpDir()])).toBe(1);
  });
});
