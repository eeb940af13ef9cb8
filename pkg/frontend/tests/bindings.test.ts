import { execFile } from "node:child_process";
import { mkdtemp, readFile, readdir, rm } from "node:fs/promises";
import { tmpdir } from "node:os";
import { dirname, join, resolve } from "node:path";
import { fileURLToPath } from "node:url";
import { promisify } from "node:util";

import { afterAll, describe, expect, it } from "vitest";

import {
  ConfigurationError,
  InfeasibleScheduleError,
  ManifoldError,
  compose,
  matrix,
} from "../src/index.js";

const execFileAsync = promisify(execFile);

const here = dirname(fileURLToPath(import.meta.url));
const DEMO_CONFIG = resolve(here, "..", "..", "configs", "demo.json");
const BINARY = process.env.MANIFOLD_BIN ?? "manifold";

const scratchDirs: string[] = [];

async function scratch(): Promise<string> {
  const dir = await mkdtemp(join(tmpdir(), "manifold-test-"));
  scratchDirs.push(dir);
  return dir;
}

afterAll(async () => {
  for (const dir of scratchDirs) {
    await rm(dir, { recursive: true, force: true });
  }
});

describe("matrix", () => {
  it("computes the symmetric case", async () => {
    const result = await matrix({
      sections: [
        { id: "A", weight: 1.0 },
        { id: "B", weight: 1.0 },
      ],
      grid: { marks: [0.0, 10.0, 20.0], weights: [1.0, 1.0] },
      affinity: [
        [1.0, 1.0],
        [1.0, 1.0],
      ],
    });
    expect(result.sections).toEqual(["A", "B"]);
    for (const row of result.masses) {
      for (const mass of row) {
        expect(mass).toBeCloseTo(0.25, 12);
      }
    }
  });

  it("computes the weighted case and its cumulative matrix", async () => {
    const result = await matrix({
      sections: [
        { id: "A", weight: 2.0 },
        { id: "B", weight: 1.0 },
      ],
      grid: { marks: [0.0, 1.0, 2.0], weights: [1.0, 3.0] },
      affinity: [
        [1.0, 1.0],
        [1.0, 1.0],
      ],
    });
    expect(result.masses[0][0]).toBeCloseTo(2 / 12, 12);
    expect(result.masses[0][1]).toBeCloseTo(6 / 12, 12);
    expect(result.masses[1][0]).toBeCloseTo(1 / 12, 12);
    expect(result.masses[1][1]).toBeCloseTo(3 / 12, 12);
    expect(result.cumulative[0][1]).toBeCloseTo(8 / 12, 12);
    expect(result.cumulative[1][1]).toBeCloseTo(1.0, 12);
  });

  it("rejects an all-zero affinity matrix", async () => {
    await expect(
      matrix({
        sections: [{ id: "A", weight: 1.0 }],
        grid: { marks: [0.0, 1.0], weights: [1.0] },
        affinity: [[0.0]],
      }),
    ).rejects.toBeInstanceOf(InfeasibleScheduleError);
  });
});

describe("compose", () => {
  it("rejects an invalid config with a field-path message", async () => {
    const attempt = compose({
      config: { piece: { name: "x", end: 1.0 } },
    });
    await expect(attempt).rejects.toBeInstanceOf(ConfigurationError);
    await attempt.catch((error: ManifoldError) => {
      expect(error.code).toBe(2);
      expect(error.message).toContain("instruments");
    });
  });

  it("renders one score string per requested variant", async () => {
    const { files } = await compose({
      config: DEMO_CONFIG,
      seed: 5,
      variants: 3,
      formats: ["sco"],
    });
    const scores = Object.keys(files).filter((name) => name.endsWith(".sco"));
    expect(scores).toEqual(["demo-v0.sco", "demo-v1.sco", "demo-v2.sco"]);
    for (const name of scores) {
      expect(files[name]).toMatch(/^; piece demo\n/);
    }
  });
});

describe("parity with the command line", () => {
  for (const seed of [1, 2]) {
    it(`matches CLI bytes for the demo config at seed ${seed}`, async () => {
      const outDir = join(await scratch(), "cli-out");
      await execFileAsync(BINARY, [
        "compose",
        "--config",
        DEMO_CONFIG,
        "--seed",
        String(seed),
        "--out",
        outDir,
      ]);

      const { files } = await compose({ config: DEMO_CONFIG, seed });

      const cliNames = (await readdir(outDir)).sort();
      expect(Object.keys(files).sort()).toEqual(cliNames);
      for (const name of cliNames) {
        const cliBytes = await readFile(join(outDir, name));
        expect(Buffer.from(files[name], "utf-8").equals(cliBytes)).toBe(true);
      }
    });
  }
});
