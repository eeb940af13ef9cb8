/**
 * Bindings for the `manifold` composition engine.
 *
 * The engine is driven entirely through its command line interface: this
 * module spawns the binary, routes JSON in, and returns rendered score
 * text and matrix data back as plain objects.  Nothing here reaches into
 * the engine's internals, so any interpreter with the same CLI contract
 * works as a drop-in backend.
 *
 * The binary is resolved from the MANIFOLD_BIN environment variable,
 * falling back to `manifold` on PATH.
 */

import { execFile } from "node:child_process";
import { mkdtemp, readFile, readdir, rm, writeFile } from "node:fs/promises";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { promisify } from "node:util";

const execFileAsync = promisify(execFile);

/** Exit codes documented by the CLI. */
export enum ExitCode {
  Ok = 0,
  ConfigError = 2,
  Infeasible = 3,
  OutputError = 4,
}

/** Base class for every error raised by these bindings. */
export class ManifoldError extends Error {
  /** Exit code reported by the engine process. */
  readonly code: number;

  constructor(code: number, message: string) {
    super(message);
    this.name = new.target.name;
    this.code = code;
  }
}

/** The configuration was rejected (exit code 2). */
export class ConfigurationError extends ManifoldError {}

/** No feasible schedule exists for the piece (exit code 3). */
export class InfeasibleScheduleError extends ManifoldError {}

/** The output location could not be written (exit code 4). */
export class OutputError extends ManifoldError {}

export interface ComposeOptions {
  /** Piece configuration: a path to a JSON file or the parsed object. */
  config: string | object;
  /** Base seed; overrides the seed stored in the config. */
  seed?: number;
  /** Number of variants; overrides the count stored in the config. */
  variants?: number;
  /** Output formats (default: sco and txt). */
  formats?: string[];
}

export interface ComposeResult {
  /** Rendered output keyed by file name, e.g. "demo-v0.sco". */
  files: Record<string, string>;
}

export interface MatrixSpec {
  sections: { id: string; weight: number }[];
  grid: { marks: number[]; weights: number[] };
  affinity: number[][];
}

export interface MatrixResult {
  /** Section ids, in declaration order (matrix rows). */
  sections: string[];
  /** Time marks; starts are drawn from all but the final mark. */
  marks: number[];
  /** Cell start probabilities, rows by section, columns by mark. */
  masses: number[][];
  /** Cumulative probability over the leading i rows and j columns. */
  cumulative: number[][];
}

function binaryPath(): string {
  return process.env.MANIFOLD_BIN ?? "manifold";
}

interface RunFailure {
  code?: number;
  stderr?: string;
  message?: string;
}

async function runEngine(args: string[]): Promise<string> {
  try {
    const { stdout } = await execFileAsync(binaryPath(), args, {
      maxBuffer: 64 * 1024 * 1024,
    });
    return stdout;
  } catch (error) {
    const failure = error as RunFailure;
    const detail = (failure.stderr ?? failure.message ?? "").trim();
    switch (failure.code) {
      case ExitCode.ConfigError:
        throw new ConfigurationError(ExitCode.ConfigError, detail);
      case ExitCode.Infeasible:
        throw new InfeasibleScheduleError(ExitCode.Infeasible, detail);
      case ExitCode.OutputError:
        throw new OutputError(ExitCode.OutputError, detail);
      default:
        throw new ManifoldError(
          typeof failure.code === "number" ? failure.code : -1,
          detail || "engine invocation failed",
        );
    }
  }
}

async function withScratchDir<T>(
  work: (dir: string) => Promise<T>,
): Promise<T> {
  const dir = await mkdtemp(join(tmpdir(), "manifold-"));
  try {
    return await work(dir);
  } finally {
    await rm(dir, { recursive: true, force: true });
  }
}

/**
 * Compose piece variants and return every rendered file as a string.
 *
 * Output bytes are identical to what `manifold compose` writes for the
 * same config and seed.
 */
export async function compose(options: ComposeOptions): Promise<ComposeResult> {
  return withScratchDir(async (dir) => {
    let configPath: string;
    if (typeof options.config === "string") {
      configPath = options.config;
    } else {
      configPath = join(dir, "config.json");
      await writeFile(configPath, JSON.stringify(options.config), "utf-8");
    }
    const outDir = join(dir, "out");
    const args = ["compose", "--config", configPath, "--out", outDir];
    if (options.seed !== undefined) {
      args.push("--seed", String(options.seed));
    }
    if (options.variants !== undefined) {
      args.push("--variants", String(options.variants));
    }
    if (options.formats !== undefined) {
      args.push("--format", options.formats.join(","));
    }
    await runEngine(args);
    const files: Record<string, string> = {};
    for (const name of (await readdir(outDir)).sort()) {
      files[name] = await readFile(join(outDir, name), "utf-8");
    }
    return { files };
  });
}

/**
 * Build the section-start probability matrix for a sections/grid/affinity
 * input, returning per-cell masses and the cumulative matrix.
 */
export async function matrix(spec: MatrixSpec): Promise<MatrixResult> {
  return withScratchDir(async (dir) => {
    const inputPath = join(dir, "matrix.json");
    await writeFile(inputPath, JSON.stringify(spec), "utf-8");
    const stdout = await runEngine(["matrix", "--input", inputPath]);
    return JSON.parse(stdout) as MatrixResult;
  });
}
