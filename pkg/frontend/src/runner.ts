/**
 * Subprocess plumbing: every numeric operation is delegated to the
 * solver CLI; matrices cross the boundary as RDM1 files in a temp
 * directory (copy-in / copy-out).
 */

import { execFileSync } from "node:child_process";
import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";

import { Matrix, decodeRdm, encodeRdm } from "./matrix";

/** CLI executable; override with the LRFUSION_CLI environment variable. */
export function cliPath(): string {
  return process.env.LRFUSION_CLI ?? "lrfusion";
}

/** Run the CLI, returning stdout; a nonzero exit becomes a thrown Error. */
export function runCli(args: string[]): string {
  try {
    return execFileSync(cliPath(), args, {
      encoding: "utf8",
      stdio: ["ignore", "pipe", "pipe"],
    });
  } catch (err) {
    const e = err as { status?: number | null; stderr?: string | Buffer; message?: string };
    const stderr = e.stderr ? e.stderr.toString().trim() : "";
    const status = e.status ?? null;
    if (status === null && !stderr) {
      throw new Error(`failed to run ${cliPath()}: ${e.message ?? String(err)}`);
    }
    throw new Error(`${cliPath()} exited with status ${status}${stderr ? `: ${stderr}` : ""}`);
  }
}

export function withTempDir<T>(fn: (dir: string) => T): T {
  const dir = fs.mkdtempSync(path.join(os.tmpdir(), "lrfusion-"));
  try {
    return fn(dir);
  } finally {
    fs.rmSync(dir, { recursive: true, force: true });
  }
}

export function writeMatrixFile(dir: string, name: string, m: Matrix): string {
  const p = path.join(dir, name);
  fs.writeFileSync(p, encodeRdm(m));
  return p;
}

export function readMatrixFile(p: string): Matrix {
  return decodeRdm(fs.readFileSync(p), p);
}

// manifest values the wrappers consume; the full record has more fields
export interface Manifest {
  version: string;
  result: Record<string, number | boolean>;
}

export function readManifest(p: string): Manifest {
  return JSON.parse(fs.readFileSync(p, "utf8")) as Manifest;
}
