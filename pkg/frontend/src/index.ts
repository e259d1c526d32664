/**
 * Typed wrapper around the lrfusion CLI.
 *
 * Exposes the joint and single decomposition solvers plus attention
 * fusion over plain { rows, cols, data: Float64Array } matrices. No
 * numerics run in-process: inputs are written as RDM1 files, the CLI is
 * invoked, and its outputs are read back, so wrapper results are
 * byte-identical to what the CLI itself produces.
 */

import * as path from "node:path";

import { Matrix, requireSameShape, validateMatrix } from "./matrix";
import { readManifest, readMatrixFile, runCli, withTempDir, writeMatrixFile } from "./runner";

export { Matrix, matrix, zeros, encodeRdm, decodeRdm, validateMatrix } from "./matrix";
export { cliPath } from "./runner";

export interface SolverOptions {
  lambda?: number;
  mu?: number;
  maxIters?: number;
  epsilon?: number;
}

export interface JointInfo {
  iterationsRun: number;
  converged: boolean;
  finalResidualI: number;
  finalResidualT: number;
}

export interface JointResult {
  l: Matrix;
  sI: Matrix;
  sT: Matrix;
  info: JointInfo;
}

export interface SingleInfo {
  iterationsRun: number;
  converged: boolean;
  finalResidual: number;
}

export interface SingleResult {
  l: Matrix;
  s: Matrix;
  info: SingleInfo;
}

export interface FuseResult {
  r: Matrix;
  alphas: [number, number, number];
  scores: [number, number, number];
}

function solverFlags(opts: SolverOptions): string[] {
  const flags: string[] = [];
  if (opts.lambda !== undefined) flags.push("--lambda", String(opts.lambda));
  if (opts.mu !== undefined) flags.push("--mu", String(opts.mu));
  if (opts.maxIters !== undefined) flags.push("--max-iters", String(opts.maxIters));
  if (opts.epsilon !== undefined) flags.push("--epsilon", String(opts.epsilon));
  return flags;
}

/**
 * Decompose an equal-shape matrix pair into a shared low-rank component
 * plus one sparse component per input.
 */
export function jointDecompose(i: Matrix, t: Matrix, opts: SolverOptions = {}): JointResult {
  validateMatrix(i, "i");
  validateMatrix(t, "t");
  requireSameShape(i, t, "i", "t");
  return withTempDir((dir) => {
    const iPath = writeMatrixFile(dir, "I.rdm", i);
    const tPath = writeMatrixFile(dir, "T.rdm", t);
    const outDir = path.join(dir, "out");
    runCli(["joint", "--input-i", iPath, "--input-t", tPath, "--out-dir", outDir,
            ...solverFlags(opts)]);
    const manifest = readManifest(path.join(outDir, "manifest.json"));
    return {
      l: readMatrixFile(path.join(outDir, "L.rdm")),
      sI: readMatrixFile(path.join(outDir, "S_I.rdm")),
      sT: readMatrixFile(path.join(outDir, "S_T.rdm")),
      info: {
        iterationsRun: manifest.result.iterations_run as number,
        converged: manifest.result.converged as boolean,
        finalResidualI: manifest.result.final_residual_i as number,
        finalResidualT: manifest.result.final_residual_t as number,
      },
    };
  });
}

/** Decompose a single matrix into low-rank plus sparse (X = L + S). */
export function lmrDecompose(
  x: Matrix,
  opts: SolverOptions & { svtTau?: number } = {}
): SingleResult {
  validateMatrix(x, "x");
  return withTempDir((dir) => {
    const xPath = writeMatrixFile(dir, "X.rdm", x);
    const outDir = path.join(dir, "out");
    const args = ["decompose", "--input", xPath, "--out-dir", outDir, ...solverFlags(opts)];
    if (opts.svtTau !== undefined) args.push("--svt-tau", String(opts.svtTau));
    runCli(args);
    const manifest = readManifest(path.join(outDir, "manifest.json"));
    return {
      l: readMatrixFile(path.join(outDir, "L.rdm")),
      s: readMatrixFile(path.join(outDir, "S.rdm")),
      info: {
        iterationsRun: manifest.result.iterations_run as number,
        converged: manifest.result.converged as boolean,
        finalResidual: manifest.result.final_residual as number,
      },
    };
  });
}

/**
 * Attention-fuse three equal-shape components with shared scoring
 * parameters (weight vector w over flattened entries, bias b).
 */
export function fuse(
  l: Matrix,
  sI: Matrix,
  sT: Matrix,
  w: Float64Array,
  b: number
): FuseResult {
  validateMatrix(l, "l");
  validateMatrix(sI, "sI");
  validateMatrix(sT, "sT");
  requireSameShape(l, sI, "l", "sI");
  requireSameShape(l, sT, "l", "sT");
  if (!(w instanceof Float64Array)) {
    throw new TypeError("w must be a Float64Array");
  }
  if (w.length !== l.data.length) {
    throw new RangeError(`w has length ${w.length}, expected ${l.data.length}`);
  }
  if (!Number.isFinite(b)) {
    throw new RangeError(`b must be finite, got ${b}`);
  }
  return withTempDir((dir) => {
    const lPath = writeMatrixFile(dir, "L.rdm", l);
    const sIPath = writeMatrixFile(dir, "S_I.rdm", sI);
    const sTPath = writeMatrixFile(dir, "S_T.rdm", sT);
    const paramsData = new Float64Array(w.length + 1);
    paramsData.set(w);
    paramsData[w.length] = b;
    const paramsPath = writeMatrixFile(dir, "params.rdm", {
      rows: 1,
      cols: paramsData.length,
      data: paramsData,
    });
    const outPath = path.join(dir, "R.rdm");
    runCli(["fuse", "--l", lPath, "--s-i", sIPath, "--s-t", sTPath,
            "--params", paramsPath, "--out", outPath]);
    const manifest = readManifest(`${outPath}.manifest.json`);
    const res = manifest.result as Record<string, number>;
    return {
      r: readMatrixFile(outPath),
      alphas: [res.alpha_l, res.alpha_i, res.alpha_t],
      scores: [res.s_l, res.s_i, res.s_t],
    };
  });
}

/** Version of the wrapped solver, e.g. "0.1.0". */
export function version(): string {
  const out = runCli(["--version"]).trim();
  const parts = out.split(/\s+/);
  return parts[parts.length - 1];
}
