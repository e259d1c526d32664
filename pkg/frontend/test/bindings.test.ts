import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";
import { afterAll, describe, expect, it } from "vitest";

import {
  Matrix,
  decodeRdm,
  fuse,
  jointDecompose,
  lmrDecompose,
  matrix,
  payloadBytes,
  runCli,
  version,
  zeros,
} from "./helpers";

const tempDirs: string[] = [];

function makeTempDir(): string {
  const dir = fs.mkdtempSync(path.join(os.tmpdir(), "lrfusion-test-"));
  tempDirs.push(dir);
  return dir;
}

afterAll(() => {
  for (const dir of tempDirs) fs.rmSync(dir, { recursive: true, force: true });
});

function readMatrix(p: string): Matrix {
  return decodeRdm(fs.readFileSync(p), p);
}

/** Generate an instance via the CLI and return the directory. */
function generateInstance(args: {
  rows: number;
  cols: number;
  rank: number;
  density: number;
  seed: number;
}): string {
  const dir = makeTempDir();
  runCli([
    "generate",
    "--rows", String(args.rows),
    "--cols", String(args.cols),
    "--rank", String(args.rank),
    "--density", String(args.density),
    "--seed", String(args.seed),
    "--out-dir", dir,
  ]);
  return dir;
}

function bitwiseEqual(a: Matrix, b: Matrix): boolean {
  return a.rows === b.rows && a.cols === b.cols && payloadBytes(a).equals(payloadBytes(b));
}

describe("boundary validation", () => {
  it("rejects mismatched shapes without spawning the solver", () => {
    expect(() => jointDecompose(zeros(3, 4), zeros(4, 3))).toThrow(RangeError);
  });

  it("rejects a non-Float64Array payload", () => {
    const bad = { rows: 2, cols: 2, data: new Float32Array(4) as unknown as Float64Array };
    expect(() => jointDecompose(bad, bad)).toThrow(TypeError);
  });

  it("rejects a data length that disagrees with the shape", () => {
    const bad = { rows: 2, cols: 3, data: new Float64Array(5) };
    expect(() => lmrDecompose(bad)).toThrow(RangeError);
  });

  it("rejects non-finite entries", () => {
    const bad = matrix(1, 2, new Float64Array([1, 2]));
    bad.data[1] = Number.NaN;
    expect(() => lmrDecompose(bad)).toThrow(RangeError);
  });

  it("rejects a params vector of the wrong length", () => {
    const m = zeros(2, 2);
    expect(() => fuse(m, m, m, new Float64Array(3), 0)).toThrow(RangeError);
  });

  it("surfaces solver errors as thrown Errors, not crashes", () => {
    // valid shapes locally, invalid solver parameter -> CLI exit 3
    const m = zeros(2, 2);
    expect(() => jointDecompose(m, m, { lambda: -1 })).toThrow(/status 3/);
  });
});

describe("jointDecompose", () => {
  it("returns all-zero components for zero inputs, converged at iteration 1", () => {
    const z = zeros(4, 4);
    const res = jointDecompose(z, z);
    expect(res.info.converged).toBe(true);
    expect(res.info.iterationsRun).toBe(1);
    expect(bitwiseEqual(res.l, z)).toBe(true);
    expect(bitwiseEqual(res.sI, z)).toBe(true);
    expect(bitwiseEqual(res.sT, z)).toBe(true);
  });

  it("matches direct CLI output bitwise on the acceptance instance", () => {
    const truth = generateInstance({ rows: 64, cols: 64, rank: 4, density: 0.05, seed: 42 });
    const i = readMatrix(path.join(truth, "I.rdm"));
    const t = readMatrix(path.join(truth, "T.rdm"));

    const mine = jointDecompose(i, t, { lambda: 0.125 });
    expect(mine.info.converged).toBe(true);

    const outDir = path.join(makeTempDir(), "direct");
    runCli([
      "joint",
      "--input-i", path.join(truth, "I.rdm"),
      "--input-t", path.join(truth, "T.rdm"),
      "--out-dir", outDir,
      "--lambda", "0.125",
    ]);
    expect(bitwiseEqual(mine.l, readMatrix(path.join(outDir, "L.rdm")))).toBe(true);
    expect(bitwiseEqual(mine.sI, readMatrix(path.join(outDir, "S_I.rdm")))).toBe(true);
    expect(bitwiseEqual(mine.sT, readMatrix(path.join(outDir, "S_T.rdm")))).toBe(true);
  });

  it("matches direct CLI output bitwise on 10 random instances", () => {
    for (let seed = 1; seed <= 10; seed++) {
      const truth = generateInstance({ rows: 16, cols: 16, rank: 2, density: 0.1, seed });
      const i = readMatrix(path.join(truth, "I.rdm"));
      const t = readMatrix(path.join(truth, "T.rdm"));

      const mine = jointDecompose(i, t, { lambda: 0.25, maxIters: 150 });

      const outDir = path.join(makeTempDir(), "direct");
      runCli([
        "joint",
        "--input-i", path.join(truth, "I.rdm"),
        "--input-t", path.join(truth, "T.rdm"),
        "--out-dir", outDir,
        "--lambda", "0.25",
        "--max-iters", "150",
      ]);
      expect(bitwiseEqual(mine.l, readMatrix(path.join(outDir, "L.rdm")))).toBe(true);
      expect(bitwiseEqual(mine.sI, readMatrix(path.join(outDir, "S_I.rdm")))).toBe(true);
      expect(bitwiseEqual(mine.sT, readMatrix(path.join(outDir, "S_T.rdm")))).toBe(true);
    }
  });
});

describe("lmrDecompose", () => {
  it("returns zeros for a zero input", () => {
    const res = lmrDecompose(zeros(3, 3));
    expect(res.info.converged).toBe(true);
    expect(res.info.iterationsRun).toBe(1);
    expect(bitwiseEqual(res.l, zeros(3, 3))).toBe(true);
  });

  it("with svtTau = 1/(2*mu) reproduces the joint solver on (x, x)", () => {
    const truth = generateInstance({ rows: 12, cols: 12, rank: 2, density: 0.1, seed: 21 });
    const x = readMatrix(path.join(truth, "I.rdm"));
    const single = lmrDecompose(x, { maxIters: 120, svtTau: 0.05 });
    const joint = jointDecompose(x, x, { maxIters: 120 });
    expect(bitwiseEqual(single.l, joint.l)).toBe(true);
    expect(bitwiseEqual(single.s, joint.sI)).toBe(true);
  });
});

describe("fuse", () => {
  it("gives uniform weights for zero params", () => {
    const truth = generateInstance({ rows: 6, cols: 5, rank: 2, density: 0.2, seed: 31 });
    const l = readMatrix(path.join(truth, "L0.rdm"));
    const sI = readMatrix(path.join(truth, "S_I0.rdm"));
    const sT = readMatrix(path.join(truth, "S_T0.rdm"));
    const res = fuse(l, sI, sT, new Float64Array(30), 0);
    for (const alpha of res.alphas) {
      expect(Math.abs(alpha - 1 / 3)).toBeLessThanOrEqual(1e-15);
    }
    expect(Math.abs(res.alphas[0] + res.alphas[1] + res.alphas[2] - 1)).toBeLessThanOrEqual(1e-12);
  });

  it("returns the common matrix when all components are equal", () => {
    const truth = generateInstance({ rows: 5, cols: 4, rank: 2, density: 0.2, seed: 32 });
    const m = readMatrix(path.join(truth, "I.rdm"));
    const w = new Float64Array(20).fill(0.05);
    const res = fuse(m, m, m, w, 0.7);
    let maxDiff = 0;
    for (let k = 0; k < m.data.length; k++) {
      maxDiff = Math.max(maxDiff, Math.abs(res.r.data[k] - m.data[k]));
    }
    expect(maxDiff).toBeLessThanOrEqual(1e-12);
  });

  it("recombines weights and components into r", () => {
    const truth = generateInstance({ rows: 6, cols: 6, rank: 2, density: 0.2, seed: 33 });
    const l = readMatrix(path.join(truth, "L0.rdm"));
    const sI = readMatrix(path.join(truth, "S_I0.rdm"));
    const sT = readMatrix(path.join(truth, "S_T0.rdm"));
    const w = new Float64Array(36);
    for (let k = 0; k < w.length; k++) w[k] = Math.sin(k + 1) * 0.1;
    const res = fuse(l, sI, sT, w, -0.2);
    const [aL, aI, aT] = res.alphas;
    let maxDiff = 0;
    for (let k = 0; k < l.data.length; k++) {
      const expected = aL * l.data[k] + aI * sI.data[k] + aT * sT.data[k];
      maxDiff = Math.max(maxDiff, Math.abs(res.r.data[k] - expected));
    }
    expect(maxDiff).toBeLessThanOrEqual(1e-12);
  });
});

describe("version", () => {
  it("matches the wrapper package version", () => {
    const pkg = JSON.parse(
      fs.readFileSync(path.join(__dirname, "..", "package.json"), "utf8")
    ) as { version: string };
    expect(version()).toBe(pkg.version);
  });
});
