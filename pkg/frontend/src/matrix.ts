/**
 * Dense row-major float64 matrices and the RDM1 binary encoding used to
 * exchange them with the solver CLI.
 *
 * RDM1 layout: 4-byte magic "RDM1", rows and cols as unsigned 32-bit
 * little-endian integers, then rows*cols IEEE-754 float64 little-endian
 * values in row-major order. File length is exactly 12 + 8*rows*cols.
 */

const MAGIC = "RDM1";
const HEADER_BYTES = 12;

export interface Matrix {
  rows: number;
  cols: number;
  data: Float64Array;
}

/** Construct a validated matrix; the data buffer is used as-is (no copy). */
export function matrix(rows: number, cols: number, data: Float64Array): Matrix {
  const m = { rows, cols, data };
  validateMatrix(m);
  return m;
}

export function zeros(rows: number, cols: number): Matrix {
  return matrix(rows, cols, new Float64Array(rows * cols));
}

/**
 * Boundary validation: shape, dtype, length, and finiteness. Throws
 * TypeError for a wrong element type and RangeError for bad dimensions,
 * a length mismatch, or non-finite entries.
 */
export function validateMatrix(m: Matrix, name = "matrix"): void {
  if (!(m.data instanceof Float64Array)) {
    throw new TypeError(`${name}.data must be a Float64Array`);
  }
  if (!Number.isInteger(m.rows) || !Number.isInteger(m.cols) || m.rows < 1 || m.cols < 1) {
    throw new RangeError(`${name} dimensions must be positive integers, got ${m.rows}x${m.cols}`);
  }
  if (m.data.length !== m.rows * m.cols) {
    throw new RangeError(
      `${name}.data has length ${m.data.length}, expected ${m.rows}x${m.cols} = ${m.rows * m.cols}`
    );
  }
  for (let k = 0; k < m.data.length; k++) {
    if (!Number.isFinite(m.data[k])) {
      throw new RangeError(`${name} contains a non-finite entry at flat index ${k}`);
    }
  }
}

export function requireSameShape(a: Matrix, b: Matrix, aName: string, bName: string): void {
  if (a.rows !== b.rows || a.cols !== b.cols) {
    throw new RangeError(
      `shape mismatch: ${aName} is ${a.rows}x${a.cols}, ${bName} is ${b.rows}x${b.cols}`
    );
  }
}

/** Encode a matrix as RDM1 bytes. */
export function encodeRdm(m: Matrix): Buffer {
  validateMatrix(m);
  const buf = Buffer.alloc(HEADER_BYTES + 8 * m.data.length);
  buf.write(MAGIC, 0, "ascii");
  buf.writeUInt32LE(m.rows, 4);
  buf.writeUInt32LE(m.cols, 8);
  for (let k = 0; k < m.data.length; k++) {
    buf.writeDoubleLE(m.data[k], HEADER_BYTES + 8 * k);
  }
  return buf;
}

/** Decode RDM1 bytes into a fresh matrix (copy-out). */
export function decodeRdm(buf: Buffer, source = "buffer"): Matrix {
  if (buf.length < HEADER_BYTES) {
    throw new RangeError(`${source}: truncated header (${buf.length} of ${HEADER_BYTES} bytes)`);
  }
  const magic = buf.toString("ascii", 0, 4);
  if (magic !== MAGIC) {
    throw new RangeError(`${source}: bad magic ${JSON.stringify(magic)}, expected "${MAGIC}"`);
  }
  const rows = buf.readUInt32LE(4);
  const cols = buf.readUInt32LE(8);
  if (rows < 1 || cols < 1) {
    throw new RangeError(`${source}: dimensions must be >= 1, got ${rows}x${cols}`);
  }
  const expected = HEADER_BYTES + 8 * rows * cols;
  if (buf.length !== expected) {
    throw new RangeError(
      `${source}: expected ${expected} bytes for a ${rows}x${cols} payload, found ${buf.length}`
    );
  }
  const data = new Float64Array(rows * cols);
  for (let k = 0; k < data.length; k++) {
    data[k] = buf.readDoubleLE(HEADER_BYTES + 8 * k);
  }
  return { rows, cols, data };
}

/** Raw little-endian bytes of the payload, for bitwise comparisons. */
export function payloadBytes(m: Matrix): Buffer {
  return encodeRdm(m).subarray(HEADER_BYTES);
}
