"""Matrix file formats, config files, digests, and ingestion transforms.

Binary format RDM1: 4-byte magic ``RDM1``, rows and cols as unsigned
32-bit little-endian integers, then rows*cols IEEE-754 float64
little-endian values in row-major order. File length is exactly
12 + 8*rows*cols bytes and a write -> read round trip is bitwise identity.

CSV is headerless, comma-separated, one matrix row per line, rendered with
17 significant digits on export (enough to round-trip float64 exactly).

Config files are flat ``key = value`` text with exactly the solver keys
(lambda, mu, max_iters, epsilon); blank lines and ``#`` comments allowed.
"""

from __future__ import annotations

import hashlib
import json
import struct
from pathlib import Path

import numpy as np

from .errors import FormatError, ValidationError
from .kernels import as_matrix

MAGIC = b"RDM1"
FORMAT_VERSION = 1

_HEADER = struct.Struct("<4sII")


def write_matrix_rdm(path, a) -> None:
    a = as_matrix(a, "matrix")
    rows, cols = a.shape
    if rows > 0xFFFFFFFF or cols > 0xFFFFFFFF:
        raise ValidationError(f"dimensions exceed the 32-bit header range: {rows}x{cols}")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, rows, cols))
        fh.write(np.ascontiguousarray(a, dtype="<f8").tobytes())


def read_matrix_rdm(path) -> np.ndarray:
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise FormatError(f"{path}: truncated header ({len(data)} of {_HEADER.size} bytes)")
    magic, rows, cols = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}, expected {MAGIC!r}")
    if rows < 1 or cols < 1:
        raise FormatError(f"{path}: dimensions must be >= 1, got {rows}x{cols}")
    expected = _HEADER.size + 8 * rows * cols
    if len(data) != expected:
        raise FormatError(
            f"{path}: expected {expected} bytes for a {rows}x{cols} payload, found {len(data)}"
        )
    payload = np.frombuffer(data, dtype="<f8", offset=_HEADER.size)
    try:
        return as_matrix(np.array(payload, dtype=np.float64).reshape(rows, cols), "payload")
    except ValidationError as exc:
        raise FormatError(f"{path}: {exc}") from exc


def write_matrix_csv(path, a) -> None:
    a = as_matrix(a, "matrix")
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        for row in a:
            fh.write(",".join(format(x, ".17g") for x in row))
            fh.write("\n")


def read_matrix_csv(path) -> np.ndarray:
    text = Path(path).read_text(encoding="ascii")
    rows: list[list[float]] = []
    width = None
    for lineno, line in enumerate(text.splitlines(), 1):
        cells = line.split(",")
        if width is None:
            width = len(cells)
        elif len(cells) != width:
            raise FormatError(
                f"{path}:{lineno}: expected {width} cells per row, found {len(cells)}"
            )
        try:
            rows.append([float(c) for c in cells])
        except ValueError:
            bad = next(c for c in cells if not _is_float(c))
            raise FormatError(f"{path}:{lineno}: non-numeric cell {bad!r}") from None
    if not rows:
        raise FormatError(f"{path}: empty CSV")
    try:
        return as_matrix(np.array(rows, dtype=np.float64), "payload")
    except ValidationError as exc:
        raise FormatError(f"{path}: {exc}") from exc


def _is_float(cell: str) -> bool:
    try:
        float(cell)
        return True
    except ValueError:
        return False


def read_matrix(path) -> np.ndarray:
    """Read a matrix file, sniffing RDM1 by magic and falling back to CSV."""
    p = Path(path)
    with open(p, "rb") as fh:
        head = fh.read(len(MAGIC))
    if head == MAGIC:
        return read_matrix_rdm(p)
    return read_matrix_csv(p)


def write_matrix(path, a, fmt: str = "rdm") -> None:
    if fmt == "rdm":
        write_matrix_rdm(path, a)
    elif fmt == "csv":
        write_matrix_csv(path, a)
    else:
        raise ValidationError(f"unknown matrix format {fmt!r}; expected 'rdm' or 'csv'")


def matrix_extension(fmt: str) -> str:
    if fmt not in ("rdm", "csv"):
        raise ValidationError(f"unknown matrix format {fmt!r}; expected 'rdm' or 'csv'")
    return f".{fmt}"


def sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


CONFIG_KEYS = {"lambda": float, "mu": float, "max_iters": int, "epsilon": float}


def parse_config_file(path) -> dict:
    """Parse a flat solver config file into a {key: value} dict."""
    text = Path(path).read_text(encoding="utf-8")
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValidationError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key = key.strip()
        value = value.strip()
        if key not in CONFIG_KEYS:
            raise ValidationError(
                f"{path}:{lineno}: unknown key {key!r}; allowed: {sorted(CONFIG_KEYS)}"
            )
        try:
            values[key] = CONFIG_KEYS[key](value)
        except ValueError:
            raise ValidationError(f"{path}:{lineno}: invalid value {value!r} for {key}") from None
    return values


def align_rows(a: np.ndarray, target_rows: int, mode: str) -> np.ndarray:
    """Reduce a matrix to target_rows rows by truncation or uniform pooling.

    mean-pool averages contiguous row groups [floor(i*n/r), floor((i+1)*n/r)).
    """
    n = a.shape[0]
    if n == target_rows:
        return a
    if n < target_rows:
        raise ValidationError(f"cannot align {n} rows up to {target_rows}")
    if mode == "truncate":
        return a[:target_rows].copy()
    if mode == "mean-pool":
        bounds = [(i * n) // target_rows for i in range(target_rows + 1)]
        return np.stack([a[bounds[i]:bounds[i + 1]].mean(axis=0) for i in range(target_rows)])
    raise ValidationError(f"unknown align mode {mode!r}; expected 'truncate' or 'mean-pool'")


def center_columns(a: np.ndarray) -> np.ndarray:
    """Subtract each column's mean."""
    return a - a.mean(axis=0, keepdims=True)


def input_record(path) -> dict:
    return {"path": str(path), "sha256": sha256_file(path)}


def output_record(path) -> dict:
    return {"file": Path(path).name, "sha256": sha256_file(path)}


def write_manifest(path, manifest: dict) -> None:
    """Write a manifest as sorted, indented JSON (floats round-trip exactly)."""
    Path(path).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
