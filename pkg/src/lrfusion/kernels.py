"""Dense float64 matrix kernels: norms, SVD, and the two proximal operators.

Matrices are plain 2-D C-contiguous float64 numpy arrays; ``as_matrix``
is the single validation gate. All operations are pure and deterministic
for a fixed input on a fixed build.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .errors import DimensionError, NumericalError, ValidationError


class SvdResult(NamedTuple):
    """Thin SVD factors satisfying ``a = u @ diag(sigma) @ vt``."""

    u: np.ndarray
    sigma: np.ndarray
    vt: np.ndarray


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce to a C-contiguous 2-D float64 array with finite entries.

    No copy is made when the input already has that layout.
    """
    m = np.ascontiguousarray(a, dtype=np.float64)
    if m.ndim != 2:
        raise ValidationError(f"{name} must be 2-D, got {m.ndim} dimension(s)")
    if m.shape[0] < 1 or m.shape[1] < 1:
        raise ValidationError(f"{name} must have positive dimensions, got {m.shape}")
    if not np.isfinite(m).all():
        raise ValidationError(f"{name} contains non-finite entries")
    return m


def require_same_shape(a: np.ndarray, b: np.ndarray, a_name: str = "a", b_name: str = "b") -> None:
    if a.shape != b.shape:
        raise DimensionError(
            f"shape mismatch: {a_name} is {a.shape[0]}x{a.shape[1]}, "
            f"{b_name} is {b.shape[0]}x{b.shape[1]}"
        )


def _check_tau(tau: float) -> float:
    tau = float(tau)
    if not math.isfinite(tau) or tau < 0:
        raise ValidationError(f"threshold must be finite and >= 0, got {tau}")
    return tau


def frobenius_norm(a) -> float:
    """Square root of the sum of squared entries."""
    return float(np.linalg.norm(as_matrix(a, "a")))


def soft_threshold(a, tau: float) -> np.ndarray:
    """Element-wise shrinkage ``sign(x) * max(|x| - tau, 0)``."""
    m = as_matrix(a, "a")
    tau = _check_tau(tau)
    return np.sign(m) * np.maximum(np.abs(m) - tau, 0.0)


def svd(a) -> SvdResult:
    """Thin SVD with singular values sorted non-increasing.

    Raises NumericalError when the underlying eigensolver fails to
    converge within its internal iteration cap.
    """
    m = as_matrix(a, "a")
    try:
        u, sigma, vt = np.linalg.svd(m, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(
            f"SVD did not converge for {m.shape[0]}x{m.shape[1]} matrix: {exc}"
        ) from exc
    return SvdResult(u=u, sigma=sigma, vt=vt)


def svt(a, tau: float) -> np.ndarray:
    """Singular value thresholding: ``U max(Sigma - tau, 0) Vt``."""
    tau = _check_tau(tau)
    u, sigma, vt = svd(a)
    return (u * np.maximum(sigma - tau, 0.0)) @ vt


def add(a, b) -> np.ndarray:
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    require_same_shape(a, b)
    return a + b


def sub(a, b) -> np.ndarray:
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    require_same_shape(a, b)
    return a - b


def scale(a, c: float) -> np.ndarray:
    c = float(c)
    if not math.isfinite(c):
        raise ValidationError(f"scale factor must be finite, got {c}")
    return as_matrix(a, "a") * c


def flatten(a) -> np.ndarray:
    """Row-major flattening to a fresh 1-D vector."""
    return as_matrix(a, "a").flatten()


def reshape(v, rows: int, cols: int) -> np.ndarray:
    """Inverse of ``flatten`` for the given dimensions."""
    vec = np.ascontiguousarray(v, dtype=np.float64)
    if vec.ndim != 1:
        raise ValidationError(f"vector must be 1-D, got {vec.ndim} dimension(s)")
    if rows < 1 or cols < 1:
        raise ValidationError(f"target dimensions must be positive, got {rows}x{cols}")
    if vec.size != rows * cols:
        raise DimensionError(
            f"cannot reshape vector of length {vec.size} to {rows}x{cols}"
        )
    return vec.reshape(rows, cols).copy()
