"""Attention-weighted aggregation of the three decomposed components.

Each component matrix is flattened, mapped to a scalar score by a single
shared linear layer (one weight vector w plus bias b for all three, so the
scores stay comparable), the scores are softmax-normalized, and the
aggregate is the weighted sum R = a_l*L + a_i*S_I + a_t*S_T.

``fusion_gradients`` provides the exact analytic gradient of a downstream
loss with respect to (w, b) so an external trainer can fit them; the
component matrices are treated as constants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, ValidationError
from .kernels import as_matrix, require_same_shape


@dataclass(frozen=True)
class AttentionParams:
    """Scoring parameters shared by all three components.

    w has one weight per entry of the (flattened) matrices it scores;
    b is a scalar bias.
    """

    w: np.ndarray
    b: float

    def __post_init__(self) -> None:
        w = np.ascontiguousarray(self.w, dtype=np.float64)
        if w.ndim != 1:
            raise ValidationError(f"w must be 1-D, got {w.ndim} dimension(s)")
        if not np.isfinite(w).all():
            raise ValidationError("w contains non-finite entries")
        b = float(self.b)
        if not math.isfinite(b):
            raise ValidationError(f"b must be finite, got {b}")
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "b", b)

    @classmethod
    def zeros(cls, size: int) -> "AttentionParams":
        """Neutral untrained parameters: uniform weights for any input."""
        return cls(w=np.zeros(size), b=0.0)


@dataclass(frozen=True)
class FusionResult:
    """Scores, softmax weights, and the aggregated matrix."""

    scores: tuple[float, float, float]
    weights: tuple[float, float, float]
    r: np.ndarray


def score(m, p: AttentionParams) -> float:
    """Scalar score dot(w, flatten(m)) + b."""
    m = as_matrix(m, "m")
    if p.w.size != m.size:
        raise DimensionError(
            f"params length {p.w.size} does not match flattened matrix size {m.size}"
        )
    return float(np.dot(p.w, m.ravel()) + p.b)


def attention_weights(s_l: float, s_i: float, s_t: float) -> tuple[float, float, float]:
    """Softmax of the three scores, computed with max-subtraction."""
    scores = np.array([s_l, s_i, s_t], dtype=np.float64)
    if not np.isfinite(scores).all():
        raise ValidationError(f"scores must be finite, got {scores.tolist()}")
    e = np.exp(scores - scores.max())
    w = e / e.sum()
    return float(w[0]), float(w[1]), float(w[2])


def fuse(l, s_i, s_t, p: AttentionParams) -> FusionResult:
    """Score, weight, and aggregate the three components."""
    l = as_matrix(l, "l")
    s_i = as_matrix(s_i, "s_i")
    s_t = as_matrix(s_t, "s_t")
    require_same_shape(l, s_i, "l", "s_i")
    require_same_shape(l, s_t, "l", "s_t")
    scores = (score(l, p), score(s_i, p), score(s_t, p))
    weights = attention_weights(*scores)
    r = weights[0] * l + weights[1] * s_i + weights[2] * s_t
    return FusionResult(scores=scores, weights=weights, r=r)


def fuse_with_weights(l, s_i, s_t, weights) -> np.ndarray:
    """Aggregate with explicitly injected weights, bypassing the scores.

    Test hook for linearity properties; not part of the stable interface.
    """
    l = as_matrix(l, "l")
    s_i = as_matrix(s_i, "s_i")
    s_t = as_matrix(s_t, "s_t")
    require_same_shape(l, s_i, "l", "s_i")
    require_same_shape(l, s_t, "l", "s_t")
    w = [float(v) for v in weights]
    if len(w) != 3 or not all(math.isfinite(v) for v in w):
        raise ValidationError(f"weights must be 3 finite scalars, got {weights!r}")
    return w[0] * l + w[1] * s_i + w[2] * s_t


def fusion_gradients(l, s_i, s_t, p: AttentionParams, upstream) -> tuple[np.ndarray, float]:
    """Exact gradient of a loss through the aggregation w.r.t. (w, b).

    ``upstream`` is dloss/dR. The components are constants, so the chain
    runs softmax -> scores -> (w, b); the bias gradient is the sum of the
    score gradients (analytically zero by softmax shift invariance).
    """
    comps = [as_matrix(m, name) for m, name in ((l, "l"), (s_i, "s_i"), (s_t, "s_t"))]
    up = as_matrix(upstream, "upstream")
    require_same_shape(comps[0], comps[1], "l", "s_i")
    require_same_shape(comps[0], comps[2], "l", "s_t")
    require_same_shape(comps[0], up, "l", "upstream")

    if p.w.size != comps[0].size:
        raise DimensionError(
            f"params length {p.w.size} does not match flattened matrix size {comps[0].size}"
        )
    vecs = [m.ravel() for m in comps]
    scores = tuple(float(np.dot(p.w, v) + p.b) for v in vecs)
    alpha = np.array(attention_weights(*scores))
    g = np.array([float(np.sum(up * m)) for m in comps])
    gbar = float(np.dot(alpha, g))
    ds = alpha * (g - gbar)
    grad_w = ds[0] * vecs[0] + ds[1] * vecs[1] + ds[2] * vecs[2]
    return grad_w, float(ds.sum())


def params_to_matrix(p: AttentionParams) -> np.ndarray:
    """Serialize params as a 1 x (n+1) matrix with b stored last."""
    return np.concatenate([p.w, [p.b]])[None, :]


def params_from_matrix(a, expected_size: int | None = None) -> AttentionParams:
    """Parse a 1 x (n+1) params matrix; validates length against a target size."""
    a = as_matrix(a, "params")
    if a.shape[0] != 1 or a.shape[1] < 2:
        raise ValidationError(
            f"params matrix must have shape 1x(n+1) with n >= 1, got {a.shape[0]}x{a.shape[1]}"
        )
    if expected_size is not None and a.shape[1] != expected_size + 1:
        raise DimensionError(
            f"params length {a.shape[1]} does not match required {expected_size + 1} "
            f"(flattened size {expected_size} plus bias)"
        )
    return AttentionParams(w=a[0, :-1].copy(), b=float(a[0, -1]))
