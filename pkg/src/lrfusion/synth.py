"""Synthetic instances with known ground truth, plus recovery metrics.

An instance is built from a rank-r product of uniform factors (the shared
low-rank part) plus one constant-magnitude spike matrix per modality on a
uniformly sampled support. Construction is exact: i = l0 + s_i0 and
t = l0 + s_t0 hold bitwise, so solver output can be scored against truth.

Randomness comes from numpy's PCG64 via Generator.uniform / permutation /
integers only; the generator identity travels with exported instances so
they reproduce across platforms.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import ValidationError
from .kernels import as_matrix, frobenius_norm, require_same_shape, svd

GENERATOR_ID = "numpy.random.Generator(PCG64)"

# entry magnitudes below this count as structural zeros when scoring supports
SUPPORT_THRESHOLD = 1e-6
# singular values below this fraction of sigma_max do not count toward rank
RANK_TOLERANCE = 1e-6


@dataclass(frozen=True)
class SyntheticSpec:
    """Generation parameters; seed fixes the instance bitwise."""

    rows: int
    cols: int
    rank: int
    density: float
    low_rank_scale: float = 1.0
    spike_scale: float = 1.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.rows < 1 or self.cols < 1:
            raise ValidationError(f"dimensions must be >= 1, got {self.rows}x{self.cols}")
        if not 0 <= self.rank <= min(self.rows, self.cols):
            raise ValidationError(
                f"rank must be in [0, {min(self.rows, self.cols)}], got {self.rank}"
            )
        if not (math.isfinite(self.density) and 0.0 <= self.density <= 1.0):
            raise ValidationError(f"density must be in [0, 1], got {self.density}")
        if not (math.isfinite(self.low_rank_scale) and self.low_rank_scale >= 0):
            raise ValidationError(f"low_rank_scale must be >= 0, got {self.low_rank_scale}")
        if not (math.isfinite(self.spike_scale) and self.spike_scale >= 0):
            raise ValidationError(f"spike_scale must be >= 0, got {self.spike_scale}")


@dataclass(frozen=True)
class SyntheticInstance:
    """Observations plus the ground truth that generated them."""

    i: np.ndarray
    t: np.ndarray
    l0: np.ndarray
    s_i0: np.ndarray
    s_t0: np.ndarray


def _spikes(rng: np.random.Generator, spec: SyntheticSpec) -> np.ndarray:
    total = spec.rows * spec.cols
    k = int(round(spec.density * total))
    support = rng.permutation(total)[:k]
    flat = np.zeros(total)
    flat[support] = spec.spike_scale * (2.0 * rng.integers(0, 2, size=k) - 1.0)
    return flat.reshape(spec.rows, spec.cols)


def generate(spec: SyntheticSpec) -> SyntheticInstance:
    """Deterministically generate an instance from the spec.

    Factor entries are i.i.d. uniform on [-low_rank_scale, low_rank_scale];
    each modality's spike support is drawn independently, uniformly without
    replacement, with values of constant magnitude and uniform sign.
    """
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    p = rng.uniform(-spec.low_rank_scale, spec.low_rank_scale, size=(spec.rows, spec.rank))
    q = rng.uniform(-spec.low_rank_scale, spec.low_rank_scale, size=(spec.cols, spec.rank))
    l0 = p @ q.T
    s_i0 = _spikes(rng, spec)
    s_t0 = _spikes(rng, spec)
    return SyntheticInstance(i=l0 + s_i0, t=l0 + s_t0, l0=l0, s_i0=s_i0, s_t0=s_t0)


@dataclass(frozen=True)
class RecoveryMetrics:
    """Relative errors, numerical rank of L, and per-modality support scores."""

    rel_err_l: float
    rel_err_s_i: float
    rel_err_s_t: float
    rank_l: int
    precision_s_i: float
    recall_s_i: float
    f1_s_i: float
    precision_s_t: float
    recall_s_t: float
    f1_s_t: float

    def as_dict(self) -> dict:
        return asdict(self)


def _relative_error(est: np.ndarray, ref: np.ndarray) -> float:
    return frobenius_norm(est - ref) / max(1.0, frobenius_norm(ref))


def _support_scores(est: np.ndarray, ref: np.ndarray) -> tuple[float, float, float]:
    est_supp = np.abs(est) > SUPPORT_THRESHOLD
    ref_supp = np.abs(ref) > SUPPORT_THRESHOLD
    tp = int(np.count_nonzero(est_supp & ref_supp))
    predicted = int(np.count_nonzero(est_supp))
    actual = int(np.count_nonzero(ref_supp))
    precision = tp / predicted if predicted else 1.0
    recall = tp / actual if actual else 1.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return precision, recall, f1


def numerical_rank(a, tolerance: float = RANK_TOLERANCE) -> int:
    """Count singular values above tolerance * sigma_max."""
    sigma = svd(a).sigma
    if sigma[0] <= 0.0:
        return 0
    return int(np.count_nonzero(sigma > tolerance * sigma[0]))


def component_metrics(l, s_i, s_t, truth: SyntheticInstance) -> RecoveryMetrics:
    """Score estimated components against a ground-truth instance."""
    l = as_matrix(l, "l")
    s_i = as_matrix(s_i, "s_i")
    s_t = as_matrix(s_t, "s_t")
    require_same_shape(l, truth.l0, "l", "l0")
    require_same_shape(s_i, truth.s_i0, "s_i", "s_i0")
    require_same_shape(s_t, truth.s_t0, "s_t", "s_t0")
    p_i, r_i, f_i = _support_scores(s_i, truth.s_i0)
    p_t, r_t, f_t = _support_scores(s_t, truth.s_t0)
    return RecoveryMetrics(
        rel_err_l=_relative_error(l, truth.l0),
        rel_err_s_i=_relative_error(s_i, truth.s_i0),
        rel_err_s_t=_relative_error(s_t, truth.s_t0),
        rank_l=numerical_rank(l),
        precision_s_i=p_i,
        recall_s_i=r_i,
        f1_s_i=f_i,
        precision_s_t=p_t,
        recall_s_t=r_t,
        f1_s_t=f_t,
    )


def recovery_metrics(est, truth: SyntheticInstance) -> RecoveryMetrics:
    """Score a JointDecomposition against the instance that produced it."""
    return component_metrics(est.l, est.s_i, est.s_t, truth)
