"""Augmented-Lagrangian alternating solvers for low-rank + sparse recovery.

Two solvers share one iteration skeleton: soft-threshold the sparse
block(s), singular-value-threshold the low-rank block, then take a
multiplier ascent step on the equality constraints.

``joint_decompose`` recovers a single low-rank matrix L shared by two
equal-shape inputs plus one sparse residual per input (I = L + S_I,
T = L + S_T). ``lmr_decompose`` is the standard single-matrix recovery
(X = L + S). With ``svt_tau = 1/(2*mu)`` the single solver run on X
reproduces the joint solver run on (X, X) iterate for iterate.

Both are deterministic state machines: zero initialization, fixed update
order, stopping test on the max Frobenius residual after the multiplier
update.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, NumericalError, ValidationError
from .kernels import as_matrix, frobenius_norm, require_same_shape, soft_threshold, svt


@dataclass(frozen=True)
class SolverConfig:
    """Solver parameters.

    lam: weight of the l1 penalty on the sparse part(s).
    mu: quadratic penalty weight; sets the proximal step sizes.
    max_iters: iteration cap.
    epsilon: absolute tolerance on the max Frobenius residual.
    """

    lam: float = 1.0
    mu: float = 10.0
    max_iters: int = 3000
    epsilon: float = 1e-7

    def __post_init__(self) -> None:
        if not (math.isfinite(self.lam) and self.lam > 0):
            raise ValidationError(f"lam must be finite and > 0, got {self.lam}")
        if not (math.isfinite(self.mu) and self.mu > 0):
            raise ValidationError(f"mu must be finite and > 0, got {self.mu}")
        if int(self.max_iters) != self.max_iters or self.max_iters < 1:
            raise ValidationError(f"max_iters must be an integer >= 1, got {self.max_iters}")
        if not (math.isfinite(self.epsilon) and self.epsilon > 0):
            raise ValidationError(f"epsilon must be finite and > 0, got {self.epsilon}")
        object.__setattr__(self, "lam", float(self.lam))
        object.__setattr__(self, "mu", float(self.mu))
        object.__setattr__(self, "max_iters", int(self.max_iters))
        object.__setattr__(self, "epsilon", float(self.epsilon))


@dataclass(frozen=True)
class JointState:
    """One iterate of the joint solver: primal blocks and multipliers."""

    l: np.ndarray
    s_i: np.ndarray
    s_t: np.ndarray
    z_i: np.ndarray
    z_t: np.ndarray

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "JointState":
        z = np.zeros((rows, cols))
        return cls(l=z, s_i=z.copy(), s_t=z.copy(), z_i=z.copy(), z_t=z.copy())


@dataclass
class JointDecomposition:
    """Converged (or capped) joint solver output."""

    l: np.ndarray
    s_i: np.ndarray
    s_t: np.ndarray
    z_i: np.ndarray
    z_t: np.ndarray
    iterations_run: int
    converged: bool
    residual_history: list[tuple[float, float]] = field(default_factory=list)


@dataclass(frozen=True)
class SingleState:
    l: np.ndarray
    s: np.ndarray
    z: np.ndarray

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "SingleState":
        z = np.zeros((rows, cols))
        return cls(l=z, s=z.copy(), z=z.copy())


@dataclass
class SingleDecomposition:
    """Converged (or capped) single-matrix solver output."""

    l: np.ndarray
    s: np.ndarray
    z: np.ndarray
    iterations_run: int
    converged: bool
    residual_history: list[float] = field(default_factory=list)


def joint_step(state: JointState, i: np.ndarray, t: np.ndarray, cfg: SolverConfig) -> JointState:
    """One iteration of the joint solver.

    Sparse updates use threshold lam/mu, the shared low-rank update
    averages both corrected observations and thresholds singular values
    at 1/(2*mu), and the multipliers ascend along the residuals.
    """
    if state.l.shape != i.shape or i.shape != t.shape:
        raise DimensionError(
            f"state/input shape mismatch: state {state.l.shape}, i {i.shape}, t {t.shape}"
        )
    mu = cfg.mu
    thr = cfg.lam / mu
    s_i = soft_threshold(i - state.l + state.z_i / mu, thr)
    s_t = soft_threshold(t - state.l + state.z_t / mu, thr)
    a = 0.5 * ((i - s_i) + (t - s_t) + (state.z_i + state.z_t) / mu)
    l = svt(a, 1.0 / (2.0 * mu))
    z_i = state.z_i + mu * (i - l - s_i)
    z_t = state.z_t + mu * (t - l - s_t)
    return JointState(l=l, s_i=s_i, s_t=s_t, z_i=z_i, z_t=z_t)


def residuals(state: JointState, i: np.ndarray, t: np.ndarray) -> tuple[float, float]:
    """Frobenius residuals (||I - L - S_I||_F, ||T - L - S_T||_F)."""
    i = as_matrix(i, "i")
    t = as_matrix(t, "t")
    require_same_shape(state.l, i, "state", "i")
    require_same_shape(i, t, "i", "t")
    r_i = frobenius_norm(i - state.l - state.s_i)
    r_t = frobenius_norm(t - state.l - state.s_t)
    return r_i, r_t


def joint_decompose(i, t, cfg: SolverConfig | None = None) -> JointDecomposition:
    """Decompose equal-shape matrices i and t into shared L plus S_I, S_T.

    All five state matrices start at zero; iteration stops once the max
    residual drops below cfg.epsilon (the converged iteration counts) or
    after cfg.max_iters iterations.
    """
    i = as_matrix(i, "i")
    t = as_matrix(t, "t")
    require_same_shape(i, t, "i", "t")
    if cfg is None:
        cfg = SolverConfig()
    state = JointState.zeros(*i.shape)
    history: list[tuple[float, float]] = []
    converged = False
    iterations = 0
    for k in range(1, cfg.max_iters + 1):
        try:
            state = joint_step(state, i, t, cfg)
        except NumericalError as exc:
            raise NumericalError(f"iteration {k}: {exc}") from exc
        r_i, r_t = residuals(state, i, t)
        history.append((r_i, r_t))
        iterations = k
        if max(r_i, r_t) < cfg.epsilon:
            converged = True
            break
    return JointDecomposition(
        l=state.l,
        s_i=state.s_i,
        s_t=state.s_t,
        z_i=state.z_i,
        z_t=state.z_t,
        iterations_run=iterations,
        converged=converged,
        residual_history=history,
    )


def lmr_step(state: SingleState, x: np.ndarray, cfg: SolverConfig, svt_tau: float) -> SingleState:
    """One iteration of the single-matrix solver."""
    if state.l.shape != x.shape:
        raise DimensionError(f"state/input shape mismatch: state {state.l.shape}, x {x.shape}")
    mu = cfg.mu
    s = soft_threshold(x - state.l + state.z / mu, cfg.lam / mu)
    a = (x - s) + state.z / mu
    l = svt(a, svt_tau)
    z = state.z + mu * (x - l - s)
    return SingleState(l=l, s=s, z=z)


def lmr_decompose(x, cfg: SolverConfig | None = None, svt_tau: float | None = None) -> SingleDecomposition:
    """Decompose x into low-rank L plus sparse S (X = L + S).

    svt_tau defaults to 1/mu; passing 1/(2*mu) makes the run match
    ``joint_decompose(x, x, cfg)`` iterate for iterate.
    """
    x = as_matrix(x, "x")
    if cfg is None:
        cfg = SolverConfig()
    if svt_tau is None:
        svt_tau = 1.0 / cfg.mu
    svt_tau = float(svt_tau)
    if not (math.isfinite(svt_tau) and svt_tau > 0):
        raise ValidationError(f"svt_tau must be finite and > 0, got {svt_tau}")
    state = SingleState.zeros(*x.shape)
    history: list[float] = []
    converged = False
    iterations = 0
    for k in range(1, cfg.max_iters + 1):
        try:
            state = lmr_step(state, x, cfg, svt_tau)
        except NumericalError as exc:
            raise NumericalError(f"iteration {k}: {exc}") from exc
        r = frobenius_norm(x - state.l - state.s)
        history.append(r)
        iterations = k
        if r < cfg.epsilon:
            converged = True
            break
    return SingleDecomposition(
        l=state.l,
        s=state.s,
        z=state.z,
        iterations_run=iterations,
        converged=converged,
        residual_history=history,
    )
