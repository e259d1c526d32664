"""Shared low-rank + sparse decomposition of paired feature matrices.

A pair of equal-shape matrices is split into one shared low-rank component
and two modality-specific sparse components by an augmented-Lagrangian
alternating solver; an attention layer then scores the three components
and aggregates them into a single weighted matrix.
"""

__version__ = "0.1.0"

from .errors import DimensionError, FormatError, NumericalError, ValidationError
from .fusion import (
    AttentionParams,
    FusionResult,
    attention_weights,
    fuse,
    fuse_with_weights,
    fusion_gradients,
    params_from_matrix,
    params_to_matrix,
    score,
)
from .kernels import (
    SvdResult,
    add,
    as_matrix,
    flatten,
    frobenius_norm,
    require_same_shape,
    reshape,
    scale,
    soft_threshold,
    sub,
    svd,
    svt,
)
from .matrixio import (
    read_matrix,
    read_matrix_csv,
    read_matrix_rdm,
    sha256_file,
    write_matrix,
    write_matrix_csv,
    write_matrix_rdm,
)
from .solvers import (
    JointDecomposition,
    JointState,
    SingleDecomposition,
    SingleState,
    SolverConfig,
    joint_decompose,
    joint_step,
    lmr_decompose,
    lmr_step,
    residuals,
)
from .synth import (
    GENERATOR_ID,
    RecoveryMetrics,
    SyntheticInstance,
    SyntheticSpec,
    component_metrics,
    generate,
    numerical_rank,
    recovery_metrics,
)

__all__ = [
    "__version__",
    "DimensionError",
    "FormatError",
    "NumericalError",
    "ValidationError",
    "SvdResult",
    "add",
    "as_matrix",
    "flatten",
    "frobenius_norm",
    "require_same_shape",
    "reshape",
    "scale",
    "soft_threshold",
    "sub",
    "svd",
    "svt",
    "SolverConfig",
    "JointState",
    "JointDecomposition",
    "SingleState",
    "SingleDecomposition",
    "joint_decompose",
    "joint_step",
    "lmr_decompose",
    "lmr_step",
    "residuals",
    "AttentionParams",
    "FusionResult",
    "attention_weights",
    "fuse",
    "fuse_with_weights",
    "fusion_gradients",
    "params_from_matrix",
    "params_to_matrix",
    "score",
    "GENERATOR_ID",
    "SyntheticSpec",
    "SyntheticInstance",
    "RecoveryMetrics",
    "component_metrics",
    "generate",
    "numerical_rank",
    "recovery_metrics",
    "read_matrix",
    "read_matrix_csv",
    "read_matrix_rdm",
    "sha256_file",
    "write_matrix",
    "write_matrix_csv",
    "write_matrix_rdm",
]
