"""Representative and diverse sample selection by greedy alpha-MMD minimization."""

from .discrepancy import (
    AlphaParam,
    WeightVector,
    alpha_from_lambda,
    alpha_mmd_sq,
    avg_similarity,
    lambda_from_alpha,
    mmd_sq,
    weighted_alpha_mmd_sq,
)
from .errors import DegenerateDatasetError, FormatError, IllConditionedError, ValidationError
from .herding import SelectionResult, gkh, gkhr, select
from .kernel import Dataset, KernelContext, KernelSpec, build_context, kernel_eval, median_bandwidth

__all__ = [
    "AlphaParam",
    "Dataset",
    "DegenerateDatasetError",
    "FormatError",
    "IllConditionedError",
    "KernelContext",
    "KernelSpec",
    "SelectionResult",
    "ValidationError",
    "WeightVector",
    "alpha_from_lambda",
    "alpha_mmd_sq",
    "avg_similarity",
    "build_context",
    "gkh",
    "gkhr",
    "kernel_eval",
    "lambda_from_alpha",
    "median_bandwidth",
    "mmd_sq",
    "select",
    "weighted_alpha_mmd_sq",
]

__version__ = "0.1.0"
