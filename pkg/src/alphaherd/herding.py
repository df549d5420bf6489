"""Greedy alpha-MMD minimization by generalized kernel herding.

Both algorithms keep a running average ``s[i]`` of the similarity between
candidate ``i`` and the points selected so far, and at step ``p`` pick::

    argmin_i  s[i] - alpha * mu[i]

``gkh`` searches every index (selections may repeat); ``gkhr`` skips indices
that were already chosen. Each step costs one kernel row plus ``O(n)``
vector work, so a run is ``O(m n)`` after the ``O(n^2)`` context build.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np

from .discrepancy import AlphaLike, AlphaParam, alpha_mmd_sq, alpha_value
from .errors import ValidationError
from .kernel import Dataset, KernelContext, KernelSpec, build_context, median_bandwidth

# Scores within this (relative) distance of the minimum count as ties and
# resolve to the lowest index.
TIE_TOL = 1e-12


@dataclass
class HerdingState:
    """Mutable loop state, handed to the optional per-step callback."""

    s: np.ndarray
    selected: List[int]
    p: int = 0
    beta: float = 1.0


@dataclass
class SelectionResult:
    indices: List[int]
    scores: List[float]
    alpha: Optional[AlphaParam]
    algorithm: str
    final_alpha_mmd_sq: float
    wall_time: float = field(default=0.0, compare=False)


def argmin_lowest(scores: np.ndarray, tol: float = TIE_TOL) -> int:
    """Index of the minimum, resolving near-ties to the lowest index."""
    i = int(np.argmin(scores))
    best = scores[i]
    cutoff = best + tol * max(1.0, abs(best))
    return int(np.argmax(scores[: i + 1] <= cutoff))


def _herd(
    ctx: KernelContext,
    m: int,
    alpha: AlphaLike,
    replacement: bool,
    callback: Optional[Callable[[HerdingState], None]],
) -> SelectionResult:
    a = alpha_value(alpha)
    n = ctx.n
    # selected indices get offset -inf so their score is +inf under gkhr
    offset = a * ctx.mu
    state = HerdingState(s=np.zeros(n), selected=[])
    scores = []
    score = np.empty(n)

    start = time.perf_counter()
    for p in range(1, m + 1):
        np.subtract(state.s, offset, out=score)
        i = argmin_lowest(score)
        scores.append(float(score[i]))
        beta = 1.0 / p
        # s_p = (1 - beta) s_{p-1} + beta k(x_i, .), updated for every index
        state.s *= 1.0 - beta
        state.s += beta * ctx.row(i)
        state.selected.append(i)
        state.p = p
        state.beta = beta
        if not replacement:
            offset[i] = -np.inf
        if callback is not None:
            callback(state)
    elapsed = time.perf_counter() - start

    alpha_param = alpha if isinstance(alpha, AlphaParam) else AlphaParam.explicit(a)
    return SelectionResult(
        indices=list(state.selected),
        scores=scores,
        alpha=alpha_param,
        algorithm="gkh" if replacement else "gkhr",
        final_alpha_mmd_sq=alpha_mmd_sq(ctx, state.selected, a),
        wall_time=elapsed,
    )


def gkhr(
    ctx: KernelContext,
    m: int,
    alpha: AlphaLike,
    callback: Optional[Callable[[HerdingState], None]] = None,
) -> SelectionResult:
    """Generalized kernel herding without replacement.

    Args:
        ctx: Kernel context of the ground set.
        m: Budget, ``1 <= m <= n``.
        alpha: Trade-off weight in ``[0, 1]``.
        callback: Called with the loop state after every step.

    Returns:
        ``m`` distinct indices in selection order.
    """
    if m < 1:
        raise ValidationError(f"budget m must be >= 1, got {m}")
    if m > ctx.n:
        raise ValidationError(f"budget exceeds ground set: m={m} > n={ctx.n}")
    return _herd(ctx, m, alpha, replacement=False, callback=callback)


def gkh(
    ctx: KernelContext,
    m: int,
    alpha: AlphaLike,
    callback: Optional[Callable[[HerdingState], None]] = None,
) -> SelectionResult:
    """Generalized kernel herding with replacement; ``m`` may exceed ``n``."""
    if m < 1:
        raise ValidationError(f"budget m must be >= 1, got {m}")
    return _herd(ctx, m, alpha, replacement=True, callback=callback)


ALGORITHMS = {"gkhr": gkhr, "gkh": gkh}


def resolve_alpha(alpha, m: int, n: int) -> AlphaParam:
    """Turn ``"auto"``, ``"ratio"``, a float or an AlphaParam into an AlphaParam."""
    if isinstance(alpha, AlphaParam):
        return alpha
    if alpha is None or alpha == "auto":
        return AlphaParam.auto_budget(m)
    if alpha == "ratio":
        return AlphaParam.ratio(m, n)
    return AlphaParam.explicit(float(alpha))


def resolve_kernel(dataset: Dataset, kernel=None, seed: int = 0) -> KernelSpec:
    """``None``/``"auto"`` means a gaussian kernel at the median bandwidth."""
    if isinstance(kernel, KernelSpec):
        return kernel
    if kernel is None or kernel == "auto":
        return KernelSpec.gaussian(median_bandwidth(dataset, seed=seed))
    raise ValidationError(f"unsupported kernel option {kernel!r}")


def select(
    dataset: Dataset,
    m: int,
    *,
    kernel=None,
    alpha=None,
    algorithm: str = "gkhr",
    gram_cache: bool = False,
    seed: int = 0,
) -> SelectionResult:
    """Select ``m`` representative and diverse samples from ``dataset``.

    Defaults: gaussian kernel with median-heuristic bandwidth and
    ``alpha = 1 - 1/sqrt(m)``. ``seed`` only affects bandwidth subsampling on
    large inputs; the herding itself is deterministic.
    """
    if algorithm not in ALGORITHMS:
        raise ValidationError(f"unknown algorithm {algorithm!r}")
    if algorithm == "gkhr" and m > dataset.n:
        raise ValidationError(f"budget exceeds ground set: m={m} > n={dataset.n}")
    alpha = resolve_alpha(alpha, m, dataset.n)
    spec = resolve_kernel(dataset, kernel, seed)
    ctx = build_context(dataset, spec, cache_gram=gram_cache)
    return ALGORITHMS[algorithm](ctx, m, alpha)
