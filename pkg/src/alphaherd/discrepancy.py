"""Exact evaluation of average similarity, MMD and alpha-MMD.

For a selection ``I`` (a multiset of size ``m``) of a ground set of size ``n``
the alpha-MMD is::

    alpha^2 * kbar + (1/m^2) sum_{i,j in I} k(x_i, x_j) - (2 alpha / m) sum_{j in I} mu[j]

which is plain (biased, V-statistic) MMD^2 at ``alpha = 1`` and the average
pairwise similarity of the selection at ``alpha = 0``. All three quantities
go through :func:`_combine` so the degenerate cases agree bit for bit.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import ValidationError
from .kernel import KernelContext

ZERO_CLAMP = 1e-12
WEIGHT_SUM_TOL = 1e-9


class AlphaOrigin(str, enum.Enum):
    EXPLICIT = "explicit"
    AUTO_BUDGET = "auto_budget"
    RATIO = "ratio"


@dataclass(frozen=True)
class AlphaParam:
    """Trade-off weight between representativeness and diversity."""

    alpha: float
    origin: AlphaOrigin = AlphaOrigin.EXPLICIT

    def __post_init__(self):
        object.__setattr__(self, "origin", AlphaOrigin(self.origin))
        a = float(self.alpha)
        if not 0.0 <= a <= 1.0:
            raise ValidationError(f"alpha must lie in [0, 1], got {self.alpha}")
        object.__setattr__(self, "alpha", a)

    @classmethod
    def explicit(cls, alpha: float) -> "AlphaParam":
        return cls(alpha, AlphaOrigin.EXPLICIT)

    @classmethod
    def auto_budget(cls, m: int) -> "AlphaParam":
        """``1 - 1/sqrt(m)``, the lower end of the recommended tuning range."""
        if m < 1:
            raise ValidationError(f"auto alpha needs budget m >= 1, got {m}")
        return cls(1.0 - 1.0 / math.sqrt(m), AlphaOrigin.AUTO_BUDGET)

    @classmethod
    def ratio(cls, m: int, n: int) -> "AlphaParam":
        if not 1 <= m <= n:
            raise ValidationError(f"ratio alpha needs 1 <= m <= n, got m={m}, n={n}")
        return cls(m / n, AlphaOrigin.RATIO)

    def to_dict(self) -> dict:
        return {"value": self.alpha, "rule": self.origin.value}

    @classmethod
    def from_dict(cls, data: dict) -> "AlphaParam":
        return cls(float(data["value"]), AlphaOrigin(data["rule"]))


AlphaLike = Union[AlphaParam, float]


def alpha_value(alpha: AlphaLike) -> float:
    if isinstance(alpha, AlphaParam):
        return alpha.alpha
    return AlphaParam.explicit(alpha).alpha


@dataclass(frozen=True)
class WeightVector:
    """Affine weights over the ground set (``sum(w) == 1``).

    ``jitter`` records any diagonal regularization used to produce ``w``.
    """

    w: np.ndarray
    jitter: float = 0.0

    def __post_init__(self):
        w = np.array(self.w, dtype=np.float64)
        if w.ndim != 1:
            raise ValidationError("weights must be a vector")
        total = float(w.sum())
        if abs(total - 1.0) > WEIGHT_SUM_TOL:
            raise ValidationError(f"weights must sum to 1, got {total!r}")
        object.__setattr__(self, "w", w)

    @classmethod
    def uniform(cls, n: int, indices: Sequence[int] | None = None) -> "WeightVector":
        w = np.zeros(n)
        if indices is None:
            w[:] = 1.0 / n
        else:
            idx = np.asarray(indices, dtype=np.intp)
            np.add.at(w, idx, 1.0 / idx.size)
        return cls(w)


def _check_indices(ctx: KernelContext, indices) -> np.ndarray:
    idx = np.asarray(indices, dtype=np.intp).ravel()
    if idx.size == 0:
        raise ValidationError("index set must be non-empty")
    if idx.min() < 0 or idx.max() >= ctx.n:
        raise ValidationError(f"indices must lie in [0, {ctx.n})")
    return idx


def _self_term(ctx: KernelContext, idx: np.ndarray) -> float:
    """``sum_{i, j in idx} k(x_i, x_j)`` accumulated row block by row block."""
    m = idx.size
    step = max(1, (1 << 22) // m)
    total = 0.0
    for lo in range(0, m, step):
        total += float(ctx.block(idx[lo : lo + step], idx).sum())
    return total


def _clamp(value: float) -> float:
    return 0.0 if abs(value) <= ZERO_CLAMP else value


def _combine(ctx: KernelContext, idx: np.ndarray, a: float) -> float:
    m = idx.size
    self_avg = _self_term(ctx, idx) / (m * m)
    cross = float(ctx.mu[idx].sum()) / m
    return _clamp(a * a * ctx.kbar + self_avg - 2.0 * a * cross)


def avg_similarity(ctx: KernelContext, indices) -> float:
    """Average pairwise similarity of the selection, diagonal included."""
    return _combine(ctx, _check_indices(ctx, indices), 0.0)


def mmd_sq(ctx: KernelContext, indices) -> float:
    """Biased empirical MMD^2 between the selection and the full dataset."""
    return _combine(ctx, _check_indices(ctx, indices), 1.0)


def alpha_mmd_sq(ctx: KernelContext, indices, alpha: AlphaLike) -> float:
    """alpha-MMD^2 between the selection (multiset) and the full dataset."""
    return _combine(ctx, _check_indices(ctx, indices), alpha_value(alpha))


def weighted_alpha_mmd_sq(ctx: KernelContext, w, alpha: AlphaLike) -> float:
    """``w^T K w - 2 alpha w^T mu + alpha^2 kbar`` for affine weights ``w``.

    Only the support of ``w`` is touched, so sparse weights are cheap in
    lazy mode.
    """
    if not isinstance(w, WeightVector):
        w = WeightVector(w)
    vec = w.w
    if vec.shape[0] != ctx.n:
        raise ValidationError(f"weights have length {vec.shape[0]}, expected {ctx.n}")
    a = alpha_value(alpha)
    support = np.flatnonzero(vec)
    ws = vec[support]
    quad = float(ws @ ctx.block(support, support) @ ws)
    lin = float(ws @ ctx.mu[support])
    return _clamp(quad - 2.0 * a * lin + a * a * ctx.kbar)


def lambda_from_alpha(alpha: float, m: int) -> float:
    """Diversity penalty ``lambda = (1 - alpha) / (alpha m)`` matching ``alpha``.

    The penalized objective reproduces alpha-MMD exactly when the penalty is
    applied as ``m * lambda``::

        alpha * (MMD^2 + m * lambda * S) == alpha-MMD^2 + alpha (1 - alpha) kbar
    """
    if m < 1:
        raise ValidationError(f"budget must be >= 1, got {m}")
    if not 0.0 < alpha <= 1.0:
        raise ValidationError(f"alpha must lie in (0, 1], got {alpha}")
    return (1.0 - alpha) / (alpha * m)


def alpha_from_lambda(lam: float, m: int) -> float:
    if m < 1:
        raise ValidationError(f"budget must be >= 1, got {m}")
    if lam < 0:
        raise ValidationError(f"lambda must be non-negative, got {lam}")
    return 1.0 / (1.0 + lam * m)
