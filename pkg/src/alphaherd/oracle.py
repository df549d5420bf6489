"""Reference computations for checking the greedy path.

Nothing here is used by :mod:`alphaherd.herding`; these are brute-force or
closed-form ground truths for tests and the ``oracle`` CLI command.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass
from typing import List, Optional

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .discrepancy import AlphaLike, WeightVector, alpha_mmd_sq, alpha_value, mmd_sq
from .errors import IllConditionedError, ValidationError
from .herding import gkh, gkhr
from .kernel import KernelContext

MAX_CANDIDATES = 1_000_000
MAX_CONDITION = 1e12
BOUND_SLACK = 1e-9
_TIE_TOL = 1e-12
_BATCH = 20_000


@dataclass
class OracleReport:
    best_indices: List[int]
    best_value: float
    enumerated: int
    greedy_value: float
    gap: float
    greedy_indices: Optional[List[int]] = None

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "OracleReport":
        return cls(**data)


def candidate_count(n: int, m: int, replacement: bool) -> int:
    return math.comb(n + m - 1, m) if replacement else math.comb(n, m)


def _dense_gram(ctx: KernelContext) -> np.ndarray:
    if ctx.gram is not None:
        return ctx.gram
    idx = np.arange(ctx.n)
    return ctx.block(idx, idx)


def exhaustive_min(
    ctx: KernelContext, m: int, alpha: AlphaLike, replacement: bool = False
) -> OracleReport:
    """Minimize alpha-MMD^2 over every size-``m`` subset (or multiset).

    Candidates are scored in batches straight from the Gram matrix, an
    evaluation route independent of :mod:`alphaherd.discrepancy`. Ties go to
    the lexicographically smallest index tuple.
    """
    n = ctx.n
    if m < 1 or (not replacement and m > n):
        raise ValidationError(f"invalid budget m={m} for n={n}")
    total = candidate_count(n, m, replacement)
    if total > MAX_CANDIDATES:
        raise ValidationError(
            f"{total} candidates exceed the enumeration guard of {MAX_CANDIDATES}"
        )
    a = alpha_value(alpha)
    gram = _dense_gram(ctx)
    kbar = gram.sum() / (n * n)
    mu = gram.sum(axis=0) / n
    gen = (itertools.combinations_with_replacement if replacement else itertools.combinations)(
        range(n), m
    )

    best_val = np.inf
    best = None
    while True:
        batch = np.array(list(itertools.islice(gen, _BATCH)), dtype=np.intp)
        if batch.size == 0:
            break
        batch = batch.reshape(-1, m)
        self_sum = gram[batch[:, :, None], batch[:, None, :]].sum(axis=(1, 2))
        vals = a * a * kbar + self_sum / (m * m) - 2.0 * a * mu[batch].sum(axis=1) / m
        low = vals.min()
        # strict improvement beyond tolerance keeps the earliest (lexicographic) tie
        if best is None or low < best_val - _TIE_TOL * max(1.0, abs(best_val)):
            cutoff = low + _TIE_TOL * max(1.0, abs(low))
            j = int(np.flatnonzero(vals <= cutoff)[0])
            best_val, best = float(vals[j]), batch[j].tolist()

    greedy = (gkh if replacement else gkhr)(ctx, m, a)
    if abs(best_val) <= 1e-12:
        best_val = 0.0
    return OracleReport(
        best_indices=best,
        best_value=best_val,
        enumerated=total,
        greedy_value=greedy.final_alpha_mmd_sq,
        gap=greedy.final_alpha_mmd_sq - best_val,
        greedy_indices=greedy.indices,
    )


def optimal_affine_weights(
    ctx: KernelContext, alpha: AlphaLike, jitter: Optional[float] = None
) -> WeightVector:
    """Closed-form minimizer of the weighted alpha-MMD over ``sum(w) = 1``.

    With ``u = K^{-1} 1`` and ``v = K^{-1} mu``::

        w = alpha * (v - u (1^T v) / (1^T u)) + u / (1^T u)

    Entries may be negative. If the Gram condition number exceeds 1e12 the
    solve is refused unless ``jitter`` is given, in which case
    ``jitter * K`` is added to the diagonal and recorded on the result.

    Raises:
        IllConditionedError: Gram matrix too ill-conditioned (or not PD).
    """
    a = alpha_value(alpha)
    gram = np.array(_dense_gram(ctx), dtype=np.float64)
    n = gram.shape[0]
    shift = 0.0
    cond = np.linalg.cond(gram)
    if not np.isfinite(cond) or cond > MAX_CONDITION:
        if jitter is None:
            raise IllConditionedError(
                f"Gram condition number {cond:.3g} exceeds {MAX_CONDITION:.0e}; "
                "retry with a diagonal jitter (e.g. jitter=1e-10)"
            )
        shift = float(jitter) * ctx.kmax
        gram[np.diag_indices(n)] += shift
    try:
        factor = cho_factor(gram)
    except np.linalg.LinAlgError as exc:
        raise IllConditionedError(f"Gram matrix is not positive definite: {exc}") from exc
    ones = np.ones(n)
    u = cho_solve(factor, ones)
    v = cho_solve(factor, np.asarray(ctx.mu))
    denom = u.sum()
    w = a * (v - u * (v.sum() / denom)) + u / denom
    return WeightVector(w, jitter=shift)


def bound_constants(ctx: KernelContext, alpha: AlphaLike, m: int) -> dict:
    """Constants of the finite-sample bound for greedy herding.

    Returns ``c_alpha_sq = (1 - alpha)^2 kbar``, ``b = 2 K`` and
    ``rhs = c_alpha_sq + b (2 + ln m) / (m + 1)``.
    """
    if m < 1:
        raise ValidationError(f"budget must be >= 1, got {m}")
    a = alpha_value(alpha)
    c = (1.0 - a) ** 2 * ctx.kbar
    b = 2.0 * ctx.kmax
    return {
        "c_alpha_sq": c,
        "b": b,
        "rhs": c + b * (2.0 + math.log(m)) / (m + 1),
        "log": "natural",
    }


def bound_satisfied(value: float, constants: dict) -> bool:
    return value <= constants["rhs"] + BOUND_SLACK


def mmd_deviation_bound_check(ctx: KernelContext, indices, alpha: AlphaLike) -> dict:
    """Check ``|sqrt(alpha-MMD^2) - sqrt(MMD^2)| <= (1 - alpha) sqrt(K)``."""
    a = alpha_value(alpha)
    lhs = abs(math.sqrt(alpha_mmd_sq(ctx, indices, a)) - math.sqrt(mmd_sq(ctx, indices)))
    rhs = (1.0 - a) * math.sqrt(ctx.kmax)
    return {"lhs": lhs, "rhs": rhs, "margin": rhs - lhs, "passed": lhs <= rhs + BOUND_SLACK}
