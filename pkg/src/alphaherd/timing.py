"""Wall-clock scaling of the herding loop."""

from __future__ import annotations

import statistics
import time
from dataclasses import asdict, dataclass, field
from typing import List, Sequence

from .discrepancy import AlphaParam
from .herding import gkhr
from .kernel import KernelSpec, build_context, median_bandwidth
from .synth import get_distribution, sample


@dataclass
class TimingCell:
    n: int
    m: int
    select_seconds: List[float] = field(default_factory=list)
    context_seconds: List[float] = field(default_factory=list)
    select_median: float = 0.0
    context_median: float = 0.0


def time_selection(
    ns: Sequence[int],
    m: int,
    dist: str = "gmm2",
    seed: int = 0,
    repeats: int = 3,
    dim: int = 2,
) -> dict:
    """Time context construction and GKHR separately for each ``n``.

    ``select_seconds`` covers only the greedy loop (the ``O(m n)`` part);
    ``context_seconds`` covers the ``O(n^2)`` mean-similarity pass. Ratios
    between consecutive ``n`` use the loop medians.
    """
    spec = get_distribution(dist, dim=dim)
    cells = []
    for n in ns:
        data = sample(spec, n, seed)
        kern = KernelSpec.gaussian(median_bandwidth(data, seed=seed))
        alpha = AlphaParam.auto_budget(m)
        cell = TimingCell(n=n, m=m)
        for _ in range(repeats):
            t0 = time.perf_counter()
            ctx = build_context(data, kern)
            cell.context_seconds.append(time.perf_counter() - t0)
            cell.select_seconds.append(gkhr(ctx, m, alpha).wall_time)
        cell.select_median = statistics.median(cell.select_seconds)
        cell.context_median = statistics.median(cell.context_seconds)
        cells.append(cell)
    ratios = [
        {"n": a.n, "n_next": b.n, "ratio": b.select_median / a.select_median}
        for a, b in zip(cells, cells[1:])
    ]
    return {"dist": dist, "dim": dim, "seed": seed, "cells": [asdict(c) for c in cells], "ratios": ratios}
