"""Reference samplers: random, stratified and k-means."""

from __future__ import annotations

import time

import numpy as np
from scipy.spatial.distance import cdist

from .errors import ValidationError
from .herding import SelectionResult
from .kernel import Dataset
from .synth import make_rng


def _result(indices, algorithm, start) -> SelectionResult:
    return SelectionResult(
        indices=[int(i) for i in indices],
        scores=[],
        alpha=None,
        algorithm=algorithm,
        final_alpha_mmd_sq=float("nan"),
        wall_time=time.perf_counter() - start,
    )


def _check_budget(dataset: Dataset, m: int):
    if not 1 <= m <= dataset.n:
        raise ValidationError(f"budget must satisfy 1 <= m <= n={dataset.n}, got {m}")


def baseline_random(dataset: Dataset, m: int, seed=0) -> SelectionResult:
    """Uniform sample of ``m`` distinct indices."""
    _check_budget(dataset, m)
    start = time.perf_counter()
    idx = make_rng(seed).choice(dataset.n, size=m, replace=False)
    return _result(idx, "random", start)


def apportion(counts, m: int) -> np.ndarray:
    """Largest-remainder split of ``m`` proportional to ``counts``.

    Remainder ties go to the earlier class. Allocations never exceed the
    class size because ``m <= sum(counts)``.
    """
    counts = np.asarray(counts, dtype=np.int64)
    quota = m * counts / counts.sum()
    alloc = np.floor(quota).astype(np.int64)
    short = m - int(alloc.sum())
    order = np.lexsort((np.arange(counts.size), -(quota - alloc)))
    alloc[order[:short]] += 1
    return alloc


def baseline_stratified(dataset: Dataset, m: int, seed=0) -> SelectionResult:
    """Per-class uniform draws with proportional (largest remainder) quotas."""
    if dataset.labels is None:
        raise ValidationError("stratified sampling requires labels")
    _check_budget(dataset, m)
    classes, counts = np.unique(dataset.labels, return_counts=True)
    if m < classes.size:
        raise ValidationError(f"budget m={m} is below the number of classes {classes.size}")
    start = time.perf_counter()
    rng = make_rng(seed)
    picked = []
    for c, k in zip(classes, apportion(counts, m)):
        members = np.flatnonzero(dataset.labels == c)
        picked.extend(rng.choice(members, size=int(k), replace=False).tolist())
    return _result(picked, "stratified", start)


def kmeans_plusplus(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = x.shape[0]
    chosen = [int(rng.integers(n))]
    d2 = ((x - x[chosen[0]]) ** 2).sum(axis=1)
    for _ in range(1, k):
        total = d2.sum()
        if total > 0:
            nxt = int(rng.choice(n, p=d2 / total))
        else:
            # every remaining point coincides with a centre
            free = np.setdiff1d(np.arange(n), chosen)
            nxt = int(rng.choice(free))
        chosen.append(nxt)
        d2 = np.minimum(d2, ((x - x[nxt]) ** 2).sum(axis=1))
    return x[chosen].copy()


def _assign(x: np.ndarray, centers: np.ndarray) -> np.ndarray:
    step = max(1, (1 << 22) // centers.shape[0])
    out = np.empty(x.shape[0], dtype=np.intp)
    for lo in range(0, x.shape[0], step):
        out[lo : lo + step] = np.argmin(cdist(x[lo : lo + step], centers, "sqeuclidean"), axis=1)
    return out


def lloyd(x: np.ndarray, centers: np.ndarray, iters: int = 50, tol: float = 1e-6) -> np.ndarray:
    """Lloyd iterations; empty clusters keep their previous centre."""
    for _ in range(iters):
        assign = _assign(x, centers)
        new = centers.copy()
        for j in range(centers.shape[0]):
            members = x[assign == j]
            if members.size:
                new[j] = members.mean(axis=0)
        shift = float(np.max(np.abs(new - centers)))
        centers = new
        if shift < tol:
            break
    return centers


def baseline_kmeans(dataset: Dataset, m: int, seed=0, iters: int = 50) -> SelectionResult:
    """k-means++ seeding, Lloyd refinement, then the nearest unused point per centroid."""
    _check_budget(dataset, m)
    start = time.perf_counter()
    x = dataset.features
    rng = make_rng(seed)
    centers = lloyd(x, kmeans_plusplus(x, m, rng), iters=iters)
    used = np.zeros(dataset.n, dtype=bool)
    picked = []
    for c in centers:
        dist = ((x - c) ** 2).sum(axis=1)
        dist[used] = np.inf
        i = int(np.argmin(dist))
        used[i] = True
        picked.append(i)
    return _result(picked, "kmeans", start)


BASELINES = {
    "random": baseline_random,
    "stratified": baseline_stratified,
    "kmeans": baseline_kmeans,
}
