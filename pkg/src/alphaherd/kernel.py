"""Kernel evaluation, bandwidth selection and per-dataset kernel summaries.

This is the only module that looks at raw feature geometry. Everything
downstream works with kernel rows, the mean-similarity vector ``mu`` and
the Gram mean ``kbar`` exposed by :class:`KernelContext`.

Pairwise squared distances are computed per pair as ``sum_k (x_k - y_k)**2``
(never via the ``|x|^2 + |y|^2 - 2<x, y>`` expansion) so that kernel values
are exactly symmetric and never see negative round-off distances.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.spatial.distance import cdist, pdist

from .errors import DegenerateDatasetError, ValidationError

# Upper bound on the number of float64 entries materialized per block when
# building mu / the Gram matrix.
_BLOCK_ENTRIES = 1 << 22

MEDIAN_SUBSAMPLE_THRESHOLD = 10_000


@dataclass(frozen=True, eq=False)
class Dataset:
    """An ``n x d`` matrix of finite features with optional integer labels."""

    features: np.ndarray
    labels: Optional[np.ndarray] = None

    def __post_init__(self):
        x = np.array(self.features, dtype=np.float64, order="C", copy=True)
        if x.ndim == 1:
            x = x.reshape(-1, 1)
        if x.ndim != 2:
            raise ValidationError(f"features must be 2-D, got {x.ndim}-D")
        if x.shape[0] < 1 or x.shape[1] < 1:
            raise ValidationError(f"features must be non-empty, got shape {x.shape}")
        bad = ~np.isfinite(x)
        if bad.any():
            row = int(np.argwhere(bad)[0, 0])
            raise ValidationError(f"non-finite feature value in row {row}")
        x.setflags(write=False)
        object.__setattr__(self, "features", x)

        if self.labels is not None:
            y = np.asarray(self.labels)
            if y.ndim != 1 or y.shape[0] != x.shape[0]:
                raise ValidationError(
                    f"labels must have length n={x.shape[0]}, got shape {y.shape}"
                )
            if y.size and not np.issubdtype(y.dtype, np.integer):
                if not np.all(np.equal(np.mod(y, 1), 0)):
                    raise ValidationError("labels must be integers")
            y = np.array(y, dtype=np.int64, copy=True)
            y.setflags(write=False)
            object.__setattr__(self, "labels", y)

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        if self.features.shape != other.features.shape:
            return False
        if not np.array_equal(self.features, other.features):
            return False
        if (self.labels is None) != (other.labels is None):
            return False
        return self.labels is None or np.array_equal(self.labels, other.labels)


class KernelKind(str, enum.Enum):
    GAUSSIAN = "gaussian"
    LAPLACIAN = "laplacian"
    POLYNOMIAL = "polynomial"


@dataclass(frozen=True)
class KernelSpec:
    """Kernel definition.

    gaussian:   ``exp(-|x - y|^2 / sigma^2)``
    laplacian:  ``exp(-|x - y| / sigma)``
    polynomial: ``(<x, y> + offset) ** degree``
    """

    kind: KernelKind = KernelKind.GAUSSIAN
    sigma: float = 1.0
    degree: int = 2
    offset: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", KernelKind(self.kind))
        if self.kind in (KernelKind.GAUSSIAN, KernelKind.LAPLACIAN):
            if not (np.isfinite(self.sigma) and self.sigma > 0):
                raise ValidationError(f"bandwidth must be positive, got {self.sigma}")
        else:
            if int(self.degree) != self.degree or self.degree < 1:
                raise ValidationError(f"degree must be an integer >= 1, got {self.degree}")
            if not np.isfinite(self.offset):
                raise ValidationError("polynomial offset must be finite")

    @classmethod
    def gaussian(cls, sigma: float) -> "KernelSpec":
        return cls(KernelKind.GAUSSIAN, sigma=float(sigma))

    @property
    def characteristic(self) -> bool:
        return self.kind is not KernelKind.POLYNOMIAL

    def to_dict(self) -> dict:
        out = {"kind": self.kind.value}
        if self.kind is KernelKind.POLYNOMIAL:
            out.update(degree=int(self.degree), offset=float(self.offset))
        else:
            out["sigma"] = float(self.sigma)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "KernelSpec":
        kind = KernelKind(data["kind"])
        if kind is KernelKind.POLYNOMIAL:
            return cls(kind, degree=int(data["degree"]), offset=float(data["offset"]))
        return cls(kind, sigma=float(data["sigma"]))


def _cross_kernel(spec: KernelSpec, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kernel block ``K[i, j] = k(a[i], b[j])`` for 2-D inputs."""
    if spec.kind is KernelKind.POLYNOMIAL:
        # elementwise products keep <x, y> exactly symmetric; BLAS does not
        inner = (a[:, None, :] * b[None, :, :]).sum(axis=2)
        return (inner + spec.offset) ** int(spec.degree)
    sq = cdist(a, b, "sqeuclidean")
    if spec.kind is KernelKind.GAUSSIAN:
        return np.exp(-sq / (spec.sigma * spec.sigma))
    return np.exp(-np.sqrt(sq) / spec.sigma)


def _check_pair(x, y):
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    y = np.atleast_1d(np.asarray(y, dtype=np.float64))
    if x.ndim != 1 or y.ndim != 1:
        raise ValidationError("kernel_eval expects two vectors")
    if x.shape != y.shape:
        raise ValidationError(f"dimension mismatch: {x.shape[0]} vs {y.shape[0]}")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise ValidationError("kernel_eval received a non-finite input")
    return x, y


def kernel_eval(spec: KernelSpec, x, y) -> float:
    """Evaluate ``k(x, y)`` for two ``d``-vectors."""
    x, y = _check_pair(x, y)
    return float(_cross_kernel(spec, x[None, :], y[None, :])[0, 0])


def median_bandwidth(
    dataset: Dataset,
    *,
    threshold: int = MEDIAN_SUBSAMPLE_THRESHOLD,
    seed: int = 0,
) -> float:
    """Median heuristic: median Euclidean distance over distinct pairs ``i < j``.

    Self-distances are excluded; zero distances between distinct duplicate
    rows are kept. For ``n > threshold`` the median is taken over all pairs
    of a seeded uniform subsample of ``threshold`` rows.

    Raises:
        ValidationError: fewer than two samples.
        DegenerateDatasetError: the median distance is zero.
    """
    x = dataset.features
    n = x.shape[0]
    if n < 2:
        raise ValidationError("median bandwidth needs at least 2 samples")
    if n > threshold:
        rng = np.random.default_rng(seed)
        keep = np.sort(rng.choice(n, size=threshold, replace=False))
        x = x[keep]
    sigma = float(np.median(pdist(x, "euclidean")))
    if not sigma > 0:
        raise DegenerateDatasetError("degenerate dataset: median pairwise distance is 0")
    return sigma


def kernel_max(spec: KernelSpec, dataset: Dataset) -> float:
    """Upper bound ``K`` on ``k(x, x)``; exact 1 for radial kernels."""
    if spec.kind is KernelKind.POLYNOMIAL:
        x = dataset.features
        diag = ((x * x).sum(axis=1) + spec.offset) ** int(spec.degree)
        return float(diag.max())
    return 1.0


@dataclass(frozen=True, eq=False)
class KernelContext:
    """Immutable kernel summary of a dataset.

    Attributes:
        dataset: The ground set.
        kernel: Kernel used for every similarity.
        mu: ``mu[i] = (1/n) sum_j k(x_j, x_i)``.
        kbar: Mean of all ``n^2`` Gram entries.
        kmax: Bound ``K`` on ``k(x, x)``.
        gram: Cached ``n x n`` Gram matrix, or ``None`` for lazy rows.
    """

    dataset: Dataset
    kernel: KernelSpec
    mu: np.ndarray
    kbar: float
    kmax: float
    gram: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return self.dataset.n

    def row(self, i: int) -> np.ndarray:
        """Kernel row ``k(x_i, x_j)`` for all ``j``."""
        if self.gram is not None:
            return self.gram[i]
        x = self.dataset.features
        return _cross_kernel(self.kernel, x[i : i + 1], x)[0]

    def block(self, rows: Sequence[int], cols: Sequence[int]) -> np.ndarray:
        """Kernel block ``K[rows][:, cols]`` (indices may repeat)."""
        rows = np.asarray(rows, dtype=np.intp)
        cols = np.asarray(cols, dtype=np.intp)
        if self.gram is not None:
            return self.gram[np.ix_(rows, cols)]
        x = self.dataset.features
        return _cross_kernel(self.kernel, x[rows], x[cols])


def _row_blocks(n: int, width: int):
    step = max(1, _BLOCK_ENTRIES // max(1, width))
    for start in range(0, n, step):
        yield start, min(n, start + step)


def build_context(
    dataset: Dataset, spec: KernelSpec, cache_gram: bool = False
) -> KernelContext:
    """Precompute ``mu``, ``kbar`` and optionally the dense Gram matrix.

    ``mu`` costs ``O(n^2)`` kernel evaluations, done in row blocks so memory
    stays bounded unless ``cache_gram`` is set.
    """
    x = dataset.features
    n = x.shape[0]
    mu = np.empty(n)
    gram = np.empty((n, n)) if cache_gram else None
    width = n * (x.shape[1] if spec.kind is KernelKind.POLYNOMIAL else 1)
    for lo, hi in _row_blocks(n, width):
        blk = _cross_kernel(spec, x[lo:hi], x)
        mu[lo:hi] = blk.sum(axis=1) / n
        if gram is not None:
            gram[lo:hi] = blk
    mu.setflags(write=False)
    if gram is not None:
        gram.setflags(write=False)
    kbar = float(mu.sum() / n)
    return KernelContext(
        dataset=dataset,
        kernel=spec,
        mu=mu,
        kbar=kbar,
        kmax=kernel_max(spec, dataset),
        gram=gram,
    )
