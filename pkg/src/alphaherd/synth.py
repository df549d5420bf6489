"""Synthetic 2-D distributions and the GKHR-vs-GKH comparison harness.

Random streams come from numpy's counter-based ``Philox`` bit generator.
A master seed is expanded with ``SeedSequence`` so that each
(distribution, n, run) job owns an independent stream; results do not
depend on execution order.
"""

from __future__ import annotations

import enum
import logging
import math
import time
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Sequence

import numpy as np

from .discrepancy import AlphaParam
from .errors import ValidationError
from .herding import gkh, gkhr
from .kernel import Dataset, KernelSpec, build_context, median_bandwidth

log = logging.getLogger(__name__)

GENERATOR = f"numpy.random.Philox (numpy {np.__version__})"
SCHEMA_VERSION = "1"
DEGENERATE_TOL = 1e-15

_GMM_MEANS = ((1.0, 2.0), (-3.0, -5.0), (-5.0, 4.0), (15.0, 10.0))
_GMM_VARS = ((2.0, 5.0), (1.0, 2.0), (8.0, 6.0), (4.0, 9.0))


class DistKind(str, enum.Enum):
    GMM1 = "gmm1"
    GMM2 = "gmm2"
    CIRCLE_ANNULUS = "circle_annulus"
    UNIFORM_SQUARE = "uniform_square"
    CUSTOM_GMM = "custom_gmm"


@dataclass(frozen=True)
class DistributionSpec:
    """A 2-D sampling distribution.

    For mixtures, ``means``/``variances`` hold per-component diagonal
    Gaussians. ``circle_annulus`` uses ``radii = (disc, inner, outer)`` and
    ``weights`` for the (disc, annulus) split. ``uniform_square`` uses
    ``bounds = (low, high)`` on both axes.
    """

    kind: DistKind
    weights: tuple = ()
    means: tuple = ()
    variances: tuple = ()
    radii: tuple = (0.5, 4.0, 6.0)
    bounds: tuple = (-10.0, 10.0)

    def __post_init__(self):
        object.__setattr__(self, "kind", DistKind(self.kind))
        if self.kind in (DistKind.GMM1, DistKind.GMM2, DistKind.CUSTOM_GMM, DistKind.CIRCLE_ANNULUS):
            w = np.asarray(self.weights, dtype=float)
            if w.ndim != 1 or w.size == 0 or np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
                raise ValidationError(f"mixture weights must be non-negative and sum to 1: {self.weights}")
        if self.kind in (DistKind.GMM1, DistKind.GMM2, DistKind.CUSTOM_GMM):
            k = len(self.weights)
            if len(self.means) != k or len(self.variances) != k:
                raise ValidationError("means/variances must have one entry per component")
            if len({len(v) for v in self.means} | {len(v) for v in self.variances}) != 1:
                raise ValidationError("means and variances must share one dimension")
            if np.any(np.asarray(self.variances, dtype=float) <= 0):
                raise ValidationError("component variances must be positive")
        if self.kind is DistKind.CIRCLE_ANNULUS:
            r0, r_in, r_out = self.radii
            if not (0 < r0 and 0 <= r_in < r_out):
                raise ValidationError(f"invalid radii {self.radii}")
            if len(self.weights) != 2:
                raise ValidationError("circle_annulus needs two weights")
        if self.kind is DistKind.UNIFORM_SQUARE and not self.bounds[0] < self.bounds[1]:
            raise ValidationError(f"invalid bounds {self.bounds}")

    def to_dict(self) -> dict:
        out = {"kind": self.kind.value}
        if self.kind is DistKind.UNIFORM_SQUARE:
            out["bounds"] = list(self.bounds)
        elif self.kind is DistKind.CIRCLE_ANNULUS:
            out.update(radii=list(self.radii), weights=list(self.weights))
        else:
            out.update(
                weights=list(self.weights),
                means=[list(v) for v in self.means],
                variances=[list(v) for v in self.variances],
            )
        return out


def gmm1() -> DistributionSpec:
    return DistributionSpec(DistKind.GMM1, (0.95, 0.01, 0.02, 0.02), _GMM_MEANS, _GMM_VARS)


def gmm2() -> DistributionSpec:
    return DistributionSpec(DistKind.GMM2, (0.3, 0.2, 0.15, 0.35), _GMM_MEANS, _GMM_VARS)


def circle_annulus(weights=(0.5, 0.5)) -> DistributionSpec:
    return DistributionSpec(DistKind.CIRCLE_ANNULUS, tuple(weights))


def uniform_square() -> DistributionSpec:
    return DistributionSpec(DistKind.UNIFORM_SQUARE)


def custom_gmm(weights, means, variances) -> DistributionSpec:
    return DistributionSpec(
        DistKind.CUSTOM_GMM,
        tuple(float(w) for w in weights),
        tuple(tuple(map(float, m)) for m in means),
        tuple(tuple(map(float, v)) for v in variances),
    )


DISTRIBUTIONS = {
    "gmm1": gmm1,
    "gmm2": gmm2,
    "circle-annulus": circle_annulus,
    "uniform-square": uniform_square,
}


def blobs(components: int = 10, dim: int = 2, radius: float = 6.0) -> DistributionSpec:
    """Uniform mixture of unit-variance Gaussians with means on a circle.

    Means sit on a circle of ``radius`` in the first two coordinates; any
    further coordinates are pure unit noise. ``dim`` sets the feature
    dimension.
    """
    if dim < 2:
        raise ValidationError("blobs need dim >= 2")
    angles = 2.0 * math.pi * np.arange(components) / components
    means = np.zeros((components, dim))
    means[:, 0] = radius * np.cos(angles)
    means[:, 1] = radius * np.sin(angles)
    return custom_gmm(np.full(components, 1.0 / components), means, np.ones((components, dim)))


def get_distribution(name: str, dim: int = 2) -> DistributionSpec:
    """Look up a named distribution; only ``blobs`` honours ``dim``."""
    key = name.replace("_", "-")
    if key == "blobs":
        return blobs(dim=dim)
    if key not in DISTRIBUTIONS:
        choices = sorted(DISTRIBUTIONS) + ["blobs"]
        raise ValidationError(f"unknown distribution {name!r}; choose from {choices}")
    return DISTRIBUTIONS[key]()


def make_rng(seed) -> np.random.Generator:
    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(seed)
    return np.random.Generator(np.random.Philox(seed))


def sample(spec: DistributionSpec, n: int, seed) -> Dataset:
    """Draw ``n`` i.i.d. points; mixtures carry component ids as labels.

    The built-in distributions are 2-D; ``custom_gmm`` takes its dimension
    from the component means.
    """
    if n < 1:
        raise ValidationError(f"n must be >= 1, got {n}")
    rng = make_rng(seed)
    kind = spec.kind
    if kind is DistKind.UNIFORM_SQUARE:
        lo, hi = spec.bounds
        return Dataset(rng.uniform(lo, hi, size=(n, 2)))

    comp = rng.choice(len(spec.weights), size=n, p=np.asarray(spec.weights, dtype=float))
    if kind is DistKind.CIRCLE_ANNULUS:
        r0, r_in, r_out = spec.radii
        u = rng.random(n)
        # area-uniform radius: disc r0*sqrt(u), annulus sqrt(u (ro^2 - ri^2) + ri^2)
        r = np.where(comp == 0, r0 * np.sqrt(u), np.sqrt(u * (r_out**2 - r_in**2) + r_in**2))
        theta = rng.uniform(0.0, 2.0 * math.pi, size=n)
        x = np.column_stack([r * np.cos(theta), r * np.sin(theta)])
        return Dataset(x, labels=comp)

    means = np.asarray(spec.means, dtype=float)
    sd = np.sqrt(np.asarray(spec.variances, dtype=float))
    z = rng.standard_normal((n, means.shape[1]))
    return Dataset(means[comp] + z * sd[comp], labels=comp)


def d_criterion(d1: float, d2: float):
    """Normalized gap ``(d1 - d2) / (d1 + d2)`` between GKHR and GKH values.

    Returns:
        ``(D, degenerate)``; ``D`` is 0 and ``degenerate`` True when both
        values are (numerically) zero.
    """
    if d1 < 0 or d2 < 0:
        raise ValidationError(f"discrepancies must be non-negative, got {d1}, {d2}")
    total = d1 + d2
    if total <= DEGENERATE_TOL:
        return 0.0, True
    return (d1 - d2) / total, False


@dataclass
class BenchCell:
    distribution: str
    n: int
    m: int
    alpha_used: List[float] = field(default_factory=list)
    d_values: List[float] = field(default_factory=list)
    d1_values: List[float] = field(default_factory=list)
    d2_values: List[float] = field(default_factory=list)
    degenerate: List[bool] = field(default_factory=list)
    seeds: List[List[int]] = field(default_factory=list)
    timings: List[float] = field(default_factory=list, compare=False)
    d_mean: float = 0.0
    d_std: float = 0.0

    def finalize(self):
        arr = np.asarray(self.d_values, dtype=float)
        self.d_mean = float(arr.mean()) if arr.size else 0.0
        self.d_std = float(arr.std()) if arr.size else 0.0


@dataclass
class BenchReport:
    schema_version: str
    generator: str
    alpha_rule: str
    master_seed: int
    runs: int
    distributions: Dict[str, dict]
    cells: List[BenchCell]

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "BenchReport":
        data = dict(data)
        data["cells"] = [BenchCell(**c) for c in data["cells"]]
        return cls(**data)

    def rows(self):
        """Flatten to one dict per run (for CSV export)."""
        for c in self.cells:
            for r, d in enumerate(c.d_values):
                yield {
                    "distribution": c.distribution,
                    "n": c.n,
                    "m": c.m,
                    "run": r,
                    "alpha": c.alpha_used[r],
                    "d1": c.d1_values[r],
                    "d2": c.d2_values[r],
                    "D": d,
                    "degenerate": c.degenerate[r],
                }


def _alpha_for(rule, m: int, n: int) -> AlphaParam:
    if rule == "ratio":
        return AlphaParam.ratio(m, n)
    if rule == "auto":
        return AlphaParam.auto_budget(m)
    return AlphaParam.explicit(float(rule))


def run_comparison(
    distributions: Sequence[str] = ("gmm1", "gmm2", "circle-annulus", "uniform-square"),
    ns: Sequence[int] = (1000, 3000),
    budget_fracs: Sequence[float] = (0.01, 0.05, 0.1, 0.2),
    runs: int = 10,
    alpha_rule="ratio",
    seed: int = 0,
) -> BenchReport:
    """Run GKHR and GKH side by side and collect the D criterion per cell.

    Every run draws a fresh sample, sets a gaussian kernel at the median
    bandwidth and evaluates both selections' alpha-MMD^2 exactly.
    ``alpha_rule`` is ``"ratio"`` (m/n), ``"auto"`` (1 - 1/sqrt(m)) or a float.
    """
    if runs < 1:
        raise ValidationError("runs must be >= 1")
    for f in budget_fracs:
        if not 0 < f <= 1:
            raise ValidationError(f"budget fraction must lie in (0, 1], got {f}")
        if f > 0.2:
            log.warning("budget fraction %s is above the low-budget regime (0.2)", f)
    specs = {name: get_distribution(name) for name in distributions}
    master = np.random.SeedSequence(seed)
    cells = []
    for di, name in enumerate(distributions):
        for ni, n in enumerate(ns):
            budgets = [max(1, int(round(f * n))) for f in budget_fracs]
            row = [BenchCell(distribution=name, n=n, m=m) for m in budgets]
            for r in range(runs):
                ss = np.random.SeedSequence(master.entropy, spawn_key=(di, ni, r))
                data = sample(specs[name], n, ss)
                ctx = build_context(data, KernelSpec.gaussian(median_bandwidth(data, seed=seed)))
                for cell in row:
                    t0 = time.perf_counter()
                    alpha = _alpha_for(alpha_rule, cell.m, n)
                    d1 = gkhr(ctx, cell.m, alpha).final_alpha_mmd_sq
                    d2 = gkh(ctx, cell.m, alpha).final_alpha_mmd_sq
                    d, degenerate = d_criterion(d1, d2)
                    cell.alpha_used.append(alpha.alpha)
                    cell.d1_values.append(d1)
                    cell.d2_values.append(d2)
                    cell.d_values.append(d)
                    cell.degenerate.append(degenerate)
                    cell.seeds.append([int(seed), di, ni, r])
                    cell.timings.append(time.perf_counter() - t0)
            for cell in row:
                cell.finalize()
            cells.extend(row)
    return BenchReport(
        schema_version=SCHEMA_VERSION,
        generator=GENERATOR,
        alpha_rule=str(alpha_rule),
        master_seed=int(seed),
        runs=runs,
        distributions={name: spec.to_dict() for name, spec in specs.items()},
        cells=cells,
    )
