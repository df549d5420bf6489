import itertools
import math

import numpy as np
import pytest

from alphaherd.discrepancy import WeightVector, alpha_mmd_sq, weighted_alpha_mmd_sq
from alphaherd.errors import IllConditionedError, ValidationError
from alphaherd.kernel import Dataset, KernelSpec, build_context
from alphaherd.oracle import (
    OracleReport,
    bound_constants,
    bound_satisfied,
    candidate_count,
    exhaustive_min,
    mmd_deviation_bound_check,
    optimal_affine_weights,
)

from conftest import random_instance

E1 = math.exp(-1.0)
E4 = math.exp(-4.0)
KBAR3 = (3 + 4 * E1 + 2 * E4) / 9


class TestExhaustive:
    def test_three_points(self, line3):
        rep = exhaustive_min(line3, 2, 1.0)
        best = KBAR3 + (2 + 2 * E4) / 4 - 2 * (1 + E1 + E4) / 3
        adjacent = KBAR3 + (2 + 2 * E1) / 4 - ((1 + E1 + E4) + (2 * E1 + 1)) / 3
        assert rep.best_indices == [0, 2]
        assert rep.best_value == pytest.approx(best, abs=1e-14)
        assert rep.enumerated == 3
        assert rep.greedy_indices == [1, 0]
        assert rep.greedy_value == pytest.approx(adjacent, abs=1e-14)
        assert rep.gap == pytest.approx(adjacent - best, abs=1e-14)
        assert rep.gap == pytest.approx(0.0582606, abs=1e-7)

    @pytest.mark.parametrize("a", [0.0, 0.5, 1.0])
    def test_full_set(self, a):
        ctx = random_instance(np.random.default_rng(0), n_lo=6, n_hi=8)
        rep = exhaustive_min(ctx, ctx.n, a)
        assert rep.best_indices == list(range(ctx.n))
        assert rep.best_value == pytest.approx((1 - a) ** 2 * ctx.kbar, abs=1e-12)
        assert rep.enumerated == 1

    def test_matches_naive_enumeration(self):
        rng = np.random.default_rng(1)
        for _ in range(15):
            ctx = random_instance(rng, n_lo=3, n_hi=9)
            m = int(rng.integers(1, min(4, ctx.n) + 1))
            a = float(rng.uniform())
            for rep_flag, gen in ((False, itertools.combinations), (True, itertools.combinations_with_replacement)):
                vals = {c: alpha_mmd_sq(ctx, c, a) for c in gen(range(ctx.n), m)}
                rep = exhaustive_min(ctx, m, a, replacement=rep_flag)
                assert rep.best_value == pytest.approx(min(vals.values()), abs=1e-12)
                assert rep.enumerated == len(vals)
                assert rep.gap >= -1e-10

    def test_guard(self):
        ctx = random_instance(np.random.default_rng(2), n_lo=40, n_hi=40)
        assert candidate_count(40, 6, False) > 10**6
        with pytest.raises(ValidationError, match="guard"):
            exhaustive_min(ctx, 6, 0.5)

    def test_invalid_budget(self, line3):
        with pytest.raises(ValidationError):
            exhaustive_min(line3, 4, 1.0)
        assert exhaustive_min(line3, 4, 1.0, replacement=True).enumerated == 15

    def test_report_round_trip(self, line3):
        rep = exhaustive_min(line3, 2, 0.3)
        assert OracleReport.from_dict(rep.to_dict()) == rep


class TestAffineWeights:
    def test_symmetric_gram_gives_uniform(self):
        # the vertices of a regular simplex are pairwise equidistant
        ctx = build_context(Dataset(np.eye(5)), KernelSpec.gaussian(1.0), cache_gram=True)
        w = optimal_affine_weights(ctx, 1.0)
        np.testing.assert_allclose(w.w, np.full(5, 0.2), atol=1e-12)

    def test_beats_uniform_and_exhaustive(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            ctx = random_instance(rng, n_lo=4, n_hi=10, cache_gram=True)
            a = float(rng.uniform())
            w = optimal_affine_weights(ctx, a, jitter=1e-10)
            assert abs(w.w.sum() - 1.0) <= 1e-9
            val = weighted_alpha_mmd_sq(ctx, w, a)
            assert val <= weighted_alpha_mmd_sq(ctx, WeightVector.uniform(ctx.n), a) + 1e-9
            m = int(rng.integers(1, min(4, ctx.n) + 1))
            assert val <= exhaustive_min(ctx, m, a).best_value + 1e-9

    def test_beats_random_affine_weights(self):
        rng = np.random.default_rng(4)
        ctx = build_context(Dataset(rng.normal(size=(8, 2))), KernelSpec.gaussian(0.7), cache_gram=True)
        w = optimal_affine_weights(ctx, 0.6)
        best = weighted_alpha_mmd_sq(ctx, w, 0.6)
        for _ in range(50):
            v = rng.normal(size=8)
            v += (1 - v.sum()) / 8
            assert best <= weighted_alpha_mmd_sq(ctx, v, 0.6) + 1e-12

    def test_ill_conditioned(self):
        ctx = build_context(Dataset(np.array([[0.0], [1e-7], [1.0]])), KernelSpec.gaussian(1.0), cache_gram=True)
        with pytest.raises(IllConditionedError, match="jitter"):
            optimal_affine_weights(ctx, 1.0)
        w = optimal_affine_weights(ctx, 1.0, jitter=1e-10)
        assert w.jitter == pytest.approx(1e-10)
        assert abs(w.w.sum() - 1.0) <= 1e-9


class TestBound:
    def test_constants(self, line3):
        c = bound_constants(line3, 1.0, 2)
        assert c["c_alpha_sq"] == 0.0
        assert c["b"] == 2.0
        assert c["rhs"] == pytest.approx(2 * (2 + math.log(2)) / 3, abs=1e-15)
        assert c["rhs"] == pytest.approx(1.795431, abs=5e-7)
        assert c["log"] == "natural"

    def test_c_alpha(self, line3):
        assert bound_constants(line3, 0.25, 5)["c_alpha_sq"] == pytest.approx(0.5625 * KBAR3, abs=1e-15)

    def test_satisfied(self, line3):
        c = bound_constants(line3, 1.0, 2)
        assert bound_satisfied(c["rhs"] + 5e-10, c)
        assert not bound_satisfied(c["rhs"] + 1e-8, c)

    def test_invalid(self, line3):
        with pytest.raises(ValidationError):
            bound_constants(line3, 1.0, 0)


class TestDeviation:
    def test_alpha_one(self, line3):
        r = mmd_deviation_bound_check(line3, [0, 2], 1.0)
        assert r["lhs"] == 0.0 and r["rhs"] == 0.0 and r["passed"]

    def test_alpha_zero_full_set(self, line3):
        r = mmd_deviation_bound_check(line3, [0, 1, 2], 0.0)
        assert r["lhs"] == pytest.approx(math.sqrt(KBAR3), abs=1e-15)
        assert r["passed"]

    def test_random_sweep(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            ctx = random_instance(rng, n_hi=40)
            idx = rng.integers(0, ctx.n, size=int(rng.integers(1, ctx.n + 1)))
            a = float(rng.uniform())
            r = mmd_deviation_bound_check(ctx, idx, a)
            assert r["passed"] and r["margin"] >= -1e-9
