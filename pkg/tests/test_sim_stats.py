import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from dynprice.model import Degenerate, example_problem
from dynprice.policies import BellmanPolicy, CECPolicy, ConstantPolicy
from dynprice.sim import (ComparisonSamples, draw_paths, estimate_objective, paired_compare,
                          simulate, simulate_batch, simulate_path)
from dynprice.stats import histogram, quantile, relative_l2, summarise

finite = st.floats(-10, 10, allow_nan=False)


class TestSimulation:
    def test_hand_path(self, example):
        rec = simulate_path(example, ConstantPolicy(2 / 3), [1.0, 1.0, 1.0])
        assert np.allclose(rec.sales, 1 / 3)
        assert rec.profit == pytest.approx(2 / 3)
        assert rec.stocks[-1] == pytest.approx(0.0, abs=1e-15)

    def test_spec_paths(self):
        free = example_problem(C=0.0)
        assert simulate_path(free, ConstantPolicy(0.0), [1.0, 1.2, 0.8]).profit == 0.0
        one = example_problem(T=1, C=0.0)
        assert simulate_path(one, ConstantPolicy(1 / 3), [1.0]).profit == pytest.approx(np.e / 9)
        costly = example_problem(C=0.7)
        assert simulate_path(costly, ConstantPolicy(0.5), [0.0] * 3).profit == pytest.approx(-0.7)

    def test_pairing_reproducible(self, example, small_table):
        a = paired_compare(example, BellmanPolicy(small_table), CECPolicy(example), 300, 8)
        b = paired_compare(example, BellmanPolicy(small_table), CECPolicy(example), 300, 8)
        assert np.array_equal(a.profits_a, b.profits_a) and np.array_equal(a.profits_b, b.profits_b)

    def test_objective_estimate_trivial_cases(self):
        p = example_problem(disturbance=Degenerate(1.0))
        assert estimate_objective(p, CECPolicy(p), 0, 1.0, 50, 0)[1] == 0.0
        free = example_problem(C=0.0)
        assert estimate_objective(free, ConstantPolicy(0.0), 0, 1.0, 50, 0) == (0.0, 0.0)
        with pytest.raises(ValueError):
            estimate_objective(free, ConstantPolicy(0.0), 0, 1.0, 1, 0)

    def test_input_validation(self, example):
        with pytest.raises(ValueError):
            simulate_path(example, ConstantPolicy(0.5), [1.0, 1.0])
        with pytest.raises(ValueError):
            simulate_path(example, ConstantPolicy(0.5), [1.0, -1.0, 1.0])
        with pytest.raises(ValueError):
            paired_compare(example, ConstantPolicy(0.5), ConstantPolicy(0.5), 0, 0)

    def test_profit_and_stock_bounds(self, example, small_table):
        batch = simulate(example, BellmanPolicy(small_table), 500, 2)
        assert np.all(batch.profits >= -example.C) and np.all(batch.profits <= 1.0)
        assert np.all(np.diff(batch.stocks, axis=1) <= 0)
        assert np.all((batch.prices >= 0) & (batch.prices <= 1))

    def test_paths_independent_of_batching(self, example):
        whole = draw_paths(example, 10, 9)
        tail = draw_paths(example, 4, 9, first=6)
        assert np.array_equal(whole[6:], tail)

    def test_degenerate_paths_identical(self):
        p = example_problem(disturbance=Degenerate(1.0))
        batch = simulate(p, CECPolicy(p), 20, 0)
        assert np.all(batch.profits == batch.profits[0])

    def test_self_comparison_is_exact(self, example):
        pol = CECPolicy(example)
        s = paired_compare(example, pol, pol, 200, 4)
        assert np.array_equal(s.profits_a, s.profits_b)
        st_ = summarise(s)
        assert st_.frac_a_better == 0 and st_.mean_diff == 0 and st_.rel_l2 == 0

    def test_rollout_matches_solver_value(self, example, example_table):
        mean, se = estimate_objective(example, BellmanPolicy(example_table), 0, 1.0, 10_000, 1)
        assert se > 0
        assert abs(mean - example_table.value(0, 1.0)) <= 3 * se

    def test_midway_start(self, example):
        W = draw_paths(example, 5, 0, periods=1)
        b = simulate_batch(example, ConstantPolicy(1.0), W, t0=2, s0=0.3)
        assert b.prices.shape == (5, 1)


class TestStats:
    def test_quantile_reference(self):
        assert quantile([1, 2, 3, 4, 5], 0.5) == 3
        assert quantile([1, 2, 3, 4], 0.5) == 2.5
        assert quantile([7.0] * 4, 0.13) == 7.0
        with pytest.raises(ValueError):
            quantile([], 0.5)
        with pytest.raises(ValueError):
            quantile([1.0], 1.5)

    def test_normal_quantile(self):
        xs = np.random.default_rng(3).standard_normal(10_000)
        assert quantile(xs, 0.95) == pytest.approx(1.645, abs=0.05)

    @given(arrays(float, st.integers(1, 40), elements=finite), st.floats(0, 1), st.floats(0, 1))
    def test_quantile_monotone(self, xs, lo, hi):
        lo, hi = min(lo, hi), max(lo, hi)
        assert quantile(xs, lo) <= quantile(xs, hi)

    def test_relative_l2(self):
        a = np.array([1.0, 2.0, 3.0])
        assert relative_l2(a, a) == 0
        assert relative_l2(a, 2 * a) == pytest.approx(1.0)
        with pytest.raises(ZeroDivisionError):
            relative_l2(np.zeros(3), a)
        with pytest.raises(ValueError):
            relative_l2(a, a[:2])

    @given(arrays(float, 8, elements=st.floats(0.1, 5)), arrays(float, 8, elements=finite),
           st.floats(0.01, 100))
    def test_relative_l2_scale_invariant(self, a, b, lam):
        assert relative_l2(lam * a, lam * b) == pytest.approx(relative_l2(a, b), rel=1e-9, abs=1e-12)

    @given(arrays(float, st.integers(2, 30), elements=st.floats(0.1, 1)), st.data())
    def test_summary_properties(self, a, data):
        b = data.draw(arrays(float, a.size, elements=st.floats(0.1, 1)))
        s = summarise(ComparisonSamples(a, b))
        assert s.q05 <= s.median <= s.q95
        assert 0 <= s.frac_a_better <= 1 and s.rel_l2 >= 0
        if s.frac_a_better < 0.5:
            assert np.median(a - b) <= 0
        perm = data.draw(st.permutations(range(a.size)))
        t = summarise(ComparisonSamples(a[list(perm)], b[list(perm)]))
        assert t.median == pytest.approx(s.median) and t.rel_l2 == pytest.approx(s.rel_l2)

    def test_zero_reference_excluded(self):
        s = summarise(ComparisonSamples(np.array([0.0, 1.0, 2.0]), np.array([0.1, 1.0, 1.0])))
        assert s.n_excluded == 1 and s.n == 3
        with pytest.raises(ValueError):
            summarise(ComparisonSamples(np.zeros(3), np.ones(3)))

    def test_histogram(self):
        edges, counts = histogram(np.full(7, 2.0), 5)
        assert counts.sum() == 7 and np.count_nonzero(counts) == 1
        xs = np.random.default_rng(1).uniform(size=100_000)
        edges, counts = histogram(xs, 10)
        assert np.all(np.abs(counts - 10_000) <= 3 * np.sqrt(10_000 * 0.9))
        with pytest.raises(ValueError):
            histogram([], 3)

    @given(arrays(float, st.integers(1, 50), elements=finite), st.integers(1, 20))
    def test_histogram_conserves_count(self, xs, bins):
        assert histogram(xs, bins)[1].sum() == xs.size
