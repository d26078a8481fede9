"""Hedge dynamic: map properties, schedules, traces, and entropy bounds."""

import csv

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from deploylab.games import PayoffOperator
from deploylab.hedge import (LearningRateSchedule, average_iterates,
                             check_convexity_bounds, hedge_step,
                             is_fixed_point, make_schedule, relative_entropy,
                             rescale_to_unit, run_hedge)
from conftest import dominant_column_game, random_simplex, rng_for


def naive_hedge_step(C, x, alpha):
    """Direct textbook formula, safe only for small exponents."""
    w = [x[i] * np.exp(alpha * sum(C[i][j] * x[j] for j in range(len(x))))
         for i in range(len(x))]
    total = sum(w)
    return np.array([v / total for v in w])


class TestSchedules:
    def test_forms(self):
        assert make_schedule("constant", 0.5).rate(99) == 0.5
        assert make_schedule("harmonic", 2.0).rate(3) == 0.5
        assert make_schedule("power", 1.0, 0.5).rate(3) == 0.5

    def test_convergence_flags(self):
        assert not make_schedule("constant", 0.1).vanishes
        harmonic = make_schedule("harmonic", 1.0)
        assert harmonic.vanishes and harmonic.diverges
        assert harmonic.convergent_schedule
        assert make_schedule("power", 1.0, 0.5).convergent_schedule

    def test_invalid_args(self):
        with pytest.raises(ValueError):
            make_schedule("geometric", 1.0)
        with pytest.raises(ValueError):
            make_schedule("constant", 0.0)
        with pytest.raises(ValueError):
            make_schedule("power", 1.0, 1.5)


class TestHedgeStep:
    def test_matches_naive_formula(self):
        for trial in range(20):
            rng = rng_for(10, trial)
            n = int(rng.integers(2, 7))
            C = rng.random((n, n))
            x = random_simplex(rng, n)
            alpha = float(rng.uniform(0.01, 2.0))
            got = hedge_step(C, x, alpha)
            assert np.allclose(got, naive_hedge_step(C, x, alpha), atol=1e-12)

    def test_simplex_invariance_and_interior(self):
        rng = rng_for(11)
        for _ in range(50):
            n = int(rng.integers(2, 12))
            C = rng.random((n, n))
            x = random_simplex(rng, n)
            y = hedge_step(C, x, float(rng.uniform(0, 5)))
            assert abs(y.sum() - 1.0) <= 1e-12
            assert (y > 0).all()

    def test_boundary_is_invariant(self):
        C = rng_for(12).random((3, 3))
        x = np.array([0.0, 0.4, 0.6])
        y = hedge_step(C, x, 1.0)
        assert y[0] == 0.0

    def test_overflow_safety(self):
        C = np.array([[800.0, 0.0], [0.0, 700.0]])
        y = hedge_step(C, np.array([0.5, 0.5]), 10.0)
        assert np.isfinite(y).all() and abs(y.sum() - 1.0) <= 1e-12

    def test_rejects_negative_rate(self):
        with pytest.raises(ValueError):
            hedge_step(np.eye(2), np.array([0.5, 0.5]), -1.0)

    @given(st.integers(0, 10**6), st.floats(0.01, 3.0))
    @settings(max_examples=60, deadline=None)
    def test_better_response_property(self, salt, alpha):
        """Non-fixed interior points strictly gain payoff in one step."""
        rng = rng_for(13, salt)
        n = int(rng.integers(2, 8))
        C = rng.random((n, n))
        x = random_simplex(rng, n)
        if is_fixed_point(C, x, tol=1e-9):
            return
        y = hedge_step(C, x, alpha)
        assert (y - x) @ (C @ x) > 0


class TestFixedPoints:
    def test_vertices_are_fixed(self):
        C = rng_for(14).random((4, 4))
        for i in range(4):
            assert is_fixed_point(C, np.eye(4)[i])

    def test_carrier_equalizers_are_fixed(self, rps):
        assert is_fixed_point(rps, np.ones(3) / 3)
        x = np.ones(3) / 3
        assert np.allclose(hedge_step(rps, x, 0.7), x)

    def test_non_equalizer_not_fixed(self):
        C = np.array([[1.0, 1.0], [0.0, 0.0]])
        assert not is_fixed_point(C, np.array([0.5, 0.5]))

    def test_fixed_points_survive_payoff_negation(self):
        for trial in range(30):
            rng = rng_for(15, trial)
            n = int(rng.integers(2, 6))
            C = rng.random((n, n))
            x = random_simplex(rng, n)
            if rng.random() < 0.5:  # include genuine fixed points
                x = np.eye(n)[int(rng.integers(n))]
            assert is_fixed_point(C, x) == is_fixed_point(-C, x)


class TestRelativeEntropy:
    def test_zero_iff_equal(self):
        p = np.array([0.2, 0.8])
        assert relative_entropy(p, p) == 0.0
        assert relative_entropy(p, np.array([0.5, 0.5])) > 0

    def test_carrier_mismatch_raises(self):
        with pytest.raises(ValueError):
            relative_entropy(np.array([0.5, 0.5]), np.array([1.0, 0.0]))

    def test_partial_carrier_allowed(self):
        assert relative_entropy(np.array([1.0, 0.0]),
                                np.array([0.5, 0.5])) == pytest.approx(np.log(2))

    @given(st.integers(0, 10**6))
    @settings(max_examples=60, deadline=None)
    def test_pinsker_lower_bound(self, salt):
        rng = rng_for(16, salt)
        n = int(rng.integers(2, 8))
        p = random_simplex(rng, n)
        q = random_simplex(rng, n)
        l1 = np.abs(p - q).sum()
        assert relative_entropy(p, q) >= 0.5 * l1 ** 2 - 1e-12


class TestRunHedge:
    def test_requires_interior_start(self):
        with pytest.raises(ValueError):
            run_hedge(np.eye(2), np.array([1.0, 0.0]),
                      make_schedule("constant", 0.1), max_iters=10)

    def test_trace_bookkeeping(self):
        C = rng_for(17).random((3, 3))
        trace = run_hedge(C, np.ones(3) / 3, make_schedule("constant", 0.1),
                          max_iters=50, record_every=7)
        assert trace.count == 50
        assert trace.stop_reason == "max-iters"
        assert trace.iterate_iters[0] == 0
        assert trace.iterate_iters[-1] == 50  # final iterate appended
        assert all(k % 7 == 0 for k in trace.iterate_iters[:-1])

    def test_average_matches_manual_mean(self):
        C = rng_for(18).random((3, 3))
        trace = run_hedge(C, np.ones(3) / 3, make_schedule("constant", 0.1),
                          max_iters=40, record_every=1)
        manual = np.mean(trace.iterates, axis=0)  # iterates 0..40
        assert np.allclose(average_iterates(trace, "all"), manual, atol=1e-12)
        tail = np.mean(trace.iterates[-5:], axis=0)
        assert np.allclose(average_iterates(trace, ("tail", 5)), tail)

    def test_fixed_point_stop(self, rps):
        trace = run_hedge(rps, np.ones(3) / 3, make_schedule("constant", 0.5),
                          max_iters=100)
        assert trace.stop_reason == "fixed-point"
        assert np.allclose(trace.final, 1.0 / 3.0)

    def test_stop_re_reports_stopping_iterate(self):
        rng = rng_for(19)
        C, star = dominant_column_game(rng, 4)
        ref = np.eye(4)[star]
        trace = run_hedge(C, np.ones(4) / 4, make_schedule("harmonic", 10.0),
                          max_iters=10**5, reference=ref, stop_re=1e-4,
                          record_every=10**5)
        assert trace.stop_reason == "converged"
        assert relative_entropy(ref, trace.final) < 1e-4

    def test_segmented_run_matches_single_run(self):
        C = rng_for(20).random((3, 3))
        sched = make_schedule("harmonic", 1.0)
        whole = run_hedge(C, np.ones(3) / 3, sched, max_iters=60)
        first = run_hedge(C, np.ones(3) / 3, sched, max_iters=25)
        second = run_hedge(C, first.final, sched, max_iters=35, k0=25)
        assert np.allclose(second.final, whole.final, atol=1e-12)

    def test_csv_trace_format(self, tmp_path):
        C = rng_for(21).random((3, 3))
        trace = run_hedge(C, np.ones(3) / 3, make_schedule("constant", 0.1),
                          max_iters=10, reference=np.ones(3) / 3)
        path = tmp_path / "trace.csv"
        trace.to_csv(path)
        with open(path) as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["iter", "alpha", "payoff", "re_to_reference",
                           "x_0", "x_1", "x_2"]
        assert len(rows) == len(trace.iterates) + 1
        assert float(rows[1][0]) == 0


class TestConvexityBounds:
    def test_random_games_satisfy_both_bounds(self):
        for trial in range(30):
            rng = rng_for(22, trial)
            n = int(rng.integers(2, 6))
            C = rng.random((n, n))
            x = random_simplex(rng, n)
            y = random_simplex(rng, n)
            out = check_convexity_bounds(C, x, y, np.linspace(0.1, 2.0, 11))
            assert out["convex_ok"]
            assert out["secant_ok"]
            assert out["deriv0_fd"] == pytest.approx(out["deriv0_analytic"],
                                                     abs=1e-4)

    def test_needs_unit_bounds(self):
        C = np.full((2, 2), 3.0)
        with pytest.raises(ValueError):
            check_convexity_bounds(C, np.array([0.5, 0.5]),
                                   np.array([0.5, 0.5]), [0.5, 1.0])

    def test_strict_convexity_off_fixed_points(self):
        C = np.array([[1.0, 1.0], [0.0, 0.0]])
        out = check_convexity_bounds(C, np.array([0.5, 0.5]),
                                     np.array([0.9, 0.1]),
                                     np.linspace(0.1, 2.0, 11))
        assert not out["is_fixed_point"]
        assert out["strictly_convex"]


class TestRescaleToUnit:
    def test_bounds_and_gap_scaling(self, rps):
        C0, shift, scale = rescale_to_unit(rps)
        assert C0.min() == 0.0 and C0.max() == 1.0
        assert np.allclose(C0, (rps + shift) * scale)
        x = np.array([0.5, 0.25, 0.25])
        gap = (rps @ x).max() - x @ (rps @ x)
        gap0 = (C0 @ x).max() - x @ (C0 @ x)
        assert gap0 == pytest.approx(scale * gap)

    def test_constant_matrix(self):
        C0, _, _ = rescale_to_unit(np.full((2, 2), 4.0))
        assert (C0 == 0).all()


class TestConvergence:
    def test_dominant_column_harmonic_convergence(self):
        rng = rng_for(23)
        C, star = dominant_column_game(rng, 5)
        ref = np.eye(5)[star]
        trace = run_hedge(C, np.ones(5) / 5, make_schedule("harmonic", 10.0),
                          max_iters=10**4, reference=ref, stop_re=1e-4)
        assert trace.stop_reason == "converged"

    def test_rps_interior_repulsion(self, rps):
        """Non-equilibrium starts drift away from the uniform fixed point."""
        C0, _, _ = rescale_to_unit(rps)
        uniform = np.ones(3) / 3
        x0 = np.array([0.4, 0.35, 0.25])
        trace = run_hedge(C0, x0, make_schedule("constant", 0.5),
                          max_iters=500, reference=uniform)
        res = trace.re_to_reference
        assert all(b > a for a, b in zip(res, res[1:]))
