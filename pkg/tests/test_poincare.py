import math
import random
from fractions import Fraction

import numpy as np
import pytest

import helpers
import oracles
from mexp import (
    MeasuredGraph,
    auxiliary_walk,
    cheeger_conductance,
    cp_formula,
    delta_gap,
    delta_operator,
    eigenpairs,
    from_conductance,
    kappa_constant,
    lambda_operator,
    lp_energy_pair,
    lp_energy_ratio,
    measured_gap,
    measured_lp_check,
    optimal_lp_constant,
)
from mexp.families import make_cycle


def k2_walk(a=Fraction(1)):
    g = MeasuredGraph.build(2, [(0, 1)], [1, 1])
    return from_conductance(g, {(0, 1): a})


class TestCpFormula:
    def test_below_two_is_half_square(self):
        assert cp_formula(1.0, 1.5) == 0.5
        assert cp_formula(0.5, 1.0) == 0.125

    def test_at_two(self):
        assert cp_formula(1.0, 2.0) == pytest.approx(1.0 / 32.0, abs=1e-15)

    def test_at_four(self):
        # (4 / (16 * 2^1.5))^2 / 32 collapses to exactly 1/4096
        assert cp_formula(1.0, 4.0) == pytest.approx(1.0 / 4096.0, rel=1e-12)
        assert cp_formula(1.0, 4.0) == pytest.approx(2.4414e-4, rel=1e-4)

    def test_rejects_bad_inputs(self):
        with pytest.raises(ValueError):
            cp_formula(0.0, 2.0)
        with pytest.raises(ValueError):
            cp_formula(1.0, 0.5)


class TestKappa:
    def test_worked_value(self):
        assert kappa_constant(2, 0.5, 1.0, 1.0, 1.0) == pytest.approx(12.0)

    def test_zero_modulus(self):
        assert kappa_constant(2, 0.5, 1.0, 1.0, 0.0) == 0.0

    def test_homogeneous_in_modulus_at_p1(self):
        one = kappa_constant(3, 0.25, 0.7, 1.0, 1.0)
        two = kappa_constant(3, 0.25, 0.7, 1.0, 2.0)
        assert two == pytest.approx(2.0 * one)


class TestEnergyRatio:
    def test_ordered_pairs_double_the_edge_sum(self):
        rng = random.Random(1)
        for _ in range(15):
            w = helpers.rand_walk(rng, 2, 9)
            f = [rng.gauss(0, 1) for _ in range(w.graph.n)]
            p = rng.choice([1.0, 1.5, 2.0, 3.0])
            lhs, rhs = lp_energy_pair(w, f, p)
            assert lhs == pytest.approx(oracles.brute_edge_energy(w, f, p), rel=1e-12)
            assert rhs == pytest.approx(
                oracles.brute_pair_energy(list(w.mu), w.total_mu, f, p), rel=1e-12
            )
            half = sum(abs(f[u] - f[v]) ** p * float(w.a[(u, v)]) for u, v in w.graph.edges)
            assert lhs == pytest.approx(2.0 * half, rel=1e-12)

    def test_affine_invariance(self):
        rng = random.Random(2)
        w = helpers.rand_walk(rng, 4, 8)
        f = [rng.gauss(0, 1) for _ in range(w.graph.n)]
        for p in (1.0, 2.0, 3.0):
            base = lp_energy_ratio(w, f, p)
            moved = lp_energy_ratio(w, [2.5 * x - 7.0 for x in f], p)
            assert moved == pytest.approx(base, rel=1e-9)

    def test_constant_rejected(self):
        with pytest.raises(ValueError, match="constant"):
            lp_energy_ratio(k2_walk(), [1.0, 1.0], 2.0)

    def test_p2_gap_eigenvector_attains_gap(self):
        rng = random.Random(3)
        for _ in range(10):
            w = helpers.rand_walk(rng, 3, 10)
            op = delta_operator(w)
            vals, vecs = eigenpairs(op)
            idx = next(i for i, x in enumerate(vals) if x >= 1e-9)
            ratio = lp_energy_ratio(w, list(vecs[:, idx]), 2.0)
            assert ratio == pytest.approx(vals[idx], abs=1e-8)

    def test_k2_ratio_is_two_for_any_p(self):
        w = k2_walk(Fraction(7, 3))
        for p in (1.0, 1.5, 2.0, 3.0, 4.0):
            assert lp_energy_ratio(w, [0.4, -1.1], p) == pytest.approx(2.0, rel=1e-12)

    def test_vector_valued_extension_obeys_gap_bound(self):
        # p = 2 coordinate sums: sum_i edge_i >= gap * sum_i pair_i, d <= 4
        rng = random.Random(4)
        for _ in range(10):
            w = helpers.rand_walk(rng, 3, 9)
            gap = delta_gap(w)
            d = rng.randrange(1, 5)
            cols = [[rng.gauss(0, 1) for _ in range(w.graph.n)] for _ in range(d)]
            edge_total = 0.0
            pair_total = 0.0
            for col in cols:
                lhs, rhs = lp_energy_pair(w, col, 2.0)
                edge_total += lhs
                pair_total += rhs
            assert edge_total >= gap * pair_total - 1e-8

    def test_lower_bound_suite_small(self):
        rng = random.Random(5)
        for _ in range(10):
            w = helpers.rand_walk(rng, 3, 10)
            c = float(cheeger_conductance(w, w.mu).value)
            for p in (1.0, 1.5, 2.0, 3.0, 4.0):
                floor = cp_formula(c, p)
                for _ in range(50):
                    f = [rng.gauss(0, 1) for _ in range(w.graph.n)]
                    assert lp_energy_ratio(w, f, p) >= floor - 1e-9


class TestMeasuredCheck:
    def test_gap_eigenvector_attains_measured_gap(self):
        rng = random.Random(6)
        for _ in range(10):
            g = helpers.rand_connected(rng, 3, 9, measured=True)
            lam = measured_gap(g)
            vals, vecs = eigenpairs(lambda_operator(g))
            idx = next(i for i, x in enumerate(vals) if x >= 1e-9)
            check = measured_lp_check(g, list(vecs[:, idx]), 2.0)
            assert check.ratio == pytest.approx(lam, abs=1e-8)

    def test_translation_invariance(self):
        g = make_cycle(6)
        f = [0.0, 1.0, 2.0, 1.5, -1.0, 0.5]
        a = measured_lp_check(g, f, 2.0)
        b = measured_lp_check(g, [x + 11.0 for x in f], 2.0)
        assert a.ratio == pytest.approx(b.ratio, rel=1e-9)

    def test_antipodal_halves_on_cycle(self):
        g = make_cycle(6)
        check = measured_lp_check(g, [1, 1, 1, -1, -1, -1], 2.0)
        assert check.lhs == pytest.approx(32.0)
        assert check.rhs == pytest.approx(12.0)
        assert check.ratio == pytest.approx(8.0 / 3.0)
        assert check.ratio >= measured_gap(g) - 1e-9

    def test_zero_measure_rejected(self):
        g = MeasuredGraph.build(2, [(0, 1)], [1, 0])
        with pytest.raises(ValueError, match="zero measure"):
            measured_lp_check(g, [1.0, 0.0], 2.0)


class TestOptimizer:
    def test_p2_matches_gap(self):
        rng = random.Random(7)
        for i in range(8):
            w = helpers.rand_walk(rng, 3, 9)
            gap = delta_gap(w)
            est = optimal_lp_constant(w, 2.0, restarts=32, seed=i)
            assert est.estimate == pytest.approx(gap, abs=1e-6)

    def test_estimate_is_ratio_at_minimizer(self):
        rng = random.Random(8)
        for p in (1.0, 2.0, 3.0):
            w = helpers.rand_walk(rng, 3, 8)
            est = optimal_lp_constant(w, p, restarts=16, seed=3)
            assert est.estimate == pytest.approx(
                lp_energy_ratio(w, list(est.minimizer), p), abs=1e-12
            )

    def test_estimate_dominates_explicit_constant(self):
        rng = random.Random(9)
        for p in (1.0, 1.5, 2.0, 3.0):
            w = helpers.rand_walk(rng, 3, 8)
            c = float(cheeger_conductance(w, w.mu).value)
            est = optimal_lp_constant(w, p, restarts=16, seed=4)
            assert est.estimate >= cp_formula(c, p) - 1e-9

    def test_k2_is_flat(self):
        est = optimal_lp_constant(k2_walk(), 3.0, restarts=4, seed=0)
        assert est.estimate == pytest.approx(2.0, rel=1e-12)

    def test_deterministic(self):
        rng = random.Random(10)
        w = helpers.rand_walk(rng, 4, 8)
        a = optimal_lp_constant(w, 1.5, restarts=8, seed=42)
        b = optimal_lp_constant(w, 1.5, restarts=8, seed=42)
        assert a.estimate == b.estimate and a.minimizer == b.minimizer

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            optimal_lp_constant(k2_walk(), 0.5)
        g = MeasuredGraph.build(4, [(0, 1), (2, 3)], [1, 1, 1, 1])
        w = from_conductance(g, {e: Fraction(1) for e in g.edges})
        with pytest.raises(ValueError, match="connected"):
            optimal_lp_constant(w, 2.0)
