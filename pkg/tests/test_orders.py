import math

import numpy as np
import pytest

from coherent_age.copulas import FGM, GumbelHougaard, Independence
from coherent_age.distributions import Exponential, LinearFailureRate, Weibull
from coherent_age.orders import (
    Grid,
    check_monotone,
    check_order,
    check_sign,
    integral_identity_check,
    sign_change_count,
    system_order_direct,
)
from coherent_age.systems import Structure, SystemModel

LFR_X = LinearFailureRate(1.0, 1.0)
LFR_Y = LinearFailureRate(2.0, 1.0)


def fgm_system(theta=1.0, margin=LFR_X):
    return SystemModel(Structure.from_paths(3, [[1, 2], [1, 3]]), FGM(theta), margin)


def series3_system(margin=LFR_Y):
    return SystemModel(Structure.series(3), Independence(3), margin)


class TestGrid:
    def test_log_spacing(self):
        g = Grid.log_spaced(0.01, 10.0, 101)
        assert g.points[0] == pytest.approx(0.01)
        assert g.points[-1] == pytest.approx(10.0)
        assert len(g) == 101

    def test_validation(self):
        with pytest.raises(ValueError):
            Grid(np.array([1.0]))
        with pytest.raises(ValueError):
            Grid(np.array([0.0, 1.0]))
        with pytest.raises(ValueError):
            Grid(np.array([1.0, 1.0]))

    def test_margin_bracketed_identical_margins(self):
        d = Exponential(2.0)
        g = Grid.margin_bracketed(d, d, size=11)
        assert g.points[0] == pytest.approx(d.quantile(0.001), rel=1e-9)
        assert g.points[-1] == pytest.approx(d.quantile(0.999), rel=1e-9)

    def test_margin_bracketed_mixture_between_components(self):
        dx, dy = Exponential(0.5), Exponential(3.0)
        g = Grid.margin_bracketed(dx, dy, size=11)
        assert dy.quantile(0.001) <= g.points[0] <= dx.quantile(0.001)
        assert dy.quantile(0.999) <= g.points[-1] <= dx.quantile(0.999)


class TestCheckMonotone:
    def test_identity_increasing(self):
        g = Grid.linear(0.01, 0.99, 101)
        v = check_monotone(lambda p: p, g, "incr")
        assert v.holds == "yes"

    def test_negation_fails_with_witness(self):
        g = Grid.linear(0.01, 0.99, 101)
        v = check_monotone(lambda p: -p, g, "incr")
        assert v.holds == "no"
        # worst reversal is the full decline, witnessed at the right end
        assert v.violation == pytest.approx(g.points[-1] - g.points[0], rel=1e-9)
        assert v.witness_x == pytest.approx(g.points[-1])

    def test_slow_cumulative_reversal_detected(self):
        g = Grid.linear(0.01, 0.99, 1001)
        v = check_monotone(lambda p: -1e-6 * p, g, "incr", tol=1e-7)
        assert v.holds == "no"

    def test_fgm_elasticity_ratio_decreasing(self):
        d1 = fgm_system(1.0).distortion
        d2 = series3_system().distortion
        g = Grid.linear(1e-3, 1 - 1e-3, 2001)
        v = check_monotone(lambda p: np.asarray(d1.H(p)) / np.asarray(d2.H(p)), g, "decr")
        assert v.holds == "yes"
        ratio = d1.H(g.points) / d2.H(g.points)
        assert ratio[0] == pytest.approx(2.0 / 3.0, abs=1e-2)
        assert ratio[-1] == pytest.approx(1.0 / 3.0, abs=1e-2)

    def test_skipped_points_counted(self):
        g = Grid.linear(0.01, 0.99, 100)

        def f(p):
            out = np.asarray(p).copy()
            out[:3] = np.nan
            return out

        v = check_monotone(f, g, "incr")
        assert v.holds == "yes"
        assert v.skipped == 3

    def test_too_many_skips_inconclusive(self):
        g = Grid.linear(0.01, 0.99, 100)

        def f(p):
            out = np.asarray(p).copy()
            out[::2] = np.inf
            return out

        v = check_monotone(f, g, "incr")
        assert v.holds == "inconclusive"

    def test_all_skipped_raises(self):
        g = Grid.linear(0.01, 0.99, 10)
        with pytest.raises(ValueError, match="empty grid"):
            check_monotone(lambda p: np.full_like(p, np.nan), g, "incr")

    def test_bad_direction_rejected(self):
        g = Grid.linear(0.01, 0.99, 10)
        with pytest.raises(ValueError):
            check_monotone(lambda p: p, g, "sideways")


class TestCheckSign:
    def test_nonpositive(self):
        g = Grid.linear(0.1, 0.9, 9)
        assert check_sign(lambda p: -p, g, "nonpositive").holds == "yes"
        assert check_sign(lambda p: p - 0.5, g, "nonpositive").holds == "no"

    def test_zero_within_slack(self):
        g = Grid.linear(0.1, 0.9, 9)
        v = check_sign(lambda p: np.full_like(p, 1e-12), g, "nonpositive", tol=1e-8)
        assert v.holds == "yes"


class TestCheckOrder:
    def test_lfr_pair_cumulative_hazard_order(self):
        # constant cumulative-hazard ratio alpha1/alpha2: weakly increasing
        assert check_order(LFR_X, LFR_Y, "c_star").holds == "yes"
        assert check_order(LFR_Y, LFR_X, "st").holds == "yes"

    def test_exponential_pair_reversed_orders(self):
        x, y = Exponential(3.0), Exponential(2.0)
        assert check_order(x, y, "b").holds == "yes"
        assert check_order(x, y, "b_star").holds == "yes"
        assert check_order(x, y, "st").holds == "yes"
        assert check_order(x, y, "hr").holds == "yes"

    def test_identical_laws_reflexive(self):
        d = Exponential(2.0)
        for relation in ("st", "hr", "rh", "c", "b", "c_star", "b_star"):
            v = check_order(d, d, relation)
            assert v.holds == "yes"
            assert abs(v.violation) <= v.tolerance

    def test_st_fails_in_wrong_direction(self):
        assert check_order(LFR_X, LFR_Y, "st").holds == "no"

    def test_unknown_relation(self):
        with pytest.raises(ValueError):
            check_order(LFR_X, LFR_Y, "mrl")

    def test_implication_chains_on_random_pairs(self):
        # hr => st, c => c_star, b => b_star on a seeded random corpus
        rng = np.random.default_rng(881)
        violations = 0
        for _ in range(200):
            kind = rng.integers(0, 3)
            if kind == 0:
                dx = Exponential(float(rng.uniform(0.2, 4.0)))
                dy = Exponential(float(rng.uniform(0.2, 4.0)))
            elif kind == 1:
                beta = float(rng.uniform(0.0, 2.0))
                dx = LinearFailureRate(float(rng.uniform(0.2, 4.0)), beta)
                dy = LinearFailureRate(float(rng.uniform(0.2, 4.0)), float(rng.uniform(0.0, 2.0)))
            else:
                dx = Weibull(float(rng.uniform(0.6, 3.0)), float(rng.uniform(0.3, 3.0)))
                dy = Weibull(float(rng.uniform(0.6, 3.0)), float(rng.uniform(0.3, 3.0)))
            grid = Grid.margin_bracketed(dx, dy)
            for strong, weak in (("hr", "st"), ("c", "c_star"), ("b", "b_star")):
                if check_order(dx, dy, strong, grid=grid).holds == "yes":
                    if check_order(dx, dy, weak, grid=grid).holds != "yes":
                        violations += 1
        assert violations == 0

    def test_antisymmetry_of_st(self):
        d1 = Exponential(2.0)
        d2 = Exponential(2.0)
        grid = Grid.margin_bracketed(d1, d2)
        fwd = check_order(d1, d2, "st", grid=grid)
        rev = check_order(d2, d1, "st", grid=grid)
        assert fwd.holds == "yes" and rev.holds == "yes"
        diff = np.abs(np.asarray(d1.sf(grid.points)) - np.asarray(d2.sf(grid.points)))
        assert diff.max() < fwd.tolerance


class TestSystemOrderDirect:
    def test_worked_fgm_setup_certifiable(self):
        v = system_order_direct(fgm_system(), series3_system(), "c_star")
        assert v.holds == "yes"

    def test_worked_gumbel_setup(self):
        s1 = SystemModel(Structure.series(4), GumbelHougaard(2.0, 4), Exponential(3.0))
        s2 = SystemModel(Structure.series(2), GumbelHougaard(2.0, 2), Exponential(2.0))
        assert system_order_direct(s1, s2, "b_star").holds == "yes"

    def test_identical_systems_constant_ratio(self):
        s = fgm_system()
        s_other = fgm_system()
        for relation in ("c_star", "b_star"):
            v = system_order_direct(s, s_other, relation)
            assert v.holds == "yes"
            assert abs(v.violation) <= v.tolerance

    def test_relation_restricted(self):
        with pytest.raises(ValueError):
            system_order_direct(fgm_system(), series3_system(), "st")

    def test_kofn_direct_agrees_with_index_predicate(self):
        # where the index inequalities hold the direct grid check must agree
        from coherent_age.verifier import corollary_index_check

        margins_c = (LFR_X, LFR_Y)
        margins_b = (Exponential(3.0), Exponential(2.0))
        for n in range(1, 6):
            for k in range(1, n + 1):
                for m in range(1, 6):
                    for l in range(1, m + 1):
                        if corollary_index_check(k, n, l, m, "c_star"):
                            s1 = SystemModel.k_of_n(k, n, margins_c[0])
                            s2 = SystemModel.k_of_n(l, m, margins_c[1])
                            assert system_order_direct(s1, s2, "c_star").holds == "yes"
                        if corollary_index_check(k, n, l, m, "b_star"):
                            s1 = SystemModel.k_of_n(k, n, margins_b[0])
                            s2 = SystemModel.k_of_n(l, m, margins_b[1])
                            assert system_order_direct(s1, s2, "b_star").holds == "yes"


class TestIntegralIdentity:
    def test_constant_integrand_series(self):
        sysm = series3_system(Exponential(1.0))
        report = integral_identity_check(sysm)
        assert report.max_abs < 1e-9

    def test_fgm_system(self):
        report = integral_identity_check(fgm_system())
        assert report.max_abs < 1e-6

    def test_parallel_reversed_identity(self):
        sysm = SystemModel(Structure.parallel(2), Independence(2), Exponential(1.0))
        report = integral_identity_check(sysm)
        assert report.max_abs_cum_rev_hazard < 1e-9


class TestSignChangeCount:
    def test_single_crossing(self):
        g = Grid.linear(0.1, 2.0, 101)
        count, pattern = sign_change_count(lambda x: x - 1.0, g)
        assert (count, pattern) == (1, "-+")

    def test_constant(self):
        g = Grid.linear(0.1, 2.0, 11)
        assert sign_change_count(lambda x: np.ones_like(x), g) == (0, "+")

    def test_system_cumulative_hazard_gap(self):
        # Delta_sys1 - 0.8 * Delta_sys2 crosses at most once on the grid
        s1, s2 = fgm_system(), series3_system()
        g = Grid.margin_bracketed(s1.margin, s2.margin)

        def gap(x):
            return np.asarray(s1.cum_hazard(x)) - 0.8 * np.asarray(s2.cum_hazard(x))

        count, pattern = sign_change_count(gap, g)
        assert count <= 1
        assert pattern in ("-", "+", "-+")
