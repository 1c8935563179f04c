import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from thermo_neutral.errors import InvalidSystem
from thermo_neutral.horseshoe import (
    REFERENCE_ETA1,
    REFERENCE_ETA2,
    Horseshoe,
    bernoulli_stats,
    best_bernoulli,
    critical_r,
    dim_curve,
    find_bernoulli_maximizers,
    hr_curve,
    hr_derivative,
    hr_derivatives_at_half,
    induced_system,
    markov_crosscheck,
    mmhd_bernoulli,
)
from thermo_neutral.surface import eval_point, is_cohomologous_to_constant, neutralized_entropy

REF = Horseshoe.reference()
# regression values from the closed forms (recorded after the oracle runs)
SECOND_AT_R3 = 0.58318357546
P_STAR_R3 = 0.045343622474844629
P_DIM = 0.03475849708456311


def fd_second(hs, r, p=0.5, h=1e-4):
    f = [float(hr_curve(hs, p + k * h, r)) for k in range(-2, 3)]
    return (-f[0] + 16 * f[1] - 30 * f[2] + 16 * f[3] - f[4]) / (12 * h * h)


class TestHorseshoe:
    def test_reference_parameters(self):
        assert REFERENCE_ETA1 == 0.9703
        assert REFERENCE_ETA2 == pytest.approx(0.9703**117, rel=1e-15)

    @pytest.mark.parametrize("etas", [(0.6, 0.4), (0.0, 0.5), (0.5, 1.0), (0.7, 0.7)])
    def test_rejects_invalid(self, etas):
        with pytest.raises(InvalidSystem):
            Horseshoe(*etas)

    def test_induced_symmetric(self):
        s = induced_system(Horseshoe(0.4, 0.4))
        assert np.allclose(s.phi_u.values, -math.log(0.4)) and np.allclose(s.phi_s.values, math.log(0.4))
        assert is_cohomologous_to_constant(s, "u") and is_cohomologous_to_constant(s, "s")

    def test_induced_reference(self):
        s = induced_system(REF)
        l1 = math.log(0.9703)
        assert s.phi_u.values == pytest.approx([-l1, -117 * l1], rel=1e-12)
        assert s.phi_u.values == pytest.approx([0.030150, 3.52755], abs=1e-5)
        assert s.phi_s.values == pytest.approx([117 * l1, l1], rel=1e-12)

    @settings(max_examples=50, deadline=None)
    @given(st.floats(0.01, 0.98), st.floats(0.01, 0.98))
    def test_induced_is_hyperbolic(self, a, b):
        if a + b >= 1:
            return
        induced_system(Horseshoe(a, b))  # raises if hyperbolicity fails


class TestBernoulliStats:
    def test_endpoints(self):
        for p in (0.0, 1.0):
            s = bernoulli_stats(REF, p, 3.0)
            assert s.h == 0.0 and s.dim == 0.0 and s.hr == 0.0

    def test_midpoint(self):
        hs = Horseshoe(0.4, 0.2)
        s = bernoulli_stats(hs, 0.5, 1.0)
        assert s.h == pytest.approx(math.log(2), abs=1e-15)
        assert s.lambda1 == pytest.approx(-(math.log(0.4) + math.log(0.2)) / 2, abs=1e-15)

    def test_closed_forms(self):
        hs = Horseshoe(0.4, 0.2)
        p, r = 0.3, 2.0
        s = bernoulli_stats(hs, p, r)
        h = -p * math.log(p) - (1 - p) * math.log(1 - p)
        l1 = -p * math.log(0.4) - (1 - p) * math.log(0.2)
        l2 = p * math.log(0.2) + (1 - p) * math.log(0.4)
        assert (s.h, s.lambda1, s.lambda2) == pytest.approx((h, l1, l2), rel=1e-14)
        assert s.dim == pytest.approx(h / l1 - h / l2, rel=1e-14)
        assert s.hr == pytest.approx(h + r * s.dim, rel=1e-14)

    def test_symmetry(self, rng):
        for p in rng.random(20):
            assert bernoulli_stats(REF, p, 3.0).hr == pytest.approx(bernoulli_stats(REF, 1 - p, 3.0).hr, abs=1e-14)

    @settings(max_examples=100, deadline=None)
    @given(st.floats(0.0, 1.0))
    def test_exponent_sum_independent_of_p(self, p):
        hs = Horseshoe(0.4, 0.2)
        s = bernoulli_stats(hs, p, 0.0)
        assert s.lambda1 + abs(s.lambda2) == pytest.approx(-(math.log(0.4) + math.log(0.2)), abs=1e-14)

    def test_agrees_with_family_at_mme(self):
        for hs in (Horseshoe(0.4, 0.2), REF):
            pt = eval_point(induced_system(hs), 0.0, 0.0)
            for r in (0.0, 1.0, 3.0):
                assert neutralized_entropy(pt, r) == pytest.approx(bernoulli_stats(hs, 0.5, r).hr, abs=1e-9)

    def test_vector_curves_match_scalar(self):
        ps = np.linspace(0.01, 0.99, 7)
        assert np.allclose(hr_curve(REF, ps, 3.0), [bernoulli_stats(REF, p, 3.0).hr for p in ps], rtol=1e-14)
        assert np.allclose(dim_curve(REF, ps), [bernoulli_stats(REF, p, 0.0).dim for p in ps], rtol=1e-14)

    def test_invalid(self):
        with pytest.raises(ValueError):
            bernoulli_stats(REF, 1.2, 0.0)
        with pytest.raises(ValueError):
            bernoulli_stats(REF, 0.5, -1.0)


class TestDerivatives:
    def test_equal_etas(self):
        eta = 0.4
        for r in (0.0, 0.5, 3.0):
            first, second = hr_derivatives_at_half(Horseshoe(eta, eta), r)
            assert first == 0.0
            assert second == pytest.approx(-4 + 16 * r / (2 * math.log(eta)), rel=1e-14)
            assert second <= -4

    def test_reference_r3(self):
        first, second = hr_derivatives_at_half(REF, 3.0)
        assert first == 0.0
        assert second == pytest.approx(SECOND_AT_R3, abs=1e-10)
        assert round(second, 2) == 0.58
        assert abs(fd_second(REF, 3.0) - second) < 1e-5

    def test_reference_r0(self):
        assert hr_derivatives_at_half(REF, 0.0)[1] == -4.0

    def test_analytic_first_derivative_vanishes_at_half(self):
        assert abs(hr_derivative(REF, 0.5, 3.0)) < 1e-12

    def test_fd_matches_closed_form(self, rng):
        for _ in range(10):
            e1 = rng.uniform(0.05, 0.9)
            e2 = rng.uniform(0.01, 0.99 - e1)
            r = rng.uniform(0, 5)
            hs = Horseshoe(e1, e2)
            assert abs(fd_second(hs, r) - hr_derivatives_at_half(hs, r)[1]) < 1e-5

    def test_first_derivative_matches_fd(self, rng):
        hs = Horseshoe(0.4, 0.2)
        for p in rng.uniform(0.05, 0.95, 10):
            h = 1e-6
            fd = (float(hr_curve(hs, p + h, 2.0)) - float(hr_curve(hs, p - h, 2.0))) / (2 * h)
            assert hr_derivative(hs, p, 2.0) == pytest.approx(fd, abs=1e-7)

    def test_critical_r_reference(self):
        rc, lo, hi = critical_r(REF, 3.0)
        assert 0 < lo <= rc <= hi <= 3
        assert hr_derivatives_at_half(REF, lo)[1] < 0 < hr_derivatives_at_half(REF, hi)[1]
        assert abs(hr_derivatives_at_half(REF, rc)[1]) < 1e-9
        assert rc == pytest.approx(2.6182673686, abs=1e-8)

    def test_no_critical_r_for_symmetric(self):
        assert critical_r(Horseshoe(0.4, 0.4), 3.0) is None


class TestMaximizers:
    def test_symmetric_single(self):
        for r in (0.0, 1.0, 5.0):
            m = find_bernoulli_maximizers(Horseshoe(0.4, 0.4), r)
            assert len(m) == 1 and m[0][0] == pytest.approx(0.5, abs=1e-10)

    def test_reference_r0(self):
        m = find_bernoulli_maximizers(REF, 0.0)
        assert len(m) == 1
        assert m[0][0] == pytest.approx(0.5, abs=1e-10) and m[0][1] == pytest.approx(math.log(2), abs=1e-15)

    def test_reference_r3_pair(self):
        m = find_bernoulli_maximizers(REF, 3.0)
        assert len(m) == 2
        (p1, v1), (p2, v2) = m
        assert abs(p1 + p2 - 1) < 1e-10
        assert abs(v1 - v2) < 1e-12
        assert v1 > bernoulli_stats(REF, 0.5, 3.0).hr
        assert p1 == pytest.approx(P_STAR_R3, abs=1e-10)

    def test_pairs_are_mirrored(self, rng):
        for r in (2.8, 3.0, 5.0, 20.0):
            m = find_bernoulli_maximizers(REF, r)
            assert len(m) == 2
            ps = sorted(p for p, _ in m)
            assert abs(ps[0] + ps[1] - 1) < 1e-10
            assert abs(m[0][1] - m[1][1]) < 1e-12

    def test_grid_scan_agrees(self):
        grid = np.linspace(1e-6, 1 - 1e-6, 10**6)
        for r in (1.0, 3.0):
            vals = hr_curve(REF, grid, r)
            assert best_bernoulli(REF, r)[1] >= vals.max() - 1e-12

    def test_small_grid_rejected(self):
        with pytest.raises(ValueError):
            find_bernoulli_maximizers(REF, 1.0, grid_n=50)


class TestMmhd:
    def test_symmetric(self):
        assert mmhd_bernoulli(Horseshoe(0.3, 0.3)) == pytest.approx(0.5, abs=1e-10)

    @pytest.mark.parametrize("etas", [(0.4, 0.2), (REFERENCE_ETA1, REFERENCE_ETA2)])
    def test_brute_force_grid(self, etas):
        hs = Horseshoe(*etas)
        grid = np.linspace(0, 0.5, 10**6 + 1)[1:]
        brute = grid[np.argmax(dim_curve(hs, grid))]
        p = mmhd_bernoulli(hs)
        assert abs(p - brute) < 1e-5
        assert float(dim_curve(hs, p)) >= float(dim_curve(hs, 0.5))

    def test_reference_value(self):
        assert mmhd_bernoulli(REF) == pytest.approx(P_DIM, abs=1e-10)


class TestLimits:
    def test_small_r(self):
        for r in (1e-3, 1e-2, 0.1, 1.0):
            assert best_bernoulli(REF, r)[0] == pytest.approx(0.5, abs=1e-10)

    def test_small_r_closer_to_half(self):
        d_small = abs(best_bernoulli(REF, 1e-3)[0] - 0.5)
        # p*(1) is still 1/2 (the curvature at 1/2 only turns positive past r ~ 2.6)
        assert d_small <= abs(best_bernoulli(REF, 1.0)[0] - 0.5)
        assert d_small < abs(best_bernoulli(REF, 3.0)[0] - 0.5)

    def test_critical_r_never_below_one(self):
        # over a grid of valid horseshoes the curvature at 1/2 is negative for r <= 1
        for e1 in np.linspace(0.5, 0.999, 40):
            for k in (2, 10, 50, 117, 300):
                e2 = e1**k
                if e1 + e2 < 1:
                    assert hr_derivatives_at_half(Horseshoe(e1, e2), 1.0)[1] < 0

    def test_large_r(self):
        assert abs(best_bernoulli(REF, 1e3)[0] - mmhd_bernoulli(REF)) < 1e-3


def test_markov_does_not_beat_bernoulli():
    for hs in (REF, Horseshoe(0.4, 0.2)):
        for r in (0.0, 1.0, 3.0):
            assert markov_crosscheck(hs, r) <= best_bernoulli(hs, r)[1] + 1e-12
