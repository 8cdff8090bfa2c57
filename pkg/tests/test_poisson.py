"""Ball kernel: closed-form values, extension quadrature, two-sided bounds."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad

from nonlocal_lab.errors import (
    ConfigParseError,
    DomainViolation,
    NonIntegrableTail,
    UnsupportedDimension,
)
from nonlocal_lab.operator import affine, constant, indicator, piecewise_constant
from nonlocal_lab.poisson import (
    PoissonKernelBall,
    bound_ratio,
    check_poisson_bounds,
    poisson_constant,
    poisson_eval,
    poisson_extend,
)

UNIT = PoissonKernelBall(n=1, s=0.5, r=1.0)


class TestConstant:
    def test_line_half_order_is_one_over_pi(self):
        assert poisson_constant(1, 0.5) == pytest.approx(1.0 / math.pi, abs=1e-12)

    def test_plane_half_order_is_one_over_pi_squared(self):
        assert poisson_constant(2, 0.5) == pytest.approx(1.0 / math.pi ** 2, abs=1e-12)

    def test_vanishes_toward_zero_order(self):
        assert 0.0 < poisson_constant(1, 1e-9) < 1e-8

    def test_rejects_bad_inputs(self):
        with pytest.raises(ConfigParseError):
            poisson_constant(0, 0.5)
        with pytest.raises(ConfigParseError):
            poisson_constant(1, 1.0)
        with pytest.raises(ConfigParseError):
            PoissonKernelBall(n=1, s=0.5, r=-1.0)
        with pytest.raises(ConfigParseError):
            PoissonKernelBall(n=2, s=0.5, r=1.0, center=0.0)


class TestEval:
    def test_spot_value_on_the_line(self):
        # c * (1-0)^s * (2-1)^(-s) * (sqrt2)^(-1) = 1/(pi sqrt2)
        val = poisson_eval(UNIT, 0.0, math.sqrt(2.0))
        assert val == pytest.approx(1.0 / (math.pi * math.sqrt(2.0)), abs=1e-12)

    def test_plane_formula(self):
        pk = PoissonKernelBall(n=2, s=0.25, r=1.0, center=(0.0, 0.0))
        x = (0.3, 0.0)
        y = (0.0, 2.0)
        dist = math.hypot(0.3, 2.0)
        want = (poisson_constant(2, 0.25) * (1 - 0.09) ** 0.25
                * (4.0 - 1.0) ** -0.25 / dist ** 2)
        assert poisson_eval(pk, x, y) == pytest.approx(want, rel=1e-14)

    def test_even_in_y_from_the_center(self):
        for y in (1.5, 2.0, 7.0):
            assert poisson_eval(UNIT, 0.0, y) == poisson_eval(UNIT, 0.0, -y)

    def test_translation_of_the_center(self):
        moved = PoissonKernelBall(n=1, s=0.5, r=1.0, center=4.0)
        assert poisson_eval(moved, 4.2, 6.0) == pytest.approx(
            poisson_eval(UNIT, 0.2, 2.0), rel=1e-14)

    def test_far_decay_exponent(self):
        for s in (0.25, 0.5, 0.75):
            pk = PoissonKernelBall(n=1, s=s, r=1.0)
            ratio = poisson_eval(pk, 0.0, 1e3) / poisson_eval(pk, 0.0, 1e4)
            assert ratio == pytest.approx(10.0 ** (1.0 + 2.0 * s), rel=1e-3)

    def test_domain_violations(self):
        with pytest.raises(DomainViolation):
            poisson_eval(UNIT, 1.0, 2.0)  # x on the boundary
        with pytest.raises(DomainViolation):
            poisson_eval(UNIT, 1.5, 2.0)  # x outside
        with pytest.raises(DomainViolation):
            poisson_eval(UNIT, 0.0, 1.0)  # y on the boundary
        with pytest.raises(DomainViolation):
            poisson_eval(UNIT, 0.0, 0.5)  # y inside


class TestExtend:
    @pytest.mark.parametrize("s", [0.25, 0.5, 0.75])
    @pytest.mark.parametrize("x", [0.0, 0.5, -0.5])
    def test_reproduces_constants(self, s, x):
        pk = PoissonKernelBall(n=1, s=s, r=1.0)
        res = poisson_extend(pk, constant(1.0), x)
        assert abs(res.value - 1.0) < 1e-6
        assert res.error_bound < 1e-6

    def test_indicator_against_antiderivative(self):
        # int_1^3 dz/(pi z sqrt(z^2-1)) = arccos(1/3)/pi
        res = poisson_extend(UNIT, indicator(1.0, 3.0), 0.0)
        assert res.value == pytest.approx(math.acos(1.0 / 3.0) / math.pi, abs=1e-6)

    def test_off_center_against_library_quadrature(self):
        pk = PoissonKernelBall(n=1, s=0.6, r=1.0)
        x = 0.3
        res = poisson_extend(pk, indicator(1.0, 3.0), x)

        def f(z):
            return poisson_eval(pk, x, z)

        ref, _ = quad(f, 1.0, 3.0, limit=400)
        assert res.value == pytest.approx(ref, rel=1e-8)

    def test_two_sided_data_against_library_quadrature(self):
        pk = PoissonKernelBall(n=1, s=0.4, r=1.0)
        g = piecewise_constant([(-6.0, -2.0, 2.0), (1.5, 2.5, -1.0)])
        x = -0.2
        res = poisson_extend(pk, g, x)
        ref = 2.0 * quad(lambda z: poisson_eval(pk, x, z), -6.0, -2.0, limit=400)[0] \
            - quad(lambda z: poisson_eval(pk, x, z), 1.5, 2.5, limit=400)[0]
        assert res.value == pytest.approx(ref, rel=1e-8)

    def test_nonnegative_data_nonnegative_extension(self):
        for x in (-0.7, 0.0, 0.4):
            res = poisson_extend(UNIT, indicator(-4.0, -2.0), x)
            assert res.value >= 0.0

    def test_monotone_in_the_data(self):
        lo = indicator(1.0, 2.0)
        hi = indicator(1.0, 2.0) + indicator(-3.0, -1.5)
        for x in (-0.5, 0.0, 0.5):
            assert (poisson_extend(UNIT, lo, x).value
                    <= poisson_extend(UNIT, hi, x).value)

    def test_linear_in_the_data(self):
        g1 = indicator(1.0, 2.0)
        g2 = indicator(-5.0, -3.0)
        combo = 2.0 * g1 + (-3.0) * g2
        got = poisson_extend(UNIT, combo, 0.25)
        want = (2.0 * poisson_extend(UNIT, g1, 0.25).value
                - 3.0 * poisson_extend(UNIT, g2, 0.25).value)
        assert got.value == pytest.approx(want, abs=1e-9)

    def test_growth_must_pair_with_the_order(self):
        pk = PoissonKernelBall(n=1, s=0.25, r=1.0)
        with pytest.raises(NonIntegrableTail):
            poisson_extend(pk, affine(0.0, 1.0), 0.0)

    def test_quadrature_only_on_the_line(self):
        pk = PoissonKernelBall(n=2, s=0.5, r=1.0, center=(0.0, 0.0))
        with pytest.raises(UnsupportedDimension):
            poisson_extend(pk, constant(1.0), (0.0, 0.0))

    def test_evaluation_point_must_be_inside(self):
        with pytest.raises(DomainViolation):
            poisson_extend(UNIT, constant(1.0), 1.0)


@given(st.floats(0.15, 0.85), st.floats(-0.8, 0.8))
def test_normalization_everywhere(s, x):
    pk = PoissonKernelBall(n=1, s=s, r=1.0)
    res = poisson_extend(pk, constant(1.0), x)
    assert abs(res.value - 1.0) < 1e-5


class TestBounds:
    def test_single_sample_matches_eval(self):
        z = 2.0 * math.sqrt(2.0)
        want = poisson_eval(UNIT, 0.0, z) * z ** 2
        assert bound_ratio(UNIT, 0.0, z) == pytest.approx(want, rel=1e-14)
        rep = check_poisson_bounds(UNIT, [0.0], [z])
        assert rep.min_ratio == rep.max_ratio == pytest.approx(want, rel=1e-14)

    def test_grid_ratios_finite_and_tame(self):
        xs = np.linspace(-0.49, 0.49, 50)
        zs = np.concatenate([np.linspace(-10.0, -2.0, 25),
                             np.linspace(2.0, 10.0, 25)])
        rep = check_poisson_bounds(UNIT, xs, zs)
        assert np.isfinite(rep.min_ratio) and rep.min_ratio > 0.0
        assert np.isfinite(rep.max_ratio)
        assert rep.spread < 100.0
        assert rep.n_samples == 2500

    def test_ratios_invariant_under_rescaling(self):
        big = PoissonKernelBall(n=1, s=0.3, r=2.0)
        small = PoissonKernelBall(n=1, s=0.3, r=1.0)
        xs = np.linspace(-0.4, 0.4, 5)
        zs = np.array([2.5, 4.0, 9.0])
        a = check_poisson_bounds(small, xs, zs)
        b = check_poisson_bounds(big, 2.0 * xs, 2.0 * zs)
        assert a.min_ratio == pytest.approx(b.min_ratio, rel=1e-12)
        assert a.max_ratio == pytest.approx(b.max_ratio, rel=1e-12)

    def test_window_hypotheses_enforced(self):
        with pytest.raises(DomainViolation):
            check_poisson_bounds(UNIT, [0.5], [3.0])  # x on the window edge
        with pytest.raises(DomainViolation):
            check_poisson_bounds(UNIT, [0.0], [1.9])  # z inside the guard
        # the closed exterior window starts exactly at 2r
        rep = check_poisson_bounds(UNIT, [0.0], [2.0])
        assert rep.n_samples == 1
