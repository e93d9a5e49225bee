from __future__ import annotations

import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sphereminima.potentials import (
    PotentialFunction,
    convexity_probe,
    f_deriv,
    f_eval,
    gaussian,
    logarithmic,
    parse_kernel,
    polynomial_kernel,
    riesz,
)

KERNELS = [riesz(1), riesz(2), riesz(2, 1), riesz(-1), gaussian(1), gaussian(0.3), logarithmic(),
           polynomial_kernel([1, -2, 0.5])]


def mp_kernel(f: PotentialFunction):
    if f.kind == "riesz":
        sign = 1 if f.s > 0 else -1
        return lambda t: sign * (t + f.C) ** (-mp.mpf(f.s) / 2)
    if f.kind == "log":
        return lambda t: -mp.log(t) / 2
    if f.kind == "gauss":
        return lambda t: mp.exp(-f.a * t)
    return lambda t: mp.polyval(list(reversed(f.coeffs)), t)


class TestValues:
    def test_spot_values(self):
        assert riesz(1)(4.0) == 0.5
        assert logarithmic()(1.0) == 0.0
        assert riesz(2, 1)(1.0) == 0.5
        assert riesz(-1)(4.0) == -2.0
        assert gaussian(2)(0.5) == pytest.approx(math.exp(-1))
        assert polynomial_kernel([1, 2])(3.0) == 7.0

    def test_singular_at_zero(self):
        assert riesz(1)(0.0) == math.inf
        assert logarithmic()(0.0) == math.inf
        assert riesz(1).singular_at_zero and logarithmic().singular_at_zero
        assert not riesz(1, 0.5).singular_at_zero and not riesz(-1).singular_at_zero
        assert riesz(1, 0.5)(0.0) == pytest.approx(0.5 ** -0.5)

    def test_vectorized(self):
        t = np.linspace(0.5, 4, 7)
        np.testing.assert_allclose(riesz(2)(t), 1 / t)

    def test_domain(self):
        with pytest.raises(ValueError):
            riesz(1)(4.5)
        with pytest.raises(ValueError):
            riesz(1)(-0.1)
        assert riesz(1)(4.0 + 1e-13) == pytest.approx(0.5)
        with pytest.raises(ValueError):
            f_eval(riesz(1), 4.000001)

    def test_constructor_validation(self):
        with pytest.raises(ValueError):
            riesz(0)
        with pytest.raises(ValueError):
            riesz(1, -1)
        with pytest.raises(ValueError):
            gaussian(0)
        with pytest.raises(ValueError):
            PotentialFunction("coulomb")

    def test_complete_monotonicity_flags(self):
        assert all(f.completely_monotone for f in (riesz(1), riesz(-1), gaussian(1), logarithmic()))
        assert not riesz(-3).completely_monotone
        assert not polynomial_kernel([0, 1]).completely_monotone


class TestDerivatives:
    @pytest.mark.parametrize("f", KERNELS, ids=lambda f: f.spec)
    @given(t=st.floats(0.05, 3.95), k=st.integers(1, 6))
    def test_match_mpmath(self, f, t, k):
        ref = float(mp.diff(mp_kernel(f), mp.mpf(t), k))
        assert f.derivative(t, k) == pytest.approx(ref, rel=1e-9, abs=1e-12)

    def test_spot_derivatives(self):
        assert riesz(2, 1).derivative(1.0) == pytest.approx(-0.25)
        assert riesz(2).derivative(1.0) == pytest.approx(-1.0)
        assert gaussian(1).derivative(0.5) == pytest.approx(-math.exp(-0.5))
        assert logarithmic().derivative(2.0) == pytest.approx(-0.25)

    def test_derivative_zero_order_is_value(self):
        assert riesz(1).derivative(2.0, 0) == riesz(1)(2.0)

    def test_singular_derivative_rejected(self):
        with pytest.raises(ValueError):
            riesz(1).derivative(0.0)
        with pytest.raises(ValueError):
            logarithmic().derivative(0.0, 2)
        assert gaussian(1).derivative(0.0) == -1.0  # smooth kernels are fine at 0
        with pytest.raises(ValueError):
            f_deriv(gaussian(1), 0.0)

    @pytest.mark.parametrize("f", KERNELS, ids=lambda f: f.spec)
    @given(t=st.floats(-0.95, 0.95), k=st.integers(0, 5))
    def test_g_chain_rule(self, f, t, k):
        g = f.g
        ref = float(mp.diff(lambda x: mp_kernel(f)(2 - 2 * x), mp.mpf(t), k))
        assert g.derivative(t, k) == pytest.approx(ref, rel=1e-8, abs=1e-10)
        assert g(t) == pytest.approx(f(2 - 2 * t))


class TestParse:
    @pytest.mark.parametrize("text,expected", [
        ("riesz:s=1", riesz(1)),
        ("riesz:s=2,C=0.5", riesz(2, 0.5)),
        ("riesz:s=-1", riesz(-1)),
        ("log", logarithmic()),
        ("gauss:a=1", gaussian(1)),
        ("poly:0,1", polynomial_kernel([0, 1])),
        (" RIESZ : s = 1 ", riesz(1)),
    ])
    def test_accepted(self, text, expected):
        assert parse_kernel(text) == expected

    @pytest.mark.parametrize("text", ["", "riesz", "riesz:t=1", "riesz:s", "gauss:a=1,b=2", "log:x=1",
                                      "poly:", "poly:a", "coulomb:s=1", "riesz:s=0", "gauss:a=-1"])
    def test_rejected(self, text):
        with pytest.raises(ValueError):
            parse_kernel(text)

    @given(st.sampled_from(KERNELS))
    def test_spec_round_trip(self, f):
        assert parse_kernel(f.spec) == f

    @given(st.floats(-6, 6).filter(lambda s: abs(s) > 1e-3), st.floats(0, 3), st.floats(0.01, 5))
    def test_round_trip_random(self, s, C, a):
        for f in (riesz(float(f"{s:g}"), float(f"{C:g}")), gaussian(float(f"{a:g}"))):
            assert parse_kernel(f.spec) == f


class TestConvexityProbe:
    grid = np.linspace(0.05, 3.95, 300)

    def test_completely_monotone_even_orders_convex(self):
        for f in (riesz(1), gaussian(1), logarithmic()):
            for k in (0, 2, 4):
                assert convexity_probe(f, k, self.grid).is_convex_on_grid

    def test_odd_orders_concave(self):
        rep = convexity_probe(riesz(1), 3, self.grid)
        assert not rep.is_convex_on_grid and rep.min_second_difference < 0

    def test_linear_is_convex_despite_rounding(self):
        assert convexity_probe(polynomial_kernel([1.0, 3.0]), 0, self.grid).is_convex_on_grid

    def test_high_orders_flagged_unreliable(self):
        assert convexity_probe(riesz(1), 6, self.grid).reliable
        assert not convexity_probe(riesz(1), 7, self.grid).reliable

    def test_bad_grid(self):
        with pytest.raises(ValueError):
            convexity_probe(riesz(1), 2, [0.5, 1.0])
        with pytest.raises(ValueError):
            convexity_probe(riesz(1), 2, [0.0, 1.0, 2.0])


class TestInvariants:
    @pytest.mark.parametrize("f", KERNELS, ids=lambda f: f.spec)
    def test_central_differences(self, f):
        rng = np.random.default_rng(7)
        h = 1e-5
        for t in rng.uniform(0.1, 3.9, 50):
            fd = (f(t + h) - f(t - h)) / (2 * h)
            d1 = f.derivative(t, 1)
            assert abs(fd - d1) <= 1e-6 * (1 + abs(d1))

    @pytest.mark.parametrize("f", KERNELS, ids=lambda f: f.spec)
    def test_g_endpoints(self, f):
        assert f.g(-1.0) == f(4.0)
        assert f.g(1.0) == f(0.0)
        assert f.g.infinite_at_one == (f(0.0) == math.inf)

    def test_completely_monotone_probe_on_fine_grid(self):
        grid = np.linspace(0.05, 3.95, 1000)
        for f in (riesz(1), riesz(2), riesz(-1), gaussian(1), logarithmic()):
            for k in (0, 2, 4, 6):
                assert convexity_probe(f, k, grid).is_convex_on_grid, (f.spec, k)
