from __future__ import annotations

import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import roots_jacobi

from sphereminima.orthopoly import (
    GegenbauerBasis,
    Polynomial,
    fundamental_polys,
    gauss_gegenbauer,
    gegenbauer_a0,
    gegenbauer_eval,
    gegenbauer_zeros,
    jacobi_zeros,
    reference_quadrature,
)

dims = st.integers(min_value=1, max_value=24)
degrees = st.integers(min_value=0, max_value=14)


def exact_moment(d: int, k: int) -> float:
    """Mean of t^k against (1 - t^2)^(d/2 - 1), in closed form via Beta functions."""
    if k % 2:
        return 0.0
    return float(mp.beta(mp.mpf(k + 1) / 2, mp.mpf(d) / 2) / mp.beta(mp.mpf(1) / 2, mp.mpf(d) / 2))


# ------------------------------------------------------------------ Polynomial


class TestPolynomial:
    def test_trims_trailing_zeros(self):
        p = Polynomial([1.0, 2.0, 0.0, 0.0])
        assert p.degree == 1
        assert Polynomial([0.0, 0.0]).is_zero()
        assert Polynomial().degree == -1

    def test_coeffs_read_only(self):
        p = Polynomial([1.0, 2.0])
        with pytest.raises(ValueError):
            p.coeffs[0] = 5.0

    @given(st.lists(st.floats(-5, 5), min_size=1, max_size=6),
           st.lists(st.floats(-5, 5), min_size=1, max_size=6),
           st.floats(-1, 1))
    def test_arithmetic_matches_numpy(self, a, b, t):
        pa, pb = Polynomial(a), Polynomial(b)
        ref = np.polynomial.Polynomial
        assert (pa + pb)(t) == pytest.approx(ref(a)(t) + ref(b)(t), abs=1e-9)
        assert (pa - pb)(t) == pytest.approx(ref(a)(t) - ref(b)(t), abs=1e-9)
        assert (pa * pb)(t) == pytest.approx(ref(a)(t) * ref(b)(t), abs=1e-8)
        assert (2.0 * pa)(t) == pytest.approx(2 * ref(a)(t), abs=1e-9)

    def test_derivative(self):
        p = Polynomial([1.0, 2.0, 3.0])  # 1 + 2t + 3t^2
        assert p.deriv().coeffs.tolist() == [2.0, 6.0]
        assert p.deriv(3).is_zero()

    def test_from_roots(self):
        p = Polynomial.from_roots([-1.0, 2.0])
        assert p(-1.0) == 0 and p(2.0) == 0 and p.degree == 2
        assert Polynomial.from_roots([])(3.0) == 1.0

    def test_zero_polynomial_evaluates_to_zero(self):
        assert Polynomial()(0.3) == 0.0
        assert np.all(Polynomial()(np.array([0.1, 0.2])) == 0.0)


# ---------------------------------------------------------------- Gegenbauer


class TestGegenbauerEval:
    @given(dims, degrees)
    def test_normalized_at_one(self, d, n):
        assert gegenbauer_eval(d, n, 1.0) == pytest.approx(1.0, abs=1e-12)

    @given(dims, st.floats(-1, 1))
    def test_low_degree_closed_forms(self, d, t):
        assert gegenbauer_eval(d, 2, t) == pytest.approx(((d + 1) * t**2 - 1) / d, abs=1e-12)
        assert gegenbauer_eval(d, 3, t) == pytest.approx(((d + 3) * t**3 - 3 * t) / d, abs=1e-12)

    @given(dims, degrees, st.floats(-1, 1))
    def test_parity(self, d, n, t):
        assert gegenbauer_eval(d, n, -t) == pytest.approx((-1) ** n * gegenbauer_eval(d, n, t), abs=1e-10)

    @given(st.integers(1, 12), st.floats(-1, 1))
    def test_circle_is_chebyshev(self, n, t):
        assert gegenbauer_eval(1, n, t) == pytest.approx(math.cos(n * math.acos(t)), abs=1e-10)

    def test_known_values(self):
        assert gegenbauer_eval(3, 2, 0.5) == pytest.approx(0.0, abs=1e-15)
        assert gegenbauer_eval(3, 3, 1 / math.sqrt(2)) == pytest.approx(0.0, abs=1e-15)

    def test_rejects_outside_interval(self):
        with pytest.raises(ValueError):
            gegenbauer_eval(3, 2, 1.1)
        with pytest.raises(ValueError):
            gegenbauer_eval(0, 2, 0.1)
        with pytest.raises(ValueError):
            gegenbauer_eval(3, -1, 0.1)

    def test_basis_polynomial_matches_recurrence(self):
        basis = GegenbauerBasis(5)
        t = np.linspace(-1, 1, 11)
        for n in range(8):
            np.testing.assert_allclose(basis.polynomial(n)(t), basis(n, t), atol=1e-12)


class TestOrthogonality:
    @given(dims, st.integers(0, 12), st.integers(0, 12))
    def test_orthogonal_against_weight(self, d, j, k):
        q = reference_quadrature(d)
        val = q(lambda t: gegenbauer_eval(d, j, t) * gegenbauer_eval(d, k, t))
        if j != k:
            assert abs(val) < 1e-12
        else:
            assert val > 0

    @given(dims, st.integers(1, 12))
    def test_a0_of_nonconstant_gegenbauer_vanishes(self, d, k):
        assert abs(gegenbauer_a0(d, GegenbauerBasis(d).polynomial(k))) < 1e-12

    @given(dims, st.integers(0, 16))
    def test_a0_monomials_match_beta_closed_form(self, d, k):
        p = Polynomial([0.0] * k + [1.0])
        assert gegenbauer_a0(d, p) == pytest.approx(exact_moment(d, k), abs=1e-14)

    def test_a0_specific(self):
        assert gegenbauer_a0(3, Polynomial([0, 0, 1])) == pytest.approx(0.25, abs=1e-15)
        assert gegenbauer_a0(4, 1.0) == 1.0


class TestZeros:
    @given(dims, st.integers(1, 20))
    def test_match_scipy_gauss_jacobi(self, d, n):
        a = d / 2 - 1
        ref, _ = roots_jacobi(n, a, a)
        np.testing.assert_allclose(gegenbauer_zeros(d, n), np.sort(ref), atol=1e-13)

    @given(dims, st.integers(1, 20))
    def test_are_zeros_and_symmetric(self, d, n):
        z = gegenbauer_zeros(d, n)
        assert np.all(np.abs(gegenbauer_eval(d, n, z)) < 1e-12)
        np.testing.assert_array_equal(z, -z[::-1])
        assert np.all(np.diff(z) > 0) and np.all(np.abs(z) < 1)

    @given(dims, st.integers(1, 18))
    def test_interlacing(self, d, n):
        a, b = gegenbauer_zeros(d, n), gegenbauer_zeros(d, n + 1)
        assert np.all(b[:-1] < a) and np.all(a < b[1:])

    @given(dims)
    def test_degree_two(self, d):
        z = 1 / math.sqrt(d + 1)
        np.testing.assert_allclose(gegenbauer_zeros(d, 2), [-z, z], atol=1e-15)

    @given(dims)
    def test_degree_three(self, d):
        z = math.sqrt(3 / (d + 3))
        np.testing.assert_allclose(gegenbauer_zeros(d, 3), [-z, 0.0, z], atol=1e-15)

    def test_rejects_degree_zero(self):
        with pytest.raises(ValueError):
            gegenbauer_zeros(3, 0)


class TestQuadrature:
    @given(dims, st.integers(1, 10), st.data())
    def test_exact_through_degree_2m_minus_1(self, d, m, data):
        k = data.draw(st.integers(0, 2 * m - 1))
        q = gauss_gegenbauer(d, m)
        assert q(lambda t: t**k) == pytest.approx(exact_moment(d, k), abs=1e-13)

    @given(dims, st.integers(1, 10))
    def test_not_exact_at_degree_2m(self, d, m):
        q = gauss_gegenbauer(d, m)
        assert abs(q(lambda t: gegenbauer_eval(d, m, t) ** 2)) < 1e-13  # nodes are the zeros
        assert reference_quadrature(d)(lambda t: gegenbauer_eval(d, m, t) ** 2) > 1e-10

    @given(dims, st.integers(1, 12))
    def test_weights_positive_and_sum_to_one(self, d, m):
        w = gauss_gegenbauer(d, m).weights
        assert np.all(w > 0)
        assert w.sum() == pytest.approx(1.0, abs=1e-13)

    @given(dims, st.integers(1, 12))
    def test_weights_agree_with_golub_welsch(self, d, m):
        a = d / 2 - 1
        _, w = roots_jacobi(m, a, a)
        np.testing.assert_allclose(gauss_gegenbauer(d, m).weights, w / w.sum(), atol=1e-12)

    def test_small_cases(self):
        np.testing.assert_allclose(gauss_gegenbauer(3, 3).weights, [0.25, 0.5, 0.25], atol=1e-15)
        np.testing.assert_allclose(gauss_gegenbauer(1, 2).weights, [0.5, 0.5], atol=1e-15)


class TestFundamentalPolys:
    @given(st.lists(st.floats(-1, 1), min_size=1, max_size=7, unique=True))
    def test_kronecker_property(self, nodes):
        t = np.sort(np.array(nodes))
        if t.size > 1 and np.min(np.diff(t)) < 1e-3:
            return
        basis = fundamental_polys(t)
        vals = np.array([[phi(x) for x in t] for phi in basis])
        np.testing.assert_allclose(vals, np.eye(t.size), atol=1e-8)
        assert all(phi.degree <= t.size - 1 for phi in basis)

    def test_rejects_duplicates(self):
        with pytest.raises(ValueError):
            fundamental_polys([0.1, 0.1 + 1e-12])
        with pytest.raises(ValueError):
            fundamental_polys([])


class TestJacobiZeros:
    @given(st.integers(1, 15), st.floats(-0.9, 6), st.floats(-0.9, 6))
    def test_match_scipy(self, n, a, b):
        ref, _ = roots_jacobi(n, a, b)
        np.testing.assert_allclose(jacobi_zeros(n, a, b), np.sort(ref), atol=1e-12)

    def test_known(self):
        np.testing.assert_allclose(jacobi_zeros(1, 1, 0.5), [-1 / 7], atol=1e-15)
        np.testing.assert_allclose(jacobi_zeros(2, 0.5, -0.5),
                                   [math.cos(4 * math.pi / 5), math.cos(2 * math.pi / 5)], atol=1e-15)

    def test_rejects_bad_parameters(self):
        with pytest.raises(ValueError):
            jacobi_zeros(2, -1.0, 0.0)
        with pytest.raises(ValueError):
            jacobi_zeros(0, 0.0, 0.0)
