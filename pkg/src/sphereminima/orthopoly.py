"""Gegenbauer and Jacobi polynomials, their zeros, and Gauss-Gegenbauer quadrature.

Gegenbauer polynomials ``P_n^(d)`` are those attached to the sphere ``S^d``:
orthogonal on [-1, 1] against ``w_d(t) = gamma_d (1 - t^2)^(d/2 - 1)`` and
normalized by ``P_n^(d)(1) = 1``. The constant ``gamma_d`` is never written
down; every integral is taken with quadrature weights that sum to one.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.linalg import eigh_tridiagonal

__all__ = [
    "Polynomial",
    "Quadrature",
    "GegenbauerBasis",
    "gegenbauer_eval",
    "gegenbauer_zeros",
    "gegenbauer_a0",
    "fundamental_polys",
    "gauss_gegenbauer",
    "jacobi_zeros",
    "reference_quadrature",
    "REFERENCE_NODES",
]

REFERENCE_NODES = 200
_DOMAIN_SLACK = 1e-12
_DUPLICATE_TOL = 1e-9


class Polynomial:
    """Dense real polynomial in the monomial basis, coefficients ascending."""

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs: Iterable[float] = ()):
        c = np.array(coeffs if isinstance(coeffs, np.ndarray) else list(coeffs), dtype=float).ravel()
        nz = np.flatnonzero(c)
        c = c[: nz[-1] + 1] if nz.size else np.zeros(0)
        c.setflags(write=False)
        self._coeffs = c

    @property
    def coeffs(self) -> np.ndarray:
        return self._coeffs

    @property
    def degree(self) -> int:
        """Index of the last nonzero coefficient; -1 for the zero polynomial."""
        return len(self._coeffs) - 1

    def is_zero(self) -> bool:
        return self._coeffs.size == 0

    def __call__(self, t):
        if self.is_zero():
            return np.zeros_like(np.asarray(t, dtype=float)) if np.ndim(t) else 0.0
        return npoly.polyval(t, self._coeffs)

    def deriv(self, order: int = 1) -> Polynomial:
        if self.degree < order:
            return Polynomial()
        return Polynomial(npoly.polyder(self._coeffs, order))

    def __add__(self, other) -> Polynomial:
        other = _as_poly(other)
        return Polynomial(npoly.polyadd(_padded(self), _padded(other)))

    __radd__ = __add__

    def __neg__(self) -> Polynomial:
        return Polynomial(-self._coeffs)

    def __sub__(self, other) -> Polynomial:
        return self + (-_as_poly(other))

    def __rsub__(self, other) -> Polynomial:
        return _as_poly(other) - self

    def __mul__(self, other) -> Polynomial:
        other = _as_poly(other)
        if self.is_zero() or other.is_zero():
            return Polynomial()
        return Polynomial(npoly.polymul(self._coeffs, other._coeffs))

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"Polynomial({self._coeffs.tolist()})"

    @classmethod
    def from_roots(cls, roots: Sequence[float]) -> Polynomial:
        return cls(npoly.polyfromroots(roots)) if len(roots) else cls([1.0])


def _as_poly(x) -> Polynomial:
    return x if isinstance(x, Polynomial) else Polynomial([float(x)])


def _padded(p: Polynomial) -> np.ndarray:
    return p.coeffs if p.coeffs.size else np.zeros(1)


@dataclass(frozen=True)
class Quadrature:
    """Nodes and positive weights integrating against ``w_d`` exactly up to ``exactness_degree``."""

    nodes: np.ndarray
    weights: np.ndarray
    exactness_degree: int

    def integrate(self, values: np.ndarray) -> float:
        return float(np.dot(self.weights, values))

    def __call__(self, func) -> float:
        return self.integrate(func(self.nodes))


def _check_d(d: int) -> None:
    if int(d) != d or d < 1:
        raise ValueError(f"sphere dimension must be an integer >= 1, got {d!r}")


def _jacobi_recurrence(n: int, alpha: float, beta: float) -> tuple[np.ndarray, np.ndarray]:
    """Diagonal ``a_0..a_{n-1}`` and off-diagonal ``b_1..b_{n-1}`` of the monic Jacobi recurrence.

    ``p_{k+1}(t) = (t - a_k) p_k(t) - b_k p_{k-1}(t)``; see Gautschi, *Orthogonal
    Polynomials*, Table 1.1. The k = 0 and k = 1 terms are written separately
    because the general expressions are 0/0 when ``alpha + beta`` is 0 or -1.
    """
    ab = alpha + beta
    a = np.empty(n)
    b = np.empty(max(n - 1, 0))
    a[0] = (beta - alpha) / (ab + 2.0)
    for k in range(1, n):
        s = 2.0 * k + ab
        a[k] = (beta**2 - alpha**2) / (s * (s + 2.0))
    if n > 1:
        b[0] = 4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab) ** 2 * (3.0 + ab))
    for k in range(2, n):
        s = 2.0 * k + ab
        b[k - 1] = 4.0 * k * (k + alpha) * (k + beta) * (k + ab) / (s**2 * (s + 1.0) * (s - 1.0))
    return a, b


def _monic_eval(t: np.ndarray, a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Value and derivative of the degree-len(a) monic orthogonal polynomial at ``t``."""
    p_prev, p = np.zeros_like(t), np.ones_like(t)
    dp_prev, dp = np.zeros_like(t), np.zeros_like(t)
    for k in range(len(a)):
        bk = b[k - 1] if k > 0 else 0.0
        p_next = (t - a[k]) * p - bk * p_prev
        dp_next = p + (t - a[k]) * dp - bk * dp_prev
        p_prev, p = p, p_next
        dp_prev, dp = dp, dp_next
    return p, dp


def _golub_welsch(n: int, alpha: float, beta: float) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Jacobi nodes (Newton-polished eigenvalues) and weights normalized to sum 1."""
    a, b = _jacobi_recurrence(n, alpha, beta)
    if n == 1:
        return a.copy(), np.ones(1)
    nodes, vecs = eigh_tridiagonal(a, np.sqrt(b))
    weights = vecs[0] ** 2
    p, dp = _monic_eval(nodes, a, b)
    nodes = nodes - p / dp
    order = np.argsort(nodes)
    nodes, weights = nodes[order], weights[order]
    return nodes, weights / weights.sum()


def _gegenbauer_exponent(d: int) -> float:
    return d / 2.0 - 1.0


def gegenbauer_eval(d: int, n: int, t):
    """``P_n^(d)(t)`` with ``P_n^(d)(1) = 1``, via the normalized three-term recurrence

    ``(k + d - 1) P_{k+1} = (2k + d - 1) t P_k - k P_{k-1}``.
    """
    _check_d(d)
    if n < 0:
        raise ValueError("degree must be non-negative")
    t_arr = np.asarray(t, dtype=float)
    if np.any(np.abs(t_arr) > 1.0 + _DOMAIN_SLACK):
        raise ValueError("Gegenbauer polynomials are evaluated on [-1, 1] only")
    p_prev, p = np.ones_like(t_arr), t_arr.copy()
    if n == 0:
        p = p_prev
    for k in range(1, n):
        p_prev, p = p, ((2 * k + d - 1) * t_arr * p - k * p_prev) / (k + d - 1)
    return float(p) if p.ndim == 0 else p


@lru_cache(maxsize=None)
def _gegenbauer_zeros_cached(d: int, n: int) -> tuple[float, ...]:
    e = _gegenbauer_exponent(d)
    nodes, _ = _golub_welsch(n, e, e)
    nodes = 0.5 * (nodes - nodes[::-1])  # enforce exact symmetry
    return tuple(nodes.tolist())


def gegenbauer_zeros(d: int, n: int) -> np.ndarray:
    """The n zeros of ``P_n^(d)``, ascending and symmetric about 0."""
    _check_d(d)
    if n < 1:
        raise ValueError("degree must be >= 1")
    return np.array(_gegenbauer_zeros_cached(int(d), int(n)))


@lru_cache(maxsize=None)
def _gauss_rule(d: int, m: int) -> tuple[np.ndarray, np.ndarray]:
    e = _gegenbauer_exponent(d)
    nodes, weights = _golub_welsch(m, e, e)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def reference_quadrature(d: int, m: int = REFERENCE_NODES) -> Quadrature:
    """High-order Golub-Welsch rule used as the internal oracle for non-polynomial integrands."""
    _check_d(d)
    nodes, weights = _gauss_rule(int(d), int(m))
    return Quadrature(nodes, weights, 2 * m - 1)


def gegenbauer_a0(d: int, p: Polynomial) -> float:
    """``a_0(p)``, the integral of ``p`` against ``w_d``; exact for polynomials."""
    _check_d(d)
    p = _as_poly(p)
    if p.is_zero():
        return 0.0
    m = p.degree // 2 + 1
    nodes, weights = _gauss_rule(int(d), m)
    return float(np.dot(weights, p(nodes)))


def fundamental_polys(nodes: Sequence[float]) -> list[Polynomial]:
    """Lagrange basis ``phi_k`` of degree ``len(nodes) - 1`` with ``phi_k(t_i) = delta_ik``."""
    t = np.asarray(nodes, dtype=float)
    if t.ndim != 1 or t.size == 0:
        raise ValueError("need at least one node")
    gaps = np.abs(t[:, None] - t[None, :])
    np.fill_diagonal(gaps, np.inf)
    if np.any(gaps <= _DUPLICATE_TOL):
        raise ValueError("nodes must be pairwise distinct")
    basis = []
    for k in range(t.size):
        others = np.delete(t, k)
        num = Polynomial.from_roots(others)
        basis.append(num * (1.0 / float(np.prod(t[k] - others))))
    return basis


def gauss_gegenbauer(d: int, m: int) -> Quadrature:
    """Gauss-Gegenbauer rule with m nodes; weights are ``a_0`` of the fundamental polynomials."""
    _check_d(d)
    if m < 1:
        raise ValueError("node count must be >= 1")
    nodes = gegenbauer_zeros(d, m)
    weights = np.array([gegenbauer_a0(d, phi) for phi in fundamental_polys(nodes)])
    return Quadrature(nodes, weights, 2 * m - 1)


def jacobi_zeros(n: int, alpha: float, beta: float) -> np.ndarray:
    """Zeros of the degree-n Jacobi polynomial for the weight ``(1 - t)^alpha (1 + t)^beta``."""
    if n < 1:
        raise ValueError("degree must be >= 1")
    if alpha <= -1 or beta <= -1:
        raise ValueError("alpha and beta must exceed -1")
    nodes, _ = _golub_welsch(int(n), float(alpha), float(beta))
    return nodes


@dataclass(frozen=True)
class GegenbauerBasis:
    """Gegenbauer family for one sphere dimension, with the recurrence exposed for reuse."""

    d: int

    def __post_init__(self):
        _check_d(self.d)

    def __call__(self, n: int, t):
        return gegenbauer_eval(self.d, n, t)

    def polynomial(self, n: int) -> Polynomial:
        p_prev, p = Polynomial([1.0]), Polynomial([0.0, 1.0])
        if n == 0:
            return p_prev
        x = Polynomial([0.0, 1.0])
        for k in range(1, n):
            p_prev, p = p, ((2 * k + self.d - 1) * x * p - k * p_prev) * (1.0 / (k + self.d - 1))
        return p

    def zeros(self, n: int) -> np.ndarray:
        return gegenbauer_zeros(self.d, n)

    def a0(self, p: Polynomial) -> float:
        return gegenbauer_a0(self.d, p)
