"""Potential functions ``f`` on [0, 4] and their transforms ``g(t) = f(2 - 2t)``.

The argument of ``f`` is the squared chordal distance ``|x - y|^2 = 2 - 2 x.y``
between two points of a unit sphere, so ``g`` is the same kernel written in
terms of the dot product. Singular values (``f(0) = +inf``) are plain IEEE
infinities; callers that sum kernel values check for them explicitly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

__all__ = [
    "PotentialFunction",
    "GTransform",
    "ConvexityReport",
    "riesz",
    "logarithmic",
    "gaussian",
    "polynomial_kernel",
    "parse_kernel",
    "f_eval",
    "f_deriv",
    "convexity_probe",
    "KINDS",
]

KINDS = ("riesz", "log", "gauss", "poly")
_SLACK = 1e-12
_PROBE_RELIABLE_ORDER = 6


def _falling(x: float, k: int) -> float:
    """x (x - 1) ... (x - k + 1)."""
    out = 1.0
    for i in range(k):
        out *= x - i
    return out


@dataclass(frozen=True)
class PotentialFunction:
    """A kernel ``f`` of squared distance.

    ``riesz``: ``(t + C)^(-s/2)`` for ``s > 0`` and ``-(t + C)^(-s/2)`` for ``s < 0``.
    ``log``: ``(1/2) ln(1/t)``.  ``gauss``: ``exp(-a t)``.  ``poly``: ``sum c_k t^k``.
    """

    kind: str
    s: float = 0.0
    C: float = 0.0
    a: float = 0.0
    coeffs: tuple[float, ...] = field(default=())

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown kernel kind {self.kind!r}; expected one of {KINDS}")
        if self.kind == "riesz":
            if self.s == 0:
                raise ValueError("riesz exponent s must be nonzero")
            if self.C < 0:
                raise ValueError("riesz shift C must be >= 0")
        if self.kind == "gauss" and self.a <= 0:
            raise ValueError("gaussian rate a must be positive")
        if self.kind == "poly":
            object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs) or (0.0,))

    @property
    def singular_at_zero(self) -> bool:
        """True when ``f(0) = +inf``."""
        return self.kind == "log" or (self.kind == "riesz" and self.s > 0 and self.C == 0)

    @property
    def completely_monotone(self) -> bool:
        """Completely monotone on (0, 4), possibly after adding a constant."""
        if self.kind in ("log", "gauss"):
            return True
        if self.kind == "riesz":
            return self.s > -2
        return False

    @property
    def spec(self) -> str:
        """The kernel in command-line grammar."""
        if self.kind == "riesz":
            return f"riesz:s={self.s:g}" + (f",C={self.C:g}" if self.C else "")
        if self.kind == "gauss":
            return f"gauss:a={self.a:g}"
        if self.kind == "log":
            return "log"
        return "poly:" + ",".join(f"{c:g}" for c in self.coeffs)

    def _check(self, t: np.ndarray) -> np.ndarray:
        if np.any(t < -_SLACK) or np.any(t > 4.0 + _SLACK):
            raise ValueError("kernel argument must lie in [0, 4]")
        return np.clip(t, 0.0, 4.0)

    def __call__(self, t):
        """``f(t)``, vectorized; ``+inf`` at 0 for singular kernels."""
        t = self._check(np.asarray(t, dtype=float))
        with np.errstate(divide="ignore"):
            if self.kind == "riesz":
                sign = 1.0 if self.s > 0 else -1.0
                out = sign * np.power(t + self.C, -self.s / 2.0)
            elif self.kind == "log":
                out = -0.5 * np.log(t)
            elif self.kind == "gauss":
                out = np.exp(-self.a * t)
            else:
                out = np.polynomial.polynomial.polyval(t, np.array(self.coeffs))
        return float(out) if np.ndim(out) == 0 else out

    def derivative(self, t, order: int = 1):
        """Analytic ``f^(order)(t)``, vectorized; ``t = 0`` is allowed only for kernels smooth there."""
        if order < 0:
            raise ValueError("derivative order must be >= 0")
        if order == 0:
            return self(t)
        t = self._check(np.asarray(t, dtype=float))
        if np.any(t <= 0.0) and self._derivative_singular_at_zero:
            raise ValueError("derivative is singular at t = 0 for this kernel")
        if self.kind == "riesz":
            sign = 1.0 if self.s > 0 else -1.0
            e = -self.s / 2.0
            out = sign * _falling(e, order) * np.power(t + self.C, e - order)
        elif self.kind == "log":
            out = -0.5 * (-1.0) ** (order - 1) * math.factorial(order - 1) * np.power(t, -float(order))
        elif self.kind == "gauss":
            out = (-self.a) ** order * np.exp(-self.a * t)
        else:
            c = np.polynomial.polynomial.polyder(np.array(self.coeffs), order)
            out = np.polynomial.polynomial.polyval(t, c) if c.size else np.zeros_like(t)
        return float(out) if np.ndim(out) == 0 else out

    @property
    def _derivative_singular_at_zero(self) -> bool:
        return self.kind == "log" or (self.kind == "riesz" and self.C == 0)

    @property
    def g(self) -> GTransform:
        return GTransform(self)


@dataclass(frozen=True)
class GTransform:
    """``g(t) = f(2 - 2t)`` on [-1, 1], with ``g^(k)(t) = (-2)^k f^(k)(2 - 2t)``."""

    f: PotentialFunction

    @property
    def infinite_at_one(self) -> bool:
        return self.f.singular_at_zero

    def __call__(self, t):
        return self.f(2.0 - 2.0 * np.asarray(t, dtype=float))

    def derivative(self, t, order: int = 1):
        return (-2.0) ** order * self.f.derivative(2.0 - 2.0 * np.asarray(t, dtype=float), order)


def riesz(s: float, C: float = 0.0) -> PotentialFunction:
    return PotentialFunction("riesz", s=float(s), C=float(C))


def logarithmic() -> PotentialFunction:
    return PotentialFunction("log")


def gaussian(a: float) -> PotentialFunction:
    return PotentialFunction("gauss", a=float(a))


def polynomial_kernel(coeffs: Sequence[float]) -> PotentialFunction:
    return PotentialFunction("poly", coeffs=tuple(coeffs))


def parse_kernel(text: str) -> PotentialFunction:
    """Parse ``riesz:s=<real>[,C=<real>]``, ``log``, ``gauss:a=<real>`` or ``poly:<c0,c1,...>``."""
    text = text.strip()
    name, _, rest = text.partition(":")
    name = name.strip().lower()
    try:
        if name == "log":
            if rest.strip():
                raise ValueError("log takes no parameters")
            return logarithmic()
        if name == "poly":
            coeffs = [float(c) for c in rest.split(",") if c.strip()]
            if not coeffs:
                raise ValueError("poly needs at least one coefficient")
            return polynomial_kernel(coeffs)
        params = {}
        for item in filter(None, (p.strip() for p in rest.split(","))):
            key, eq, val = item.partition("=")
            if not eq:
                raise ValueError(f"expected key=value, got {item!r}")
            params[key.strip()] = float(val)
        if name == "riesz":
            if set(params) - {"s", "C"} or "s" not in params:
                raise ValueError("riesz takes s=<real> and optional C=<real>")
            return riesz(params["s"], params.get("C", 0.0))
        if name == "gauss":
            if set(params) != {"a"}:
                raise ValueError("gauss takes a=<real>")
            return gaussian(params["a"])
    except ValueError as exc:
        raise ValueError(f"bad kernel spec {text!r}: {exc}") from None
    raise ValueError(f"bad kernel spec {text!r}: unknown kernel {name!r}")


def f_eval(f: PotentialFunction, t: float) -> float:
    """Scalar kernel value; ``math.inf`` at 0 for singular kernels."""
    if not 0.0 <= t <= 4.0:
        raise ValueError("kernel argument must lie in [0, 4]")
    return float(f(t))


def f_deriv(f: PotentialFunction, t: float, order: int = 1) -> float:
    if not 0.0 < t < 4.0:
        raise ValueError("derivative is taken strictly inside (0, 4)")
    return float(f.derivative(t, order))


@dataclass(frozen=True)
class ConvexityReport:
    is_convex_on_grid: bool
    min_second_difference: float
    order: int
    reliable: bool


def convexity_probe(f: PotentialFunction, order: int, grid: Sequence[float]) -> ConvexityReport:
    """Check convexity of ``f^(order)`` on a grid by its second differences.

    Advisory only: certification never depends on the outcome. Orders above 6
    are computed but flagged as unreliable.
    """
    x = np.sort(np.asarray(grid, dtype=float))
    if x.size < 3:
        raise ValueError("need at least three grid points")
    if x[0] <= 0.0 or x[-1] >= 4.0:
        raise ValueError("grid must lie strictly inside (0, 4)")
    v = np.asarray(f.derivative(x, order), dtype=float)
    h0, h1 = np.diff(x)[:-1], np.diff(x)[1:]
    # divided second difference, so non-uniform grids are handled
    second = 2.0 * ((v[2:] - v[1:-1]) / h1 - (v[1:-1] - v[:-2]) / h0) / (h0 + h1)
    scale = np.max(np.abs(v)) + 1.0
    h = np.min(np.diff(x))
    noise = 64 * np.finfo(float).eps * scale / h**2
    lo = float(np.min(second))
    if abs(lo) <= noise:
        lo = 0.0
    return ConvexityReport(lo >= 0.0, lo, order, order <= _PROBE_RELIABLE_ORDER)
