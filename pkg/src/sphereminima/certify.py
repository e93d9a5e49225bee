"""Hermite-interpolation lower-bound certificates for the minimum of a potential over the sphere.

The certificate polynomial ``q`` interpolates ``g(t) = f(2 - 2t)`` (values at
every node, first derivatives at all but possibly the node -1) and lies below
``g`` on [-1, 1] whenever ``g^(L)`` is convex. Averaging ``q`` against a design
then bounds the potential from below by ``N a_0(q)``, and equality at the
witness points proves they are absolute minima.

Convexity of ``g^(L)`` translates to ``f`` through ``g^(L)(t) = (-2)^L f^(L)(2 - 2t)``:
for even L it is convexity of ``f^(L)``, for odd L concavity of ``f^(L)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .configurations import Configuration, build_dual
from .designanalysis import check_m_stiff, classify_sharpness, design_strength, dot_profile
from .orthopoly import Polynomial, gegenbauer_a0, gegenbauer_zeros
from .potentials import GTransform, PotentialFunction

__all__ = [
    "HermiteSpec",
    "ResidualEvidence",
    "Certificate",
    "CertificationError",
    "hermite_interpolant",
    "residual_check",
    "certify_min_stiff",
    "certify_min_strongly_sharp",
    "extreme_value_formulas",
    "uniqueness_check",
    "potential_at",
    "GRID_SIZE",
    "RESIDUAL_TOL",
]

GRID_SIZE = 10_000
RESIDUAL_TOL = 1e-9
SUSPECT = 1e-6
VALUE_TOL = 1e-10
PROFILE_TOL = 1e-9


class CertificationError(ValueError):
    """The inputs do not satisfy the hypotheses of the certificate."""


@dataclass(frozen=True)
class HermiteSpec:
    """Interpolation nodes; ``nu = 1`` means the first node is -1 and carries no derivative condition."""

    nu: int
    nodes: tuple[float, ...]

    def __post_init__(self):
        t = np.asarray(self.nodes, dtype=float)
        if self.nu not in (0, 1):
            raise ValueError("nu must be 0 or 1")
        if t.size < 1 + self.nu:
            raise ValueError("need at least 1 + nu nodes")
        if np.any(np.diff(t) <= 0):
            raise ValueError("nodes must be strictly increasing")
        if t[0] < -1.0 or t[-1] >= 1.0:
            raise ValueError("nodes must lie in [-1, 1)")
        if (t[0] == -1.0) != (self.nu == 1):
            raise ValueError("the first node is -1 exactly when nu = 1")
        object.__setattr__(self, "nodes", tuple(float(x) for x in t))

    @property
    def n(self) -> int:
        return len(self.nodes)

    @property
    def L(self) -> int:
        """Order of the derivative of g that must be convex."""
        return 2 * self.n - 2 - self.nu

    @property
    def max_degree(self) -> int:
        return self.L + 1


def hermite_interpolant(g: GTransform, spec: HermiteSpec) -> Polynomial:
    """Confluent divided differences on the doubled nodes, expanded into the monomial basis."""
    nodes = np.array(spec.nodes)
    if np.any(~np.isfinite(g(nodes))):
        raise CertificationError("g is singular at an interpolation node")
    z = []
    for i, t in enumerate(nodes):
        z.extend([t] if (spec.nu == 1 and i == 0) else [t, t])
    z = np.array(z)
    k = z.size
    table = np.array(g(z), dtype=float)
    dg = np.array(g.derivative(nodes[spec.nu:], 1), dtype=float) if nodes.size > spec.nu else np.zeros(0)
    deriv_at = dict(zip(nodes[spec.nu:].tolist(), dg.tolist()))
    coef = [table[0]]
    for order in range(1, k):
        new = np.empty(k - order)
        for i in range(k - order):
            dz = z[i + order] - z[i]
            new[i] = deriv_at[z[i]] if dz == 0.0 else (table[i + 1] - table[i]) / dz
        table = new
        coef.append(table[0])
    q = Polynomial([coef[-1]])
    for c, t in zip(coef[-2::-1], z[-2::-1]):
        q = q * Polynomial([-t, 1.0]) + c
    return q


@dataclass(frozen=True)
class ResidualEvidence:
    grid_size: int
    min_residual: float
    argmin: float
    refinements: tuple[tuple[float, float, float], ...]  # (centre, width, min) per refined window
    skipped_one: bool

    @property
    def violation(self) -> bool:
        return self.min_residual < -RESIDUAL_TOL

    def to_dict(self) -> dict:
        return {"grid_size": self.grid_size, "min_residual": self.min_residual, "argmin": self.argmin,
                "refinements": [list(r) for r in self.refinements], "skipped_one": self.skipped_one}


def _residual(g: GTransform, q: Polynomial, t: np.ndarray) -> np.ndarray:
    return np.asarray(g(t), dtype=float) - q(t)


def residual_check(g: GTransform, q: Polynomial, grid_size: int = GRID_SIZE) -> ResidualEvidence:
    """Minimum of ``g - q`` on a Chebyshev grid of [-1, 1], zoomed in wherever it dips below 1e-6."""
    if grid_size < 1000:
        raise ValueError("grid_size must be >= 1000")
    t = np.cos(np.pi * np.arange(grid_size)[::-1] / (grid_size - 1))
    t[0], t[-1] = -1.0, 1.0
    skip = g.infinite_at_one
    if skip:
        t = t[:-1]  # g(1) = +inf, so the inequality holds strictly there
    r = _residual(g, q, t)
    best_i = int(np.argmin(r))
    best_t, best_r = float(t[best_i]), float(r[best_i])
    trace = []
    suspect = np.flatnonzero(r < SUSPECT)
    if suspect.size:
        runs = np.split(suspect, np.flatnonzero(np.diff(suspect) > 1) + 1)
        for run in runs:
            lo = t[max(run[0] - 1, 0)]
            hi = t[min(run[-1] + 1, t.size - 1)]
            rt, rr = _zoom(g, q, lo, hi)
            trace.append(((lo + hi) / 2, hi - lo, rr))
            if rr < best_r:
                best_t, best_r = rt, rr
    return ResidualEvidence(grid_size, best_r, best_t, tuple(trace), skip)


def _zoom(g: GTransform, q: Polynomial, lo: float, hi: float, width: float = 1e-12,
          samples: int = 65) -> tuple[float, float]:
    top = 1.0 - 1e-15 if g.infinite_at_one else 1.0
    lo, hi = max(lo, -1.0), min(hi, top)
    best_t, best_r = lo, np.inf
    while True:
        x = np.linspace(lo, hi, samples)
        r = _residual(g, q, x)
        i = int(np.argmin(r))
        if r[i] < best_r:
            best_t, best_r = float(x[i]), float(r[i])
        if hi - lo <= width:
            return best_t, best_r
        step = (hi - lo) / (samples - 1)
        lo, hi = max(x[i] - step, lo), min(x[i] + step, hi)


@dataclass
class Certificate:
    config: str
    kernel: str
    N: int
    sphere_dim: int
    spec: HermiteSpec
    q: Polynomial
    evidence: ResidualEvidence
    certified_value: float
    witness_points: np.ndarray
    status: str  # certified | residual_violation | degree_violation
    strength: int
    m: int
    kind: str  # stiff | strongly_sharp
    e_formula_value: float
    direct_potential_at_witness: float
    hypothesis: str
    convexity_advisory: Optional[dict] = None
    uniqueness: Optional[dict] = None
    notes: list[str] = field(default_factory=list)

    @property
    def certified(self) -> bool:
        return self.status == "certified"

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "kernel": self.kernel,
            "nu": self.spec.nu,
            "nodes": list(self.spec.nodes),
            "q_coeffs": self.q.coeffs.tolist(),
            "min_residual": self.evidence.min_residual,
            "residual_argmin": self.evidence.argmin,
            "certified_value": self.certified_value,
            "witness_count": int(len(self.witness_points)),
            "status": self.status,
            "cross_checks": {"e_formula_value": self.e_formula_value,
                             "direct_potential_at_witness": self.direct_potential_at_witness},
            "kind": self.kind,
            "m": self.m,
            "strength": self.strength,
            "hypothesis": self.hypothesis,
            "residual_evidence": self.evidence.to_dict(),
            "convexity_advisory": self.convexity_advisory,
            "uniqueness": self.uniqueness,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)


def potential_at(config: Configuration, f: PotentialFunction, x) -> float:
    """``sum_i f(|x - x_i|^2)`` with the squared distance taken as ``2 - 2 x.x_i``."""
    x = np.asarray(x, dtype=float)
    return float(np.sum(f(np.clip(2.0 - 2.0 * (config.points @ x), 0.0, 4.0))))


def _hypothesis(L: int) -> str:
    side = "convex" if L % 2 == 0 else "concave"
    return f"g^({L}) convex on (-1,1), i.e. f^({L}) {side} on (0,4)"


def _advisory(f: PotentialFunction, L: int) -> dict:
    """Grid probe of the convexity hypothesis; informational, never part of the verdict."""
    grid = np.linspace(0.05, 3.95, 400)
    # g^(L) is convex exactly when (-1)^L f^(L) is, the substitution being affine
    v = (-1.0) ** L * np.asarray(f.derivative(grid, L), dtype=float)
    h = np.diff(grid)
    second = 2.0 * ((v[2:] - v[1:-1]) / h[1:] - (v[1:-1] - v[:-2]) / h[:-1]) / (h[1:] + h[:-1])
    noise = 64 * np.finfo(float).eps * (np.max(np.abs(v)) + 1.0) / h.min() ** 2
    return {"order": L, "g_derivative_convex_on_grid": bool(second.min() >= -noise),
            "reliable": L <= 6}


def _finish(config, f, spec, q, strength, m, kind, witnesses, e_value, direct, grid_size, deg_cap):
    g = f.g
    ev = residual_check(g, q, grid_size)
    value = config.N * gegenbauer_a0(config.sphere_dim, q)
    notes = []
    if q.degree > deg_cap or deg_cap > strength:
        status = "degree_violation"
        notes.append(f"deg q = {q.degree}, allowed {deg_cap}, design strength {strength}")
    elif ev.violation:
        status = "residual_violation"
        notes.append(f"q exceeds g by {-ev.min_residual:.3e} near t = {ev.argmin:.12g}")
    else:
        status = "certified"
    if status == "certified":
        for label, other in (("closed-form", e_value), ("direct potential", direct)):
            if not abs(value - other) <= VALUE_TOL * max(1.0, abs(value)):
                raise CertificationError(
                    f"N a_0(q) = {value!r} disagrees with the {label} value {other!r}")
    return Certificate(config.label, f.spec, config.N, config.sphere_dim, spec, q, ev, float(value),
                       np.asarray(witnesses), status, strength, m, kind, float(e_value), float(direct),
                       _hypothesis(spec.L), _advisory(f, spec.L), None, notes)


def certify_min_stiff(config: Configuration, f: PotentialFunction, witness=None, dual_points=None,
                      grid_size: int = GRID_SIZE) -> Certificate:
    """Certify that the dual points of an m-stiff configuration minimize its f-potential.

    ``witness`` defaults to the first point of the catalog dual; ``dual_points``
    (all witnesses) to the whole catalog dual.
    """
    if dual_points is None:
        dual_points = build_dual(config).points if config.meta.dual else None
    if witness is None:
        if dual_points is None:
            raise CertificationError(f"{config.label}: no witness supplied and no catalog dual")
        witness = dual_points[0]
    witness = np.asarray(witness, dtype=float)
    prof = dot_profile(witness, config)
    m = len(prof)
    strength = design_strength(config, 2 * m + 1).strength
    ok, rep = check_m_stiff(config, m, witness, strength=strength)
    if not ok:
        raise CertificationError(f"{config.label} is not {m}-stiff at this witness: "
                                 + "; ".join(c.detail for c in rep.checks if not c.passed))
    err = float(np.max(np.abs(prof.values - gegenbauer_zeros(config.sphere_dim, m))))
    if err > PROFILE_TOL:
        raise CertificationError(f"witness profile misses the Gegenbauer zeros by {err:.3e}")
    spec = HermiteSpec(0, tuple(prof.values))
    q = hermite_interpolant(f.g, spec)
    e_value = extreme_value_formulas("stiff", f, prof.values, prof.frequencies)["min"]
    direct = potential_at(config, f, witness)
    if dual_points is None:
        dual_points = witness[None, :]
    return _finish(config, f, spec, q, strength, m, "stiff", dual_points, e_value, direct,
                   grid_size, 2 * m - 1)


def certify_min_strongly_sharp(config: Configuration, f: PotentialFunction,
                               grid_size: int = GRID_SIZE) -> Certificate:
    """Certify that the antipodes ``-config`` minimize the f-potential of a strongly sharp configuration."""
    g = config.gram()
    off = g[~np.eye(config.N, dtype=bool)]
    if off.min() <= -1.0 + 1e-9:
        raise CertificationError(f"{config.label} contains an antipodal pair")
    cls = classify_sharpness(config)
    if not cls.strongly_sharp:
        raise CertificationError(f"{config.label} is not strongly sharp "
                                 f"({cls.m} dot products, strength {cls.strength})")
    m = cls.m
    prof = dot_profile(config.points[0], config)
    taus, freqs = prof.values[:-1], prof.frequencies[:-1]  # drop the self dot product 1
    spec = HermiteSpec(1, tuple(np.sort(np.concatenate([[-1.0], -taus]))))
    q = hermite_interpolant(f.g, spec)
    e_value = extreme_value_formulas("strongly_sharp", f, taus, freqs)["min"]
    direct = potential_at(config, f, -config.points[0])
    return _finish(config, f, spec, q, cls.strength, m, "strongly_sharp", -config.points, e_value,
                   direct, grid_size, 2 * m)


def extreme_value_formulas(config_class: str, f: PotentialFunction, nodes: Sequence[float],
                           frequencies: Sequence[int]) -> dict:
    """Closed-form extreme values.

    ``stiff``: ``nodes`` are the dual-point dot products; min only.
    ``strongly_sharp``: ``nodes`` are the off-diagonal dot products; min and max.
    ``sharp_antipodal``: off-diagonal dot products including -1 (frequency 1); max only.
    A singular kernel gives ``max = inf``.
    """
    t = np.asarray(nodes, dtype=float)
    M = np.asarray(frequencies, dtype=float)
    if t.shape != M.shape:
        raise ValueError("nodes and frequencies differ in length")
    with np.errstate(divide="ignore"):
        if config_class == "stiff":
            return {"min": float(np.sum(M * f(2 - 2 * t))), "max": None}
        if config_class == "strongly_sharp":
            if np.any(t <= -1.0):
                raise ValueError("a strongly sharp configuration has no antipodal pair")
            return {"min": float(f(4.0) + np.sum(M * f(2 + 2 * t))),
                    "max": float(f(0.0) + np.sum(M * f(2 - 2 * t)))}
        if config_class == "sharp_antipodal":
            i = np.flatnonzero(np.isclose(t, -1.0, atol=1e-12))
            if i.size != 1 or M[i[0]] != 1:
                raise ValueError("sharp antipodal data must contain t = -1 with frequency 1")
            return {"min": None, "max": float(f(0.0) + np.sum(M * f(2 - 2 * t)))}
    raise ValueError(f"unknown configuration class {config_class!r}")


def uniqueness_check(cert: Certificate, config: Configuration, f: PotentialFunction,
                     strict_hypothesis: bool, starts: int | None = None, seed: int = 0,
                     tol: float = 1e-6, threads: int = 1) -> Certificate:
    """Attach a uniqueness verdict; search confirms it, it never replaces the asserted hypothesis."""
    if not cert.certified:
        raise CertificationError("uniqueness is only examined for certified certificates")
    if not strict_hypothesis:
        reason = "strict convexity not asserted; minimizers may extend beyond the witnesses"
        return replace(cert, uniqueness={"claimed": False, "reason": reason})
    from .search import compare_to_witness, minimize

    res = minimize(config, f, starts=starts, seed=seed, threads=threads, m=cert.m)
    cmp = compare_to_witness(res, cert.witness_points, tol)
    info = {"claimed": True, "seed": seed, "starts": res.starts, "global_value": res.global_value,
            "clusters": len(res.minima), "hausdorff": cmp.hausdorff,
            "unmatched_clusters": len(cmp.unmatched_clusters),
            "unmatched_witnesses": len(cmp.unmatched_witnesses)}
    status = cert.status
    notes = list(cert.notes)
    if cmp.unmatched_clusters:
        status = "uniqueness_violation"
        notes.append(f"search found {len(cmp.unmatched_clusters)} minimizers away from the witness set")
    else:
        info["verdict"] = "certified under asserted strictness"
    return replace(cert, uniqueness=info, status=status, notes=notes)

