"""Design strength, dot-product profiles, stiffness and sharpness, dual-pair verification."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .configurations import Configuration
from .orthopoly import gauss_gegenbauer, gegenbauer_eval, gegenbauer_zeros, jacobi_zeros

__all__ = [
    "Check",
    "Report",
    "DotProductProfile",
    "StrengthReport",
    "SharpnessClass",
    "AmbiguousClusteringError",
    "moment",
    "design_strength",
    "dot_profile",
    "predicted_nodes_and_frequencies",
    "predicted_sharp_nodes",
    "check_m_stiff",
    "classify_sharpness",
    "verify_dual_pair",
    "stiff_sharp_disjointness_check",
    "sampled_emptiness_check",
    "CLUSTER_TOL",
    "STRENGTH_TOL",
]

CLUSTER_TOL = 1e-7
STRENGTH_TOL = 1e-9
FREQ_TOL = 1e-6
UNIT_TOL = 1e-9


class AmbiguousClusteringError(ValueError):
    """Two dot products are too close to call equal or distinct."""


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""
    numeric_margin: Optional[float] = None

    def to_dict(self) -> dict:
        m = self.numeric_margin
        return {"name": self.name, "pass": bool(self.passed), "detail": self.detail,
                "numeric_margin": None if m is None or not np.isfinite(m) else float(m)}


@dataclass
class Report:
    """A named list of checks; passes when every check does."""

    config: str
    checks: list[Check] = field(default_factory=list)
    seed: Optional[int] = None

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, passed: bool, detail: str = "", margin: float | None = None) -> Check:
        c = Check(name, bool(passed), detail, margin)
        self.checks.append(c)
        return c

    def extend(self, other: Report) -> None:
        self.checks.extend(other.checks)

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {"config": self.config, "checks": [c.to_dict() for c in self.checks], "seed": self.seed}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)


# ------------------------------------------------------------------- strength


def moment(config: Configuration, k: int) -> float:
    """``sum_{i,j} P_k^(d)(x_i . x_j)`` over all ordered pairs, diagonal included."""
    if k < 1:
        raise ValueError("moment degree must be >= 1")
    return float(np.sum(gegenbauer_eval(config.sphere_dim, k, config.gram())))


@dataclass(frozen=True)
class StrengthReport:
    normalized_moments: tuple[float, ...]  # |M_k| / N^2 for k = 1..k_max
    strength: int
    first_failing: Optional[int]
    tol: float

    def to_dict(self) -> dict:
        return {"normalized_moments": list(self.normalized_moments), "strength": self.strength,
                "first_failing": self.first_failing, "tol": self.tol}


def design_strength(config: Configuration, k_max: int = 12, tol: float = STRENGTH_TOL) -> StrengthReport:
    """Largest n <= k_max whose normalized moments 1..n all vanish to ``tol``."""
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    gram = config.gram()
    d, n2 = config.sphere_dim, float(config.N) ** 2
    # run the recurrence once over the Gram matrix instead of once per degree
    p_prev, p = np.ones_like(gram), gram.copy()
    vals = [abs(p.sum()) / n2]
    for k in range(1, k_max):
        p_prev, p = p, ((2 * k + d - 1) * gram * p - k * p_prev) / (k + d - 1)
        vals.append(abs(p.sum()) / n2)
    fail = next((k for k, v in enumerate(vals, 1) if v > tol), None)
    strength = k_max if fail is None else fail - 1
    return StrengthReport(tuple(float(v) for v in vals), strength, fail, tol)


# -------------------------------------------------------------------- profiles


@dataclass(frozen=True)
class DotProductProfile:
    z: np.ndarray
    values: np.ndarray
    frequencies: np.ndarray
    cluster_tol: float

    @property
    def N(self) -> int:
        return int(self.frequencies.sum())

    def __len__(self) -> int:
        return len(self.values)


def _cluster_sorted(v: np.ndarray, tol: float, strict: bool = True) -> tuple[np.ndarray, np.ndarray]:
    gaps = np.diff(v)
    if strict:
        bad = (gaps > tol) & (gaps <= 10 * tol)
        if np.any(bad):
            i = int(np.flatnonzero(bad)[0])
            raise AmbiguousClusteringError(
                f"dot products {v[i]:.12g} and {v[i + 1]:.12g} differ by {gaps[i]:.2e}, "
                f"within 10x the cluster tolerance {tol:g}")
    starts = np.concatenate([[0], np.flatnonzero(gaps > tol) + 1])
    counts = np.diff(np.concatenate([starts, [v.size]]))
    means = np.add.reduceat(v, starts) / counts
    return means, counts


def dot_profile(z, config: Configuration, cluster_tol: float = CLUSTER_TOL) -> DotProductProfile:
    """Distinct values of ``z . x_i`` over the configuration, with multiplicities."""
    z = np.asarray(z, dtype=float)
    if z.shape != (config.ambient_dim,):
        raise ValueError(f"probe point must have {config.ambient_dim} coordinates")
    if abs(np.linalg.norm(z) - 1.0) > UNIT_TOL:
        raise ValueError("probe point is not on the unit sphere")
    dots = np.sort(np.clip(config.points @ z, -1.0, 1.0))
    values, counts = _cluster_sorted(dots, cluster_tol)
    return DotProductProfile(z, values, counts, cluster_tol)


def predicted_nodes_and_frequencies(d: int, m: int, N: int) -> tuple[np.ndarray, np.ndarray]:
    """Dot products and multiplicities that every dual point of an m-stiff N-point set on S^d sees."""
    if m < 1:
        raise ValueError("m must be >= 1")
    q = gauss_gegenbauer(d, m)
    raw = q.weights * N
    freq = np.rint(raw)
    dev = float(np.max(np.abs(raw - freq)))
    if dev > FREQ_TOL:
        raise ValueError(
            f"(d={d}, m={m}, N={N}) gives non-integer frequencies {raw.tolist()}; "
            "no m-stiff configuration of this size exists")
    return q.nodes, freq.astype(int)


def predicted_sharp_nodes(d: int, m: int, antipodal: bool) -> np.ndarray:
    """Off-diagonal dot products of a sharp configuration on S^d, from the Jacobi characterization.

    Strongly m-sharp: zeros of the Jacobi polynomial with parameters (d/2, d/2 - 1).
    m-sharp antipodal: -1 together with the zeros of ``P_{m-1}^(d+2)``.
    """
    if antipodal:
        inner = gegenbauer_zeros(d + 2, m - 1) if m >= 2 else np.zeros(0)
        return np.concatenate([[-1.0], inner])
    return jacobi_zeros(m, d / 2.0, d / 2.0 - 1.0)


# ------------------------------------------------------------------ stiffness


def check_m_stiff(config: Configuration, m: int, witness, strength: int | None = None,
                  tol: float = 1e-9) -> tuple[bool, Report]:
    """Is ``config`` an m-stiff configuration with ``witness`` in its set of dual points?"""
    rep = Report(config.label)
    witness = np.asarray(witness, dtype=float)
    if witness.shape != (config.ambient_dim,) or abs(np.linalg.norm(witness) - 1.0) > UNIT_TOL:
        raise ValueError("witness is not a unit vector in the configuration's ambient space")
    if strength is None:
        strength = design_strength(config, 2 * m).strength
    rep.add("strength >= 2m-1", strength >= 2 * m - 1, f"strength {strength}, need {2 * m - 1}",
            float(strength - (2 * m - 1)))
    prof = dot_profile(witness, config)
    k = len(prof)
    rep.add("at most m dot products", k <= m, f"{k} distinct values, m = {m}", float(m - k))
    # a (2m-1)-design never admits fewer than m values, so "at most" forces "exactly"
    rep.add("exactly m dot products", k == m, f"{k} distinct values")
    if k == m:
        nodes, freq = predicted_nodes_and_frequencies(config.sphere_dim, m, config.N)
        err = float(np.max(np.abs(prof.values - nodes)))
        rep.add("values are Gegenbauer zeros", err <= tol, f"max deviation {err:.3e}", tol - err)
        rep.add("frequencies match prediction", bool(np.array_equal(prof.frequencies, freq)),
                f"observed {prof.frequencies.tolist()}, predicted {freq.tolist()}")
    ok = rep["strength >= 2m-1"].passed and rep["at most m dot products"].passed
    return ok, rep


@dataclass(frozen=True)
class SharpnessClass:
    m: int  # number of distinct off-diagonal dot products
    strength: int
    m_sharp: Optional[int]
    strongly_sharp: bool
    antipodal: bool
    values: tuple[float, ...]
    node_deviation: Optional[float]  # vs the Jacobi characterization, when sharp

    @property
    def label(self) -> Optional[str]:
        if self.m_sharp is None:
            return None
        return ("strongly " if self.strongly_sharp else "") + f"{self.m_sharp}-sharp"


def classify_sharpness(config: Configuration, cluster_tol: float = CLUSTER_TOL) -> SharpnessClass:
    g = config.gram()
    off = np.sort(g[~np.eye(config.N, dtype=bool)])
    values, _ = _cluster_sorted(off, cluster_tol)
    m = len(values)
    strength = design_strength(config, 2 * m + 1).strength
    antipodal = config.is_antipodal()
    sharp = strength >= 2 * m - 1
    strongly = strength >= 2 * m
    dev = None
    if sharp and (strongly or antipodal):
        pred = predicted_sharp_nodes(config.sphere_dim, m, antipodal and not strongly)
        dev = float(np.max(np.abs(np.sort(pred) - values)))
    return SharpnessClass(m, strength, m if sharp else None, strongly, antipodal,
                          tuple(values.tolist()), dev)


# --------------------------------------------------------------------- duals


def verify_dual_pair(primal: Configuration, dual: Configuration, m: int, tol: float = 1e-9) -> Report:
    """Every dual point sees exactly the m Gegenbauer zeros with the predicted integer frequencies."""
    if primal.sphere_dim != dual.sphere_dim or primal.ambient_dim != dual.ambient_dim:
        raise ValueError("primal and dual live on different spheres")
    rep = Report(f"{primal.label} -> {dual.label}")
    strength = design_strength(primal, 2 * m).strength
    rep.add("primal strength >= 2m-1", strength >= 2 * m - 1, f"strength {strength}, m = {m}",
            float(strength - (2 * m - 1)))
    try:
        nodes, freq = predicted_nodes_and_frequencies(primal.sphere_dim, m, primal.N)
    except ValueError as exc:
        rep.add("integer frequencies", False, str(exc))
        return rep
    rep.add("integer frequencies", True, f"predicted {freq.tolist()}")
    dots = np.clip(dual.points @ primal.points.T, -1.0, 1.0)
    bad_values, bad_freq, worst = [], [], 0.0
    for i, row in enumerate(dots):
        try:
            vals, cnt = _cluster_sorted(np.sort(row), CLUSTER_TOL)
        except AmbiguousClusteringError:
            bad_values.append(i)
            worst = np.inf
            continue
        if len(vals) != m:
            bad_values.append(i)
            worst = np.inf
            continue
        err = float(np.max(np.abs(vals - nodes)))
        worst = max(worst, err)
        if err > tol:
            bad_values.append(i)
        if not np.array_equal(cnt, freq):
            bad_freq.append(i)
    rep.add("dual profiles are Gegenbauer zeros", not bad_values,
            f"max deviation {worst:.3e}" + (f"; failing dual indices {bad_values[:10]}" if bad_values else ""),
            tol - worst)
    rep.add("dual frequencies match prediction", not bad_freq,
            f"{len(bad_freq)} failing" + (f": indices {bad_freq[:10]}" if bad_freq else ""))
    gap = float(1.0 - np.max(np.abs(dots)))
    rep.add("no dual point forms dot product +-1 with primal", gap > 1e-6,
            f"min distance of |x.y| from 1 is {gap:.3e}", gap)
    return rep


def stiff_sharp_disjointness_check(config: Configuration) -> bool:
    """No configuration may be both strongly sharp and stiff; True when that holds for ``config``."""
    cls = classify_sharpness(config)
    if not cls.strongly_sharp:
        return True
    dual = config.meta.dual
    if dual is None:
        return True
    from .configurations import build

    witness = build(dual.name, **dual.params).points[0]
    ok, _ = check_m_stiff(config, dual.m, witness, strength=cls.strength)
    return not ok


def sampled_emptiness_check(config: Configuration, m: int, samples: int = 100_000, seed: int = 0,
                            cluster_tol: float = CLUSTER_TOL, batch: int = 20_000) -> Report:
    """Sampled evidence (not a proof) that no point of the sphere sees at most m dot products.

    Close dot products are merged rather than rejected, which can only lower the
    count, so a pass is conservative.
    """
    rng = np.random.default_rng(seed)
    rep = Report(config.label, seed=seed)
    D = config.ambient_dim
    basis = _sphere_basis(config)
    fewest, exceptions, done = np.inf, 0, 0
    while done < samples:
        b = min(batch, samples - done)
        z = rng.standard_normal((b, basis.shape[0])) @ basis
        z /= np.linalg.norm(z, axis=1, keepdims=True)
        dots = np.sort(z @ config.points.T, axis=1)
        counts = 1 + np.sum(np.diff(dots, axis=1) > cluster_tol, axis=1)
        fewest = min(fewest, int(counts.min()))
        exceptions += int(np.sum(counts <= m))
        done += b
    assert z.shape[1] == D
    rep.add("sampled evidence: every sample sees more than m dot products", exceptions == 0,
            f"{samples} uniform samples (seed {seed}); fewest distinct values {fewest}; "
            f"{exceptions} samples with <= {m}", float(fewest - m - 1))
    return rep


def _sphere_basis(config: Configuration) -> np.ndarray:
    """Orthonormal rows spanning the linear hull of the configuration (its sphere's ambient space)."""
    if config.sphere_dim == config.ambient_dim - 1:
        return np.eye(config.ambient_dim)
    _, s, vt = np.linalg.svd(config.points, full_matrices=False)
    return vt[: config.sphere_dim + 1]
