"""Multi-start projected-gradient search for minima of a potential over the sphere.

This is the brute-force oracle against which certificates are compared. It
works in an orthonormal frame of the configuration's own sphere, so sets
living in a hyperplane (for example ``kissing56`` in R^8) are searched on the
right sphere.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .configurations import Configuration
from .designanalysis import _sphere_basis
from .potentials import PotentialFunction

__all__ = [
    "SearchOptions",
    "Minimum",
    "SearchResult",
    "WitnessMatch",
    "potential_eval",
    "potential_and_gradient",
    "tangential_gradient",
    "default_starts",
    "minimize",
    "compare_to_witness",
    "circle_grid_scan",
]

CHUNK = 256  # fixed work unit, so results never depend on the thread count
MERGE_RADIUS = 1e-5
UNIT_TOL = 1e-9


def potential_eval(config: Configuration, f: PotentialFunction, x) -> float:
    """``p_f(x) = sum_i f(2 - 2 x.x_i)``; ``inf`` at a configuration point for singular kernels."""
    x = np.asarray(x, dtype=float)
    if x.shape != (config.ambient_dim,):
        raise ValueError(f"point must have {config.ambient_dim} coordinates")
    if abs(np.linalg.norm(x) - 1.0) > UNIT_TOL:
        raise ValueError("point is not on the unit sphere")
    return float(np.sum(f(np.clip(2.0 - 2.0 * (config.points @ x), 0.0, 4.0))))


def potential_and_gradient(points: np.ndarray, f: PotentialFunction, X: np.ndarray):
    """Values and Euclidean gradients of the potential at the rows of X (unit vectors)."""
    u = np.clip(2.0 - 2.0 * (X @ points.T), 0.0, 4.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = np.sum(f(u), axis=1)
        fp = f.derivative(np.maximum(u, 1e-300), 1) if f.singular_at_zero or f.kind == "riesz" else f.derivative(u, 1)
    grad = -2.0 * (np.atleast_2d(fp) @ points)
    return np.atleast_1d(vals), grad


def tangential_gradient(X: np.ndarray, grad: np.ndarray) -> np.ndarray:
    """Projection of each gradient onto the tangent space at the corresponding row of X."""
    return grad - np.sum(grad * X, axis=1, keepdims=True) * X


def default_starts(sphere_dim: int, m: int) -> int:
    return max(1000, 200 * (sphere_dim + 1) * m)


@dataclass(frozen=True)
class SearchOptions:
    starts: int
    seed: int = 0
    max_iters: int = 3000
    gtol: float = 1e-10
    threads: int = 1


@dataclass(frozen=True)
class Minimum:
    point: np.ndarray
    value: float
    members: int
    radius: float
    grad_norm: float


@dataclass
class SearchResult:
    config: str
    kernel: str
    minima: list[Minimum]  # every local-minimum cluster, ascending by value
    global_value: float
    starts: int
    seed: int
    converged: int
    max_grad_norm: float  # over accepted minima
    unconverged: list[int] = field(default_factory=list)
    value_tol: float = 1e-9

    @property
    def global_minima(self) -> list[Minimum]:
        cut = self.global_value + self.value_tol * max(1.0, abs(self.global_value))
        return [mn for mn in self.minima if mn.value <= cut]

    def to_dict(self) -> dict:
        return {
            "config": self.config, "kernel": self.kernel, "global_value": self.global_value,
            "starts": self.starts, "seed": self.seed, "converged": self.converged,
            "unconverged": len(self.unconverged), "max_grad_norm": self.max_grad_norm,
            "global_minima": len(self.global_minima),
            "minima": [{"point": mn.point.tolist(), "value": mn.value, "members": mn.members,
                        "radius": mn.radius, "grad_norm": mn.grad_norm} for mn in self.minima],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    def centers_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        for mn in self.minima:
            w.writerow([f"{mn.value:.17g}", *(f"{x:.17g}" for x in mn.point)])
        return buf.getvalue()


def _sample_starts(rng: np.random.Generator, n: int, dim: int, pts: np.ndarray, singular: bool) -> np.ndarray:
    X = rng.standard_normal((n, dim))
    X /= np.linalg.norm(X, axis=1, keepdims=True)
    if singular:
        while True:
            close = np.max(X @ pts.T, axis=1) > 1.0 - 0.5e-12  # |x - x_i| < 1e-6
            if not close.any():
                break
            Y = rng.standard_normal((int(close.sum()), dim))
            X[close] = Y / np.linalg.norm(Y, axis=1, keepdims=True)
    return X


def _descend(pts: np.ndarray, f: PotentialFunction, X: np.ndarray, max_iters: int, gtol: float):
    """Projected gradient with Barzilai-Borwein trial steps and Armijo backtracking, row-wise."""
    X = X.copy()
    n = X.shape[0]
    v, g = potential_and_gradient(pts, f, X)
    gt = tangential_gradient(X, g)
    alpha = np.full(n, 0.05)
    active = np.ones(n, dtype=bool)
    done = np.zeros(n, dtype=bool)
    prev_x, prev_g = None, None
    for _ in range(max_iters):
        gn = np.linalg.norm(gt, axis=1)
        newly = active & (gn <= gtol)
        done |= newly
        active &= ~newly
        if not active.any():
            break
        idx = np.flatnonzero(active)
        if prev_x is not None:
            s = X[idx] - prev_x[idx]
            y = gt[idx] - prev_g[idx]
            sy = np.sum(s * y, axis=1)
            ss = np.sum(s * s, axis=1)
            bb = np.where(sy > 0, ss / np.where(sy > 0, sy, 1.0), alpha[idx] * 2.0)
            alpha[idx] = np.clip(bb, 1e-10, 1.0)
        prev_x, prev_g = X.copy(), gt.copy()
        a = alpha[idx].copy()
        pending = np.ones(idx.size, dtype=bool)
        gn2 = gn[idx] ** 2
        noise = 4 * np.finfo(float).eps * (np.abs(v[idx]) + 1.0)
        for _ in range(60):
            sub = idx[pending]
            Y = X[sub] - a[pending, None] * gt[sub]
            Y /= np.linalg.norm(Y, axis=1, keepdims=True)
            vy, gy = potential_and_gradient(pts, f, Y)
            ok = np.isfinite(vy) & (vy <= v[sub] - 1e-4 * a[pending] * gn2[pending] + noise[pending])
            acc = sub[ok]
            X[acc], v[acc] = Y[ok], vy[ok]
            gt[acc] = tangential_gradient(Y[ok], gy[ok])
            alpha[acc] = a[pending][ok]
            p_idx = np.flatnonzero(pending)
            pending[p_idx[ok]] = False
            if not pending.any():
                break
            a[pending] *= 0.5
        # a start whose line search stalls cannot be improved at this precision
        stuck = idx[pending]
        done[stuck] = np.linalg.norm(gt[stuck], axis=1) <= 1e3 * gtol
        active[stuck] = False
    gn = np.linalg.norm(gt, axis=1)
    done |= gn <= gtol
    return X, v, gn, done


def _cluster(points: np.ndarray, values: np.ndarray, radius: float):
    """Greedy merge in order of value, then lexicographic position."""
    order = np.lexsort((*points.T[::-1], values))
    centers, members = [], []
    for i in order:
        for c, mem in zip(centers, members):
            if np.linalg.norm(points[i] - points[mem[0]]) <= radius:
                mem.append(i)
                break
        else:
            centers.append(i)
            members.append([i])
    return members


def minimize(config: Configuration, f: PotentialFunction, starts: int | None = None, seed: int = 0,
             max_iters: int = 3000, gtol: float = 1e-10, threads: int = 1, m: int | None = None) -> SearchResult:
    """Multi-start local descent from uniform random starts; deterministic for a given seed."""
    if f(4.0) != f(4.0) or math.isinf(f(4.0)):
        raise ValueError("kernel must be finite on (0, 4]")
    B = _sphere_basis(config)
    pts = config.points @ B.T
    dim = pts.shape[1]
    if m is None:
        m = config.meta.stiffness or config.meta.sharp_m or 1
    n = default_starts(config.sphere_dim, m) if starts is None else int(starts)
    if n < 1:
        raise ValueError("need at least one start")
    rng = np.random.default_rng(seed)
    X0 = _sample_starts(rng, n, dim, pts, f.singular_at_zero)
    chunks = [X0[i:i + CHUNK] for i in range(0, n, CHUNK)]
    work = lambda c: _descend(pts, f, c, max_iters, gtol)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            out = list(ex.map(work, chunks))
    else:
        out = [work(c) for c in chunks]
    X = np.vstack([o[0] for o in out])
    v = np.concatenate([o[1] for o in out])
    gn = np.concatenate([o[2] for o in out])
    ok = np.concatenate([o[3] for o in out])
    good = np.flatnonzero(ok)
    minima = []
    if good.size:
        for mem in _cluster(X[good], v[good], MERGE_RADIUS):
            rows = good[mem]
            best = rows[np.argmin(v[rows])]
            c = X[best]
            rad = float(np.max(np.linalg.norm(X[rows] - c, axis=1)))
            minima.append(Minimum(c @ B, float(v[best]), len(rows), rad, float(gn[best])))
    minima.sort(key=lambda mn: mn.value)
    gv = minima[0].value if minima else float("nan")
    return SearchResult(config.label, f.spec, minima, gv, n, seed, int(good.size),
                        float(max((mn.grad_norm for mn in minima), default=float("nan"))),
                        np.flatnonzero(~ok).tolist())


@dataclass
class WitnessMatch:
    hausdorff: float
    unmatched_clusters: list[int]
    unmatched_witnesses: list[int]
    coverage: bool

    @property
    def passed(self) -> bool:
        return not self.unmatched_clusters and (not self.coverage or not self.unmatched_witnesses)

    def to_dict(self) -> dict:
        return {"hausdorff": self.hausdorff, "unmatched_clusters": self.unmatched_clusters,
                "unmatched_witnesses": self.unmatched_witnesses, "pass": self.passed}


def compare_to_witness(result: SearchResult, witness, tol: float = 1e-6, coverage: bool = True) -> WitnessMatch:
    """Match the global-minimum clusters against a witness point set in both directions."""
    W = np.atleast_2d(np.asarray(witness, dtype=float))
    C = np.array([mn.point for mn in result.global_minima]).reshape(-1, W.shape[1])
    if C.size == 0:
        return WitnessMatch(math.inf, [], list(range(len(W))), coverage)
    D = np.linalg.norm(C[:, None, :] - W[None, :, :], axis=2)
    cd, wd = D.min(axis=1), D.min(axis=0)
    h = float(max(cd.max(), wd.max() if coverage else 0.0))
    return WitnessMatch(h, np.flatnonzero(cd > tol).tolist(),
                        np.flatnonzero(wd > tol).tolist() if coverage else [], coverage)


def circle_grid_scan(config: Configuration, f: PotentialFunction, n: int = 1_000_000,
                     batch: int = 50_000) -> tuple[float, np.ndarray]:
    """Minimum of the potential over n equally spaced points of S^1.

    Also returns the angles of the discrete local minima whose value is within
    1e-9 (relative) of it, one per basin even when the potential is very flat.
    """
    if config.sphere_dim != 1 or config.ambient_dim != 2:
        raise ValueError("grid scan is for configurations on the circle in R^2")
    theta = 2 * np.pi * np.arange(n) / n
    vals = np.empty(n)
    for i in range(0, n, batch):
        th = theta[i:i + batch]
        X = np.column_stack([np.cos(th), np.sin(th)])
        u = np.clip(2.0 - 2.0 * X @ config.points.T, 0.0, 4.0)
        with np.errstate(divide="ignore"):
            vals[i:i + batch] = np.sum(f(u), axis=1)
    lo = float(vals.min())
    local = (vals <= np.roll(vals, 1)) & (vals < np.roll(vals, -1))
    return lo, theta[local & (vals <= lo + 1e-9 * max(1.0, abs(lo)))]
