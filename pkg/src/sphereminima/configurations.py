"""Named point configurations on spheres and their catalog metadata.

Coordinates are built from their closed forms, never by optimization. Two
families live in a hyperplane of R^8 (``kissing56``, ``e7_minvectors``); they
keep their ambient coordinates and record ``sphere_dim = 6``.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

__all__ = [
    "Configuration",
    "CatalogMeta",
    "CatalogEntry",
    "DualSpec",
    "build",
    "build_dual",
    "catalog",
    "catalog_list",
    "export",
    "load",
    "regular_ngon",
    "regular_ngon_dual",
    "simplex",
    "cross_polytope",
    "cube",
    "cell24",
    "cell24_dual",
    "sym_simplex",
    "sym_simplex_dual",
    "schlafli",
    "sym_schlafli",
    "e6_roots",
    "kissing56",
    "e7_minvectors",
]

NORM_TOL = 1e-12
DISTINCT_TOL = 1e-9


@dataclass(frozen=True)
class DualSpec:
    name: str
    m: int
    params: dict = field(default_factory=dict)


@dataclass(frozen=True)
class CatalogMeta:
    """Claimed properties, as tabulated for the configuration (not computed)."""

    strength: Optional[int] = None
    stiffness: Optional[int] = None
    dual: Optional[DualSpec] = None
    sharpness: Optional[str] = None  # "m-sharp", "strongly m-sharp" or None
    minima: Optional[str] = None  # "dual" or "antipodes"

    @property
    def sharp_m(self) -> Optional[int]:
        return int(self.sharpness.split("-")[0].split()[-1]) if self.sharpness else None

    @property
    def strongly_sharp(self) -> bool:
        return bool(self.sharpness and self.sharpness.startswith("strongly"))

    def to_dict(self) -> dict:
        return {
            "strength": self.strength,
            "stiffness": self.stiffness,
            "dual": None if self.dual is None else {"name": self.dual.name, "m": self.dual.m,
                                                    "params": self.dual.params},
            "sharpness": self.sharpness,
        }


class Configuration:
    """N unit vectors in R^(ambient_dim) lying on a d-dimensional sphere."""

    def __init__(self, points, sphere_dim: int, name: str = "custom", meta: CatalogMeta | None = None,
                 params: dict | None = None, validate: bool = True):
        pts = np.array(points, dtype=float)
        if pts.ndim != 2 or pts.shape[0] == 0:
            raise ValueError("points must be a non-empty N x D array")
        pts.setflags(write=False)
        self.points = pts
        self.sphere_dim = int(sphere_dim)
        self.name = name
        self.meta = meta or CatalogMeta()
        self.params = dict(params or {})
        if self.sphere_dim > pts.shape[1] - 1 or self.sphere_dim < 1:
            raise ValueError("sphere_dim must satisfy 1 <= d <= ambient_dim - 1")
        if validate:
            self._validate()

    def _validate(self) -> None:
        err = np.max(np.abs(np.linalg.norm(self.points, axis=1) - 1.0))
        if err > NORM_TOL:
            raise ValueError(f"{self.label}: points are not unit vectors (max deviation {err:.2e})")
        if len(self) > 1:
            gram = self.points @ self.points.T
            np.fill_diagonal(gram, -np.inf)
            # |x - y|^2 = 2 - 2 x.y
            if 2.0 - 2.0 * gram.max() <= DISTINCT_TOL**2:
                raise ValueError(f"{self.label}: points are not pairwise distinct")

    def __len__(self) -> int:
        return self.points.shape[0]

    @property
    def N(self) -> int:
        return len(self)

    @property
    def ambient_dim(self) -> int:
        return self.points.shape[1]

    @property
    def label(self) -> str:
        if not self.params:
            return self.name
        return self.name + "(" + ",".join(f"{k}={v}" for k, v in self.params.items()) + ")"

    def gram(self) -> np.ndarray:
        return np.clip(self.points @ self.points.T, -1.0, 1.0)

    def negated(self) -> Configuration:
        return Configuration(-self.points, self.sphere_dim, name="-" + self.name, params=self.params)

    def is_antipodal(self, tol: float = 1e-9) -> bool:
        """Closed under x -> -x."""
        return _hausdorff(self.points, -self.points) <= tol

    def __repr__(self) -> str:
        return f"Configuration({self.label}, N={self.N}, S^{self.sphere_dim} in R^{self.ambient_dim})"


def _hausdorff(a: np.ndarray, b: np.ndarray) -> float:
    d2 = np.sum(a**2, 1)[:, None] + np.sum(b**2, 1)[None, :] - 2 * a @ b.T
    # the expanded form only locates nearest neighbours; it loses digits near 0
    ab = np.linalg.norm(a - b[np.argmin(d2, axis=1)], axis=1).max()
    ba = np.linalg.norm(b - a[np.argmin(d2, axis=0)], axis=1).max()
    return float(max(ab, ba))


# ---------------------------------------------------------------- constructors


def regular_ngon(N: int) -> np.ndarray:
    k = np.arange(N)
    return np.column_stack([np.cos(2 * np.pi * k / N), np.sin(2 * np.pi * k / N)])


def regular_ngon_dual(N: int) -> np.ndarray:
    """Midpoints of the arcs between neighbouring vertices of ``regular_ngon(N)``."""
    k = np.arange(N) + 0.5
    return np.column_stack([np.cos(2 * np.pi * k / N), np.sin(2 * np.pi * k / N)])


def _helmert(n: int) -> np.ndarray:
    """Orthonormal basis (rows) of the hyperplane sum(x) = 0 in R^n."""
    rows = []
    for k in range(1, n):
        r = np.zeros(n)
        r[:k] = 1.0
        r[k] = -k
        rows.append(r / math.sqrt(k * (k + 1)))
    return np.array(rows)


def simplex(d: int) -> np.ndarray:
    """d + 1 vertices of a regular simplex on S^(d-1); pairwise dot products -1/d."""
    centred = np.eye(d + 1) - 1.0 / (d + 1)
    pts = math.sqrt((d + 1) / d) * centred @ _helmert(d + 1).T
    return pts / np.linalg.norm(pts, axis=1, keepdims=True)


def cross_polytope(d: int) -> np.ndarray:
    return np.vstack([np.eye(d), -np.eye(d)])


def cube(d: int) -> np.ndarray:
    return np.array(list(itertools.product((1.0, -1.0), repeat=d))) / math.sqrt(d)


def cell24() -> np.ndarray:
    pts = []
    for i, j in itertools.combinations(range(4), 2):
        for si, sj in itertools.product((1.0, -1.0), repeat=2):
            p = np.zeros(4)
            p[i], p[j] = si, sj
            pts.append(p / math.sqrt(2))
    return np.array(pts)


def cell24_dual() -> np.ndarray:
    return np.vstack([cross_polytope(4), 0.5 * np.array(list(itertools.product((1.0, -1.0), repeat=4)))])


def sym_simplex(d: int) -> np.ndarray:
    s = simplex(d)
    return np.vstack([s, -s])


def sym_simplex_dual(d: int) -> np.ndarray:
    """Scaled sums of (d+1)/2 simplex vertices, C(d+1, (d+1)/2) points; needs odd d >= 3."""
    if d < 3 or d % 2 == 0:
        raise ValueError(
            f"sym_simplex_dual requires odd d >= 3, got d={d}: for even d the symmetrized "
            "simplex is not stiff and has no dual"
        )
    s = simplex(d)
    scale = 2.0 * math.sqrt(d) / (d + 1)
    return np.array([scale * s[list(I)].sum(axis=0) for I in itertools.combinations(range(d + 1), (d + 1) // 2)])


def schlafli() -> np.ndarray:
    pts = [np.array([0, 0, 0, 0, 0, 1.0])]
    for i in range(5):
        for sign in (1.0, -1.0):
            p = np.zeros(6)
            p[i], p[5] = sign * math.sqrt(3) / 2, -0.5
            pts.append(p)
    for signs in itertools.product((1.0, -1.0), repeat=5):
        if signs.count(-1.0) % 2 == 0:
            pts.append(np.array([*(s * math.sqrt(3) / 4 for s in signs), 0.25]))
    return np.array(pts)


def sym_schlafli() -> np.ndarray:
    s = schlafli()
    return np.vstack([s, -s])


def e6_roots() -> np.ndarray:
    pts = []
    for i, j in itertools.combinations(range(5), 2):
        for si, sj in itertools.product((1.0, -1.0), repeat=2):
            p = np.zeros(6)
            p[i], p[j] = si / math.sqrt(2), sj / math.sqrt(2)
            pts.append(p)
    r = 1.0 / (2 * math.sqrt(2))
    for signs in itertools.product((1.0, -1.0), repeat=6):
        if signs.count(-1.0) % 2 == 1:
            pts.append(np.array([*(s * r for s in signs[:5]), signs[5] * math.sqrt(3) * r]))
    return np.array(pts)


def kissing56() -> np.ndarray:
    a, b = 3.0 / (2 * math.sqrt(6)), 1.0 / (2 * math.sqrt(6))
    pts = []
    for sign in (1.0, -1.0):
        for i, j in itertools.combinations(range(8), 2):
            p = np.full(8, sign * b)
            p[i] = p[j] = -sign * a
            pts.append(p)
    return np.array(pts)


def e7_minvectors() -> np.ndarray:
    pts = []
    for i, j in itertools.permutations(range(8), 2):
        p = np.zeros(8)
        p[i], p[j] = 1 / math.sqrt(2), -1 / math.sqrt(2)
        pts.append(p)
    r = 1.0 / (2 * math.sqrt(2))
    for I in itertools.combinations(range(8), 4):
        p = np.full(8, -r)
        p[list(I)] = r
        pts.append(p)
    return np.array(pts)


# --------------------------------------------------------------------- catalog


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    description: str
    sphere: str
    cardinality: str
    builder: Optional[Callable[..., np.ndarray]]
    sphere_dim: Callable[..., int]
    meta: Callable[..., CatalogMeta]
    params: tuple[str, ...] = ()
    defaults: dict = field(default_factory=dict)

    @property
    def buildable(self) -> bool:
        return self.builder is not None

    def resolve(self, **params) -> dict:
        unknown = set(params) - set(self.params)
        if unknown:
            raise ValueError(f"{self.name} takes parameters {self.params or '()'}, got {sorted(unknown)}")
        out = dict(self.defaults)
        out.update({k: int(v) for k, v in params.items() if v is not None})
        missing = [p for p in self.params if p not in out]
        if missing:
            raise ValueError(f"{self.name} requires parameter(s) {missing}")
        return out


def _ngon_meta(N: int) -> CatalogMeta:
    m = N // 2
    if N % 2:
        return CatalogMeta(N - 1, None, None, f"strongly {m}-sharp", "antipodes")
    return CatalogMeta(N - 1, m, DualSpec("regular_ngon_dual", m, {"N": N}), f"{m}-sharp", "dual")


def _ngon_dual_meta(N: int) -> CatalogMeta:
    m = N // 2
    if N % 2:
        return CatalogMeta(N - 1, None, None, f"strongly {m}-sharp", "antipodes")
    return CatalogMeta(N - 1, m, DualSpec("regular_ngon", m, {"N": N}), f"{m}-sharp", "dual")


def _need(cond: bool, msg: str) -> None:
    if not cond:
        raise ValueError(msg)


def _check_ngon(N):
    _need(N >= 3, "regular_ngon requires N >= 3")


def _check_d(lo: int):
    def check(d):
        _need(d >= lo, f"requires d >= {lo}")
    return check


def _sym_simplex_meta(d: int) -> CatalogMeta:
    if d % 2:
        return CatalogMeta(3, 2, DualSpec("sym_simplex_dual", 2, {"d": d}), None, "dual")
    return CatalogMeta(3, None, None, None, None)


def _sym_simplex_dual_meta(d: int) -> CatalogMeta:
    # for d = 3 the dual is the octahedron, which is 2-sharp
    return CatalogMeta(3, 2, DualSpec("sym_simplex", 2, {"d": d}), "2-sharp" if d == 3 else None, "dual")


_FIXED = {
    "cell24": (cell24, 3, CatalogMeta(5, 3, DualSpec("cell24_dual", 3), None, "dual"), "24-cell", "S^3", "24"),
    "cell24_dual": (cell24_dual, 3, CatalogMeta(5, 3, DualSpec("cell24", 3), None, "dual"),
                    "24-cell formed by +-e_i and (+-1/2)^4", "S^3", "24"),
    "schlafli": (schlafli, 5, CatalogMeta(4, None, None, "strongly 2-sharp", "antipodes"),
                 "Schlafli configuration", "S^5", "27"),
    "sym_schlafli": (sym_schlafli, 5, CatalogMeta(5, 3, DualSpec("e6_roots", 3), None, "dual"),
                     "symmetrized Schlafli configuration", "S^5", "54"),
    "e6_roots": (e6_roots, 5, CatalogMeta(5, 3, DualSpec("sym_schlafli", 3), None, "dual"),
                 "normalized roots of the E6 lattice", "S^5", "72"),
    "kissing56": (kissing56, 6, CatalogMeta(5, 3, DualSpec("e7_minvectors", 3), "3-sharp", "dual"),
                  "kissing configuration in the hyperplane sum(x) = 0 of R^8", "S^6", "56"),
    "e7_minvectors": (e7_minvectors, 6, CatalogMeta(5, 3, DualSpec("kissing56", 3), None, "dual"),
                      "minimal vectors of the E7 lattice (E8 roots with zero coordinate sum)", "S^6", "126"),
}

_METADATA_ONLY = {
    "icosahedron": (2, CatalogMeta(5, None, None, "3-sharp"), "S^2", "12"),
    "dodecahedron": (2, CatalogMeta(5, None, None, None), "S^2", "20"),
    "e8_roots": (7, CatalogMeta(7, None, None, "4-sharp"), "S^7", "240"),
    "mclaughlin": (21, CatalogMeta(4, None, None, "strongly 2-sharp", "antipodes"), "S^21", "275"),
    "leech": (23, CatalogMeta(11, None, None, "6-sharp"), "S^23", "196560"),
}


def _make_catalog() -> dict[str, CatalogEntry]:
    cat: dict[str, CatalogEntry] = {}

    def checked(builder, check):
        def run(**p):
            check(*p.values())
            return builder(**p)
        return run

    cat["regular_ngon"] = CatalogEntry(
        "regular_ngon", "regular N-gon", "S^1", "N", checked(regular_ngon, _check_ngon),
        lambda N: 1, _ngon_meta, ("N",))
    cat["regular_ngon_dual"] = CatalogEntry(
        "regular_ngon_dual", "regular N-gon rotated by pi/N", "S^1", "N", checked(regular_ngon_dual, _check_ngon),
        lambda N: 1, _ngon_dual_meta, ("N",))
    cat["simplex"] = CatalogEntry(
        "simplex", "regular d-simplex", "S^(d-1)", "d+1", checked(simplex, _check_d(2)),
        lambda d: d - 1, lambda d: CatalogMeta(2, None, None, "strongly 1-sharp", "antipodes"), ("d",))
    cat["cross_polytope"] = CatalogEntry(
        "cross_polytope", "regular cross-polytope", "S^(d-1)", "2d", checked(cross_polytope, _check_d(3)),
        lambda d: d - 1, lambda d: CatalogMeta(3, 2, DualSpec("cube", 2, {"d": d}), "2-sharp", "dual"), ("d",))
    cat["cube"] = CatalogEntry(
        "cube", "cube", "S^(d-1)", "2^d", checked(cube, _check_d(3)),
        lambda d: d - 1, lambda d: CatalogMeta(3, 2, DualSpec("cross_polytope", 2, {"d": d}), None, "dual"), ("d",))
    cat["sym_simplex"] = CatalogEntry(
        "sym_simplex", "symmetrized regular d-simplex", "S^(d-1)", "2d+2", checked(sym_simplex, _check_d(3)),
        lambda d: d - 1, _sym_simplex_meta, ("d",))
    cat["sym_simplex_dual"] = CatalogEntry(
        "sym_simplex_dual", "dual of the symmetrized d-simplex (odd d)", "S^(d-1)", "C(d+1,(d+1)/2)",
        sym_simplex_dual, lambda d: d - 1, _sym_simplex_dual_meta, ("d",))
    for name, (builder, sd, meta, desc, sphere, card) in _FIXED.items():
        cat[name] = CatalogEntry(name, desc, sphere, card, builder, lambda sd=sd: sd, lambda meta=meta: meta)
    for name, (sd, meta, sphere, card) in _METADATA_ONLY.items():
        cat[name] = CatalogEntry(name, name + " (metadata only; no construction)", sphere, card, None,
                                 lambda sd=sd: sd, lambda meta=meta: meta)
    return cat


_CATALOG = _make_catalog()


def catalog() -> dict[str, CatalogEntry]:
    return dict(_CATALOG)


def catalog_list() -> list[dict]:
    """One record per catalog entry with its tabulated metadata (parametric entries symbolically)."""
    sample = {"regular_ngon": {"N": 4}, "regular_ngon_dual": {"N": 4}}
    out = []
    for name, e in _CATALOG.items():
        rec = {"name": name, "description": e.description, "sphere": e.sphere, "N": e.cardinality,
               "params": list(e.params), "buildable": e.buildable}
        if not e.params:
            rec.update(e.meta().to_dict())
        else:
            p = sample.get(name, {"d": 5})
            rec.update(e.meta(**p).to_dict())
            rec["metadata_for"] = p
        out.append(rec)
    return out


def build(name: str, **params) -> Configuration:
    """Construct a catalog configuration, e.g. ``build("cube", d=4)``."""
    if name not in _CATALOG:
        raise KeyError(f"unknown configuration {name!r}; known: {', '.join(_CATALOG)}")
    entry = _CATALOG[name]
    if not entry.buildable:
        raise ValueError(f"{name} is listed for its metadata only and cannot be built")
    p = entry.resolve(**params)
    try:
        pts = entry.builder(**p)
    except ValueError as exc:
        raise ValueError(f"{name}: {exc}") from None
    return Configuration(pts, entry.sphere_dim(**p), name=name, meta=entry.meta(**p), params=p)


def build_dual(config: Configuration) -> Configuration:
    """The catalog dual of a stiff catalog configuration."""
    dual = config.meta.dual
    if dual is None:
        raise ValueError(f"{config.label} has no catalog dual")
    return build(dual.name, **dual.params)


# ----------------------------------------------------------------- import/export


def export(config: Configuration, fmt: str = "json") -> bytes:
    """Serialize coordinates with 17 significant digits (JSON carries metadata too)."""
    if fmt == "json":
        doc = {
            "name": config.name,
            "params": config.params,
            "sphere_dim": config.sphere_dim,
            "ambient_dim": config.ambient_dim,
            "N": config.N,
            "meta": config.meta.to_dict(),
            "points": [[float(f"{x:.17g}") for x in p] for p in config.points],
        }
        return (json.dumps(doc, indent=1) + "\n").encode()
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        for p in config.points:
            w.writerow([f"{x:.17g}" for x in p])
        return buf.getvalue().encode()
    raise ValueError(f"unknown export format {fmt!r}")


def load(data: bytes | str, fmt: str = "json", sphere_dim: int | None = None, name: str = "custom") -> Configuration:
    """Inverse of :func:`export`. CSV carries no metadata, so ``sphere_dim`` defaults to ambient - 1."""
    text = data.decode() if isinstance(data, bytes) else data
    if fmt == "json":
        doc = json.loads(text)
        meta = doc.get("meta") or {}
        dual = meta.get("dual")
        cm = CatalogMeta(meta.get("strength"), meta.get("stiffness"),
                         DualSpec(dual["name"], dual["m"], dual.get("params", {})) if dual else None,
                         meta.get("sharpness"))
        return Configuration(doc["points"], doc["sphere_dim"], name=doc.get("name", name), meta=cm,
                             params=doc.get("params"))
    if fmt == "csv":
        rows = [[float(x) for x in r] for r in csv.reader(io.StringIO(text)) if r]
        pts = np.array(rows)
        return Configuration(pts, sphere_dim if sphere_dim is not None else pts.shape[1] - 1, name=name)
    raise ValueError(f"unknown import format {fmt!r}")
