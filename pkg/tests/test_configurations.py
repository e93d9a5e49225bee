from __future__ import annotations

import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sphereminima.configurations import (
    Configuration,
    build,
    build_dual,
    catalog,
    catalog_list,
    e6_roots,
    export,
    kissing56,
    load,
    schlafli,
)

ALL = [
    ("regular_ngon", {"N": 3}), ("regular_ngon", {"N": 6}), ("regular_ngon_dual", {"N": 6}),
    ("simplex", {"d": 2}), ("simplex", {"d": 6}), ("cross_polytope", {"d": 3}), ("cross_polytope", {"d": 5}),
    ("cube", {"d": 3}), ("cube", {"d": 5}), ("sym_simplex", {"d": 4}), ("sym_simplex", {"d": 5}),
    ("sym_simplex_dual", {"d": 3}), ("sym_simplex_dual", {"d": 7}), ("cell24", {}), ("cell24_dual", {}),
    ("schlafli", {}), ("sym_schlafli", {}), ("e6_roots", {}), ("kissing56", {}), ("e7_minvectors", {}),
]
ANTIPODAL = ["cross_polytope", "cube", "cell24", "cell24_dual", "sym_simplex", "sym_simplex_dual",
             "sym_schlafli", "e6_roots", "e7_minvectors", "kissing56"]


def off_diagonal_values(c: Configuration, decimals: int = 10) -> set:
    g = c.gram()
    return set(np.round(g[~np.eye(c.N, dtype=bool)], decimals).tolist())


@pytest.mark.parametrize("name,params", ALL)
def test_unit_norm_and_distinct(name, params):
    c = build(name, **params)
    assert np.max(np.abs(np.linalg.norm(c.points, axis=1) - 1)) <= 1e-12
    d = np.linalg.norm(c.points[:, None] - c.points[None], axis=2)
    np.fill_diagonal(d, np.inf)
    assert d.min() > 1e-9


@pytest.mark.parametrize("name,params", [(n, p) for n, p in ALL if n in ANTIPODAL])
def test_antipodal_entries(name, params):
    assert build(name, **params).is_antipodal()


@pytest.mark.parametrize("name,params", [("simplex", {"d": 4}), ("schlafli", {}), ("regular_ngon", {"N": 5})])
def test_non_antipodal_entries(name, params):
    assert not build(name, **params).is_antipodal()


@pytest.mark.parametrize("name,expected", [
    (("regular_ngon", {"N": 8}), 8), (("simplex", {"d": 5}), 6), (("cross_polytope", {"d": 5}), 10),
    (("cube", {"d": 5}), 32), (("sym_simplex", {"d": 5}), 12), (("sym_simplex_dual", {"d": 5}), 20),
    (("sym_simplex_dual", {"d": 7}), 70), (("cell24", {}), 24), (("cell24_dual", {}), 24),
    (("schlafli", {}), 27), (("sym_schlafli", {}), 54), (("e6_roots", {}), 72), (("kissing56", {}), 56),
    (("e7_minvectors", {}), 126),
])
def test_cardinalities(name, expected):
    assert build(name[0], **name[1]).N == expected


def test_hyperplane_families():
    for name in ("kissing56", "e7_minvectors"):
        c = build(name)
        assert c.ambient_dim == 8 and c.sphere_dim == 6
        assert np.max(np.abs(c.points.sum(axis=1))) <= 1e-12


@given(st.integers(2, 9))
def test_simplex_dot_products(d):
    assert off_diagonal_values(build("simplex", d=d)) == {round(-1 / d, 10)}


@given(st.integers(3, 8))
def test_cross_polytope_dot_products(d):
    assert off_diagonal_values(build("cross_polytope", d=d)) == {0.0, -1.0}


def test_kissing_dot_products():
    assert off_diagonal_values(build("kissing56")) == {round(1 / 3, 10), round(-1 / 3, 10), -1.0}


def test_parity_filters():
    s = schlafli()
    tail = s[s[:, 5] == 0.25]
    assert len(tail) == 16 and np.all(np.sum(tail[:, :5] < 0, axis=1) % 2 == 0)
    e = e6_roots()
    half = e[np.abs(e[:, 5]) > 0]
    assert len(half) == 32 and np.all(np.sum(half < 0, axis=1) % 2 == 1)
    k = kissing56()
    assert np.sum(np.isclose(k, -3 / (2 * math.sqrt(6))).sum(axis=1) == 2) == 28


def test_sym_simplex_dual_dot_products():
    # index sets I, J of size 3 sharing k elements give (2k - 3) / 3
    c = build("sym_simplex_dual", d=5)
    assert off_diagonal_values(c) == {-1.0, round(-1 / 3, 10), round(1 / 3, 10)}


def test_ngon_dual_is_rotation():
    a, b = build("regular_ngon", N=6), build("regular_ngon_dual", N=6)
    rot = np.array([[math.cos(math.pi / 6), -math.sin(math.pi / 6)], [math.sin(math.pi / 6), math.cos(math.pi / 6)]])
    np.testing.assert_allclose(a.points @ rot.T, b.points, atol=1e-15)


def test_cell24_centroid_zero():
    doc = json.loads(export(build("cell24"), "json"))
    assert np.allclose(np.sum(doc["points"], axis=0), 0, atol=1e-14)
    assert doc["N"] == 24 and doc["sphere_dim"] == 3 and doc["ambient_dim"] == 4
    assert doc["meta"] == {"strength": 5, "stiffness": 3, "sharpness": None,
                           "dual": {"name": "cell24_dual", "m": 3, "params": {}}}


def test_cross_polytope_csv():
    rows = export(build("cross_polytope", d=3), "csv").decode().strip().splitlines()
    assert len(rows) == 6
    vals = {float(x) for r in rows for x in r.split(",")}
    assert vals <= {1.0, -1.0, 0.0}


@pytest.mark.parametrize("name,params", ALL)
def test_round_trip(name, params):
    c = build(name, **params)
    j = load(export(c, "json"))
    np.testing.assert_allclose(j.points, c.points, atol=1e-15, rtol=0)
    assert (j.name, j.sphere_dim, j.meta.strength, j.meta.dual) == (c.name, c.sphere_dim, c.meta.strength, c.meta.dual)
    v = load(export(c, "csv"), "csv", sphere_dim=c.sphere_dim)
    np.testing.assert_array_equal(v.points, j.points)


def test_validation():
    with pytest.raises(ValueError, match="unit"):
        Configuration([[1.0, 0.1]], 1)
    with pytest.raises(ValueError, match="distinct"):
        Configuration([[1.0, 0.0], [1.0, 0.0]], 1)
    with pytest.raises(ValueError):
        Configuration([[1.0, 0.0]], 2)
    with pytest.raises(ValueError):
        export(build("cube", d=3), "xml")


def test_points_immutable():
    c = build("cube", d=3)
    with pytest.raises(ValueError):
        c.points[0, 0] = 2.0


def test_build_errors():
    with pytest.raises(KeyError):
        build("nosuch")
    with pytest.raises(ValueError, match="odd"):
        build("sym_simplex_dual", d=4)
    with pytest.raises(ValueError, match="metadata"):
        build("mclaughlin")
    with pytest.raises(ValueError, match="requires"):
        build("cube")
    with pytest.raises(ValueError):
        build("cell24", d=3)
    with pytest.raises(ValueError):
        build("cube", d=2)


def test_catalog_census():
    rows = catalog_list()
    assert sum(r["buildable"] for r in rows) == 14
    assert {r["name"] for r in rows if not r["buildable"]} == {"icosahedron", "dodecahedron", "e8_roots",
                                                               "mclaughlin", "leech"}
    assert len(catalog()) == len(rows)


def test_metadata_is_parametric():
    assert build("regular_ngon", N=6).meta.stiffness == 3
    assert build("regular_ngon", N=7).meta.sharpness == "strongly 3-sharp"
    assert build("sym_simplex", d=4).meta.stiffness is None
    assert build("sym_simplex", d=5).meta.dual.name == "sym_simplex_dual"
    assert build_dual(build("cube", d=4)).label == "cross_polytope(d=4)"
    with pytest.raises(ValueError):
        build_dual(build("schlafli"))
