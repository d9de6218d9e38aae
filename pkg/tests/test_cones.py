import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conequantile import (
    ConvexCone,
    DegenerateConeError,
    Halfspace,
    UnsupportedDimensionError,
    cone_contains,
    direction_base,
    dual_cone,
    leq_C,
)
from conequantile.cones import critical_directions, dual_arcs_2d


def same_rays(A, B, tol=1e-9):
    """Every row of A is a positive multiple of some row of B and vice versa."""
    def unit(M):
        M = np.atleast_2d(M)
        return M / np.linalg.norm(M, axis=1)[:, None] if len(M) else M
    A, B = unit(A), unit(B)
    if len(A) != len(B):
        return False
    return all(np.min(np.linalg.norm(B - a, axis=1)) < tol for a in A)


def test_orthant_is_self_dual():
    c = ConvexCone.orthant(2)
    assert same_rays(c.dual_generators, np.eye(2))


def test_dual_of_zero_is_whole_plane():
    d = dual_cone(ConvexCone.zero(2))
    assert d.is_whole_space
    assert same_rays(ConvexCone.zero(2).dual_generators, np.vstack([np.eye(2), -np.eye(2)]))


def test_dual_of_halfspace_is_ray():
    c = ConvexCone.halfspace([0.0, 1.0])
    assert same_rays(c.dual_generators, [[0.0, 1.0]])


def test_dual_of_ray_is_halfplane():
    c = ConvexCone(2, [[0.0, 1.0]])
    assert dual_arcs_2d(c) == ([(0.0, math.pi)], [])


def test_dimension_four_needs_supplied_duals():
    with pytest.raises(UnsupportedDimensionError):
        ConvexCone(4, np.eye(4))
    c = ConvexCone(4, np.eye(4), dual_generators=np.eye(4))
    assert c.contains(np.ones(4)) and not c.contains(-np.ones(4))


def test_supplied_duals_are_validated():
    with pytest.raises(ValueError):
        ConvexCone(2, np.eye(2), dual_generators=[[-1.0, 0.0]])


@pytest.mark.parametrize(
    "y,z,expected",
    [((0, 0), (1, 2), True), ((0, 0), (1, -1), False), ((1, 1), (1, 1), True)],
)
def test_orthant_order(y, z, expected):
    assert leq_C(ConvexCone.orthant(2), y, z) is expected


def test_zero_cone_order_is_equality():
    c = ConvexCone.zero(2)
    assert leq_C(c, (1, 2), (1, 2))
    assert not leq_C(c, (1, 2), (1, 2.1))


def test_orthant_antisymmetric_halfspace_not():
    o = ConvexCone.orthant(2)
    h = ConvexCone.halfspace([0.0, 1.0])
    y, z = np.array([0.0, 0.0]), np.array([1.0, 0.0])
    assert not (leq_C(o, y, z) and leq_C(o, z, y))
    assert leq_C(h, y, z) and leq_C(h, z, y)


def test_direction_base_orthant_resolution_three():
    d = direction_base(ConvexCone.orthant(2), 3)
    assert same_rays(d.dirs, [[1, 0], [1, 1], [0, 1]])
    assert d.kind == "grid"


def test_direction_base_halfspace_ignores_resolution():
    for res in (1, 5, 50):
        assert same_rays(direction_base(ConvexCone.halfspace([0.0, 1.0]), res).dirs, [[0.0, 1.0]])


def test_direction_base_zero_cone_full_circle():
    d = direction_base(ConvexCone.zero(2), 8)
    oracle = [[math.cos(k * math.pi / 4), math.sin(k * math.pi / 4)] for k in range(8)]
    assert same_rays(d.dirs, oracle)


def test_direction_base_three_dimensional():
    c = ConvexCone.orthant(3)
    d = direction_base(c, 200)
    assert np.all(c.dual_contains_many(d.dirs))
    for e in np.eye(3):
        assert np.min(np.linalg.norm(d.dirs - e, axis=1)) < 1e-12


def test_whole_space_is_degenerate():
    whole = ConvexCone(2, [[1, 0], [-1, 0], [0, 1], [0, -1]])
    assert whole.is_whole_space
    with pytest.raises(DegenerateConeError):
        direction_base(whole, 8)
    with pytest.raises(DegenerateConeError):
        critical_directions(whole, np.zeros((2, 2)))


def test_halfspace_sentinels():
    assert Halfspace(np.zeros(2), -math.inf).contains([5, 5])
    assert not Halfspace(np.zeros(2), math.inf).contains([5, 5])
    assert Halfspace(np.array([1.0, 0.0]), 1.0).contains([1.0 - 1e-12, 0])


def test_critical_directions_in_dual_and_include_generators():
    rng = np.random.default_rng(1)
    P = rng.normal(size=(8, 2))
    for cone in (ConvexCone.orthant(2), ConvexCone.zero(2), ConvexCone(2, [[1.0, 0.0], [1.0, 1.0]])):
        d = critical_directions(cone, P)
        assert np.all(cone.dual_contains_many(d.dirs))
        for g in cone.dual_generators:
            assert np.min(np.linalg.norm(d.dirs - g, axis=1)) < 1e-12


vec = st.lists(st.floats(-3, 3, allow_nan=False), min_size=3, max_size=3)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 3), st.lists(vec, min_size=1, max_size=4))
def test_bipolar_and_pairing(dim, gens):
    G = np.array(gens)[:, :dim]
    G = G[np.linalg.norm(G, axis=1) > 1e-3]
    if len(G) == 0:
        return
    c = ConvexCone(dim, G)
    if c.is_whole_space:
        return
    # pairing between duals and generators
    assert np.all(c.dual_generators @ c.generators.T >= -1e-9)
    cc = dual_cone(dual_cone(c))
    for g in c.generators:
        assert cc.contains(g)
    for g in cc.generators:
        assert c.contains(g)


@settings(max_examples=60, deadline=None)
@given(st.lists(vec, min_size=3, max_size=3))
def test_order_reflexive_transitive(pts):
    c = ConvexCone(2, [[1.0, 0.2], [0.3, 1.0]])
    y, z, x = (np.array(p[:2]) for p in pts)
    assert leq_C(c, y, y)
    if leq_C(c, y, z) and leq_C(c, z, x):
        assert leq_C(c, y, x)


def test_cone_contains_uses_duals():
    c = ConvexCone(2, [[1.0, 0.0], [1.0, 1.0]])
    assert cone_contains(c, [2.0, 1.0])
    assert not cone_contains(c, [0.0, 1.0])
