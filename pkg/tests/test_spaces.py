import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hadamard_kit import (ConstructionError, DomainError, Euclidean, Hyperbolic2, MetricTree, MonodTree,
                          Product, Sampler, TreePoint, TwoQuadrant, direction_fan, sample_point, tripod,
                          validate)
from hadamard_kit.geometry import constant_speed_defect
from hadamard_kit.serialization import space_from_json


def test_validate_euclidean_passes_tightly():
    diag = validate(Euclidean(3), samples=2000)
    assert diag.passed
    assert max(diag.worst.values()) <= 1e-12


def test_validate_two_quadrant_at_1e4():
    diag = validate(TwoQuadrant(), samples=10_000)
    assert diag.passed, diag.worst


def test_validate_every_space(space):
    assert validate(space, samples=1500, seed=4).passed


@pytest.mark.parametrize("edges", [
    [("a", "b", 1.0), ("b", "c", 1.0), ("c", "a", 1.0)],        # cycle
    [("a", "b", -1.0), ("b", "c", 1.0)],                        # negative length
    [("a", "b", 0.0), ("b", "c", 1.0)],                         # zero length
    [("a", "b", 1.0), ("a", "x", 1.0)],                         # unknown vertex
    [("a", "a", 1.0), ("b", "c", 1.0)],                         # loop
    [("a", "b", 1.0)],                                          # disconnected
])
def test_tree_construction_errors(edges):
    with pytest.raises(ConstructionError):
        MetricTree(["a", "b", "c"], edges)


def test_construction_errors_other_kinds():
    with pytest.raises(ConstructionError):
        Euclidean(0)
    with pytest.raises(ConstructionError):
        MonodTree(0)
    with pytest.raises(ConstructionError):
        MetricTree(["a", "a"], [("a", "a", 1.0)])


def test_sampler_determinism(space):
    a, b = Sampler(7), Sampler(7)
    assert [sample_point(space, a) for _ in range(50)] == [sample_point(space, b) for _ in range(50)]


def test_sampling_regions(rng):
    E = Euclidean(4)
    assert all(max(abs(c) for c in E.sample(rng)) <= 1 for _ in range(200))
    H = Hyperbolic2()
    o = H.point_from_json({"coords": [0, 0]})
    assert all(H.distance(o, H.sample(rng)) <= 3 + 1e-9 for _ in range(200))
    Q = TwoQuadrant()
    for _ in range(500):
        Q.check_point(Q.sample(rng))


def test_points_validated():
    Q = TwoQuadrant()
    with pytest.raises(DomainError):
        Q.check_point((0.5, -0.2))
    H = Hyperbolic2()
    with pytest.raises(DomainError):
        H.check_point((1.0, 1.0, 0.0))
    T = tripod()
    with pytest.raises(DomainError):
        T.check_point(TreePoint(0, 1.5))
    # 1e-12 slop is clipped back into the set
    assert Q.check_point((1 + 1e-13, 0.5)) == (1.0, 0.5)


# -- fans ---------------------------------------------------------------------


def test_tripod_hub_fan_has_three_directions():
    T = tripod()
    for k in (1, 3, 16):
        fan = direction_fan(T, T.vertex_point("o"), k)
        assert len(fan) == 3
        assert fan.truncated == (k > 3)


def test_tree_mid_edge_fan_has_two_directions():
    T = tripod()
    fan = direction_fan(T, TreePoint(0, 0.4), 16)
    assert len(fan) == 2
    assert sorted(g.length for g in fan) == pytest.approx([0.4, 0.6])


def test_tree_fan_lengths_capped_at_one():
    M = MonodTree(4)
    fan = direction_fan(M, M.hub, 8)
    assert len(fan) == 4
    assert all(g.length == pytest.approx(1.0) for g in fan)


def test_euclidean_fan_unit_and_spread():
    E = Euclidean(2)
    fan = direction_fan(E, (0.3, -0.2), 4)
    assert len(fan) == 4
    assert all(g.length == pytest.approx(1.0) for g in fan)
    ends = np.array([g.end for g in fan]) - np.array([0.3, -0.2])
    gram = ends @ ends.T
    assert np.allclose(np.abs(gram - np.diag(np.diag(gram))).max(), 1.0, atol=1e-12)  # pairs orthogonal or opposite


def test_euclidean_high_dim_fan():
    E = Euclidean(5)
    fan = direction_fan(E, (0,) * 5, 16, seed=3)
    assert len(fan) == 16
    assert all(g.length == pytest.approx(1.0) for g in fan)


def test_two_quadrant_origin_fan_splits_between_squares():
    Q = TwoQuadrant()
    fan = direction_fan(Q, (0.0, 0.0), 16)
    signs = [Q.square_of(g.end) for g in fan]
    assert signs.count(1) == 8 and signs.count(-1) == 8
    assert (0.0, 1.0) in [g.end for g in fan]


def test_product_fan_combines_components():
    P = Product(Euclidean(1), tripod())
    x = P.check_point(((0.0,), P.right.vertex_point("o")))
    fan = direction_fan(P, x, 16)
    # 2 pure left + 3 pure right + mixed pairs, cut at 16 members
    assert len(fan) == 11


def test_hyperbolic_fan_unit():
    H = Hyperbolic2()
    x = H.point_from_json({"coords": [0.7, -1.2]})
    fan = direction_fan(H, x, 12)
    assert len(fan) == 12
    assert all(g.length == pytest.approx(1.0, abs=1e-9) for g in fan)


def test_fans_start_at_base_and_have_constant_speed(space, rng):
    for _ in range(10):
        x = space.sample(rng)
        fan = direction_fan(space, x, 8, seed=1)
        assert len(fan) >= 1
        for g in fan:
            assert g.start == x
            assert 0.0 < g.length <= 1.0 + 1e-12
            assert constant_speed_defect(space, g, 16) <= 1e-9


def test_fan_determinism(space, rng):
    x = space.sample(rng)
    a = direction_fan(space, x, 8, seed=5)
    b = direction_fan(space, x, 8, seed=5)
    assert [g.end for g in a] == [g.end for g in b]


def test_fan_size_must_be_positive():
    with pytest.raises(DomainError):
        direction_fan(Euclidean(2), (0, 0), 0)


# -- JSON round trip -------------------------------------------------------------


def test_space_and_point_json_roundtrip(space, rng):
    again = space_from_json({"space": space.to_json()})
    assert again == space
    for _ in range(30):
        p = space.sample(rng)
        q = again.point_from_json(space.point_to_json(p))
        assert space.distance(p, q) <= 1e-12


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(0.05, 5.0), min_size=1, max_size=6), st.integers(0, 2**32 - 1))
def test_random_caterpillar_trees_are_cat0(lengths, seed):
    # random recursive tree: vertex i attaches to a random earlier vertex
    rng = np.random.default_rng(seed)
    names = [f"v{i}" for i in range(len(lengths) + 1)]
    edges = [(names[int(rng.integers(i + 1))], names[i + 1], w) for i, w in enumerate(lengths)]
    t = MetricTree(names, edges)
    assert validate(t, samples=200, seed=seed % 1000).passed


@settings(max_examples=50, deadline=None)
@given(st.floats(-0.99, 0.99), st.floats(-0.99, 0.99), st.floats(0.01, 1.0))
def test_two_quadrant_ray_reach_stays_inside(a, b, t):
    Q = TwoQuadrant()
    sgn = 1.0 if a >= 0 else -1.0
    x = Q.check_point((sgn * abs(a), sgn * abs(b)))
    for g in direction_fan(Q, x, 16):
        r = g.reach()
        Q.check_point(g.at_arclength(min(r, 10.0) * t))
