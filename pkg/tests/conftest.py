import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from hadamard_kit import (Ball, Euclidean, Hyperbolic2, MetricTree, MonodTree, Product, Segment, TreeHull,
                          TwoQuadrant, tripod)


def caterpillar():
    return MetricTree(["a", "b", "c", "d", "e", "f"],
                      [("a", "b", 0.7), ("b", "c", 1.3), ("c", "d", 0.4), ("b", "e", 2.0), ("c", "f", 0.9)])


def six_spaces():
    """One instance of each shipped kind (plus a non-star tree)."""
    return {
        "euclidean": Euclidean(3),
        "metric_tree": caterpillar(),
        "monod_tree": MonodTree(6),
        "product": Product(Euclidean(1), tripod()),
        "two_quadrant": TwoQuadrant(),
        "hyperbolic2": Hyperbolic2(),
    }


SPACES = six_spaces()


def random_convex_set(space, rng, kind):
    if kind == "segment":
        return Segment(space.geodesic(space.sample(rng), space.sample(rng)))
    if kind == "ball":
        return Ball(space.sample(rng), float(rng.uniform(0.05, 1.0)))
    return TreeHull(tuple(space.sample(rng) for _ in range(3)))


def point_in_set(space, C, rng):
    if isinstance(C, Segment):
        return C.geodesic(float(rng.uniform()))
    if isinstance(C, Ball):
        g = space.geodesic(C.center, space.sample(rng))
        if g.length == 0.0:
            return C.center
        return g(min(1.0, C.radius * float(rng.uniform()) / g.length))
    a, b = C.points[0], C.points[1]
    return space.geodesic(a, b)(float(rng.uniform()))


def convex_kinds(space):
    return ["segment", "ball"] + (["tree_hull"] if isinstance(space, MetricTree) else [])


@pytest.fixture(params=sorted(SPACES))
def space(request):
    return SPACES[request.param]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
