import csv
import io
import math

import numpy as np
import pytest

from hadamard_kit import (Affine1D, Constant, Coordinate, DescentOptions, DistanceTo, DomainError, Euclidean,
                          Frechet, PreconditionError, QuadrantNorm, SpaceMismatchError, TwoQuadrant,
                          descent_minimize, direction_fan, geodesic_derivative, steepest_direction,
                          trivial_derivative, tripod)
from hadamard_kit.descent import DirectionFan
from hadamard_kit.fields import Scaled, Sum, field_from_json
from oracles import frechet_mean

E1 = Euclidean(1)
Q = TwoQuadrant()


# -- fields ------------------------------------------------------------------------------


def test_field_validation():
    with pytest.raises(DomainError):
        Frechet(E1, [(0.0,)], [-1.0])
    with pytest.raises(DomainError):
        Frechet(E1, [(0.0,), (1.0,)], [1.0])
    with pytest.raises(SpaceMismatchError):
        Coordinate(tripod(), 0)
    with pytest.raises(DomainError):
        Coordinate(Euclidean(2), 2)
    with pytest.raises(SpaceMismatchError):
        QuadrantNorm(E1)
    with pytest.raises(SpaceMismatchError):
        Affine1D(Euclidean(2))


def test_quadrant_norm_values():
    f = QuadrantNorm(Q, plateau=0.3)
    assert f((0.0, 0.0)) == 0.3 and f((0.0, 0.7)) == 0.3
    assert f((-0.5, -0.2)) == 0.0
    assert f((0.3, 0.4)) == pytest.approx(0.5)
    assert f((0.3, 0.0)) == pytest.approx(0.3)


def test_field_json_roundtrip(space, rng):
    a, b = space.sample(rng), space.sample(rng)
    fields = [Frechet(space, [a, b], [1.0, 2.5]), DistanceTo(space, a), Constant(space, 1.5),
              Sum([DistanceTo(space, a), Scaled(Frechet(space, [b]), 0.5)])]
    for f in fields:
        g = field_from_json(space, f.to_json())
        for _ in range(5):
            y = space.sample(rng)
            assert g(y) == f(y)


def test_field_arithmetic():
    f = Affine1D(E1) + 2.0 * Constant(E1, 1.0)
    assert f((3.0,)) == 5.0


# -- derivative -------------------------------------------------------------------------------


@pytest.mark.parametrize("x", [-2.5, 0.0, 0.3, 7.0])
def test_affine_derivative(x):
    f = Affine1D(E1)
    assert geodesic_derivative(E1, f, (x,), E1.geodesic((x,), (x + 1,))).value == pytest.approx(1.0, abs=1e-9)
    assert geodesic_derivative(E1, f, (x,), E1.geodesic((x,), (x - 1,))).value == pytest.approx(-1.0, abs=1e-9)


def test_derivative_preconditions():
    f = Affine1D(E1)
    with pytest.raises(PreconditionError):
        geodesic_derivative(E1, f, (0.0,), E1.geodesic((1.0,), (2.0,)))
    with pytest.raises(DomainError):
        geodesic_derivative(E1, f, (0.0,), E1.geodesic((0.0,), (1.0,)), schedule=[0.5])
    est = geodesic_derivative(E1, f, (0.0,), E1.geodesic((0.0,), (0.0,)))
    assert est.upper_estimate and est.value == -1.0


def test_two_quadrant_norm_at_origin():
    f = QuadrantNorm(Q)
    o = (0.0, 0.0)
    assert abs(geodesic_derivative(Q, f, o, Q.geodesic(o, (0.0, 1.0))).value) <= 1e-5
    for th in np.linspace(0.05, math.pi / 2 - 0.05, 16):
        g = Q.geodesic(o, (math.cos(th), math.sin(th)))
        assert geodesic_derivative(Q, f, o, g).value == pytest.approx(1.0, abs=1e-4)


def test_two_quadrant_plateau_breaks_origin_derivative():
    # with a nonzero plateau the quotients (t - c) / t blow up
    f = QuadrantNorm(Q, plateau=0.3)
    o = (0.0, 0.0)
    assert geodesic_derivative(Q, f, o, Q.geodesic(o, (0.0, 1.0))).value == 0.0
    est = geodesic_derivative(Q, f, o, Q.geodesic(o, (0.6, 0.6)))
    assert est.value < -1e3


def test_two_quadrant_closed_form(rng):
    f = QuadrantNorm(Q)
    for _ in range(100):
        x = tuple(rng.uniform(0.01, 1.0, 2))
        e = tuple(rng.uniform(0.0, 1.0, 2))
        if math.dist(x, e) < 1e-3:
            continue
        d = np.subtract(e, x)
        want = float(d @ x) / (np.linalg.norm(d) * np.linalg.norm(x))
        assert geodesic_derivative(Q, f, x, Q.geodesic(x, e)).value == pytest.approx(want, abs=1e-5)


def test_finite_difference_consistency(rng):
    for _ in range(1000):
        n = int(rng.integers(1, 6))
        E = Euclidean(n)
        x = rng.uniform(-2, 2, n)
        u = rng.normal(size=n)
        u /= np.linalg.norm(u)
        if rng.uniform() < 0.5:
            A = rng.uniform(-2, 2, (3, n))
            w = rng.uniform(0.1, 2.0, 3)
            f = Frechet(E, [tuple(a) for a in A], w)
            grad = 2.0 * np.sum(w[:, None] * (x - A), axis=0)
        else:
            i = int(rng.integers(n))
            f = Coordinate(E, i)
            grad = np.eye(n)[i]
        g = E.geodesic(tuple(x), tuple(x + float(rng.uniform(0.2, 2.0)) * u))
        assert geodesic_derivative(E, f, tuple(x), g).value == pytest.approx(float(grad @ u), abs=1e-5)


def test_sub_segment_invariance(space, rng):
    for _ in range(30):
        x = space.sample(rng)
        f = Frechet(space, [space.sample(rng) for _ in range(2)])
        g = space.geodesic(x, space.sample(rng))
        if g.length < 1e-2:
            continue
        half = space.geodesic(x, g(0.5))
        a = geodesic_derivative(space, f, x, g).value
        b = geodesic_derivative(space, f, x, half).value
        assert a == pytest.approx(b, abs=1e-6)


def test_trivial_derivative_examples(rng):
    x, a = (0.2,), (1.7,)
    f = Frechet(E1, [a])
    assert trivial_derivative(E1, f, x, direction_fan(E1, x)) == pytest.approx(-2 * 1.5, abs=1e-6)
    assert trivial_derivative(E1, Constant(E1, 3.0), x, direction_fan(E1, x)) == 0.0
    assert trivial_derivative(E1, Affine1D(E1), x, direction_fan(E1, x)) == pytest.approx(-1.0, abs=1e-9)
    E = Euclidean(3)
    x, a = tuple(rng.normal(size=3)), tuple(rng.normal(size=3))
    fan = list(direction_fan(E, x, 8).geodesics) + [E.geodesic(x, a)]
    v = trivial_derivative(E, Frechet(E, [a]), x, fan)
    assert v == pytest.approx(-2 * E.distance(x, a), abs=1e-6)
    with pytest.raises(PreconditionError):
        trivial_derivative(E, Frechet(E, [a]), x, [])


# -- steepest direction -------------------------------------------------------------------


@pytest.mark.parametrize("x", [-1.0, 0.0, 2.5])
def test_steepest_affine(x):
    res = steepest_direction(E1, Affine1D(E1), (x,), direction_fan(E1, (x,)))
    assert res.value_max == pytest.approx(1.0, abs=1e-6)
    assert res.value_min == pytest.approx(-1.0, abs=1e-6)
    assert res.gamma_max.end[0] > x and res.gamma_min.end[0] < x


def test_steepest_constant_tie_break(space, rng):
    x = space.sample(rng)
    fan = direction_fan(space, x, 8)
    if len(fan) < 2:
        pytest.skip("point with a single direction")
    res = steepest_direction(space, Constant(space, 2.0), x, fan)
    assert all(v == 0.0 for v in res.values)
    assert res.label_min == "d0" and res.label_max == "d0"


def test_steepest_needs_two_directions():
    x = (0.0, 0.0)
    E = Euclidean(2)
    with pytest.raises(PreconditionError):
        steepest_direction(E, Constant(E), x, [E.geodesic(x, (1.0, 0.0))])


def test_steepest_frechet_points_at_anchor(space, rng):
    for _ in range(10):
        x, a = space.sample(rng), space.sample(rng)
        d = space.distance(x, a)
        fan = direction_fan(space, x, 16)
        if d < 0.05 or len(fan) < 2:
            continue
        f = Frechet(space, [a])
        res = steepest_direction(space, f, x, fan, refine=4)
        # one-sided finite differences over the fan bound the answer from above
        h = 1e-6
        fd = min((f(g.at_arclength(h)) - f(x)) / h for g in fan.geodesics)
        assert res.value_min >= -2 * d - 1e-5
        assert res.value_min <= fd + 1e-4
    x, a = (0.0, 0.0), (0.6, 0.8)
    E = Euclidean(2)
    res = steepest_direction(E, Frechet(E, [a]), x, direction_fan(E, x, 16), refine=4)
    assert res.value_min == pytest.approx(-2.0, rel=1e-3)


# -- descent ----------------------------------------------------------------------------------


def test_descent_frechet_euclidean(rng):
    for _ in range(20):
        n = int(rng.integers(2, 6))
        E = Euclidean(n)
        A = rng.uniform(-2, 2, (int(rng.integers(2, 6)), n))
        w = rng.uniform(0.1, 3.0, len(A))
        rep = descent_minimize(E, Frechet(E, [tuple(a) for a in A], w), tuple(rng.uniform(-2, 2, n)),
                               DescentOptions(max_iters=200))
        assert np.linalg.norm(np.subtract(rep.iterates[-1], frechet_mean(A, w))) <= 1e-5
        assert rep.iterations <= 200


def test_descent_tripod_hub():
    T = tripod()
    f = Frechet(T, [T.vertex_point(v) for v in "abc"])
    rep = descent_minimize(T, f, T.vertex_point("a"))
    assert T.distance(rep.iterates[-1], T.vertex_point("o")) <= 1e-5
    assert rep.reason == "stationary"


def test_descent_single_anchor(space, rng):
    a, x0 = space.sample(rng), space.sample(rng)
    rep = descent_minimize(space, Frechet(space, [a]), x0)
    assert space.distance(rep.iterates[-1], a) <= 1e-4


def test_descent_report_invariants(space, rng):
    f = Frechet(space, [space.sample(rng) for _ in range(3)], [1.0, 2.0, 0.5])
    opts = DescentOptions(max_iters=100)
    rep = descent_minimize(space, f, space.sample(rng), opts)
    assert all(b <= a for a, b in zip(rep.objectives, rep.objectives[1:]))
    if rep.reason == "stationary":
        assert rep.final_derivative >= -10 * opts.tol
    assert len(rep.iterates) == len(rep.objectives) == rep.iterations + 1


def test_descent_options_validation():
    for kw in ({"c": 0.0}, {"c": 1.0}, {"beta": 1.0}, {"step0": 0.0}, {"tol": -1.0}, {"fan_size": 1}):
        with pytest.raises(DomainError):
            DescentOptions(**kw)


def test_descent_csv_and_json():
    E = Euclidean(2)
    rep = descent_minimize(E, Frechet(E, [(1.0, 0.0), (0.0, 1.0)]), (0.0, 0.0))
    rows = list(csv.reader(io.StringIO(rep.to_csv())))
    assert rows[0] == ["iteration", "objective", "step", "direction", "derivative"]
    assert len(rows) == rep.iterations + 2
    js = rep.to_json(E)
    assert js["reason"] == "stationary" and len(js["trace"]) == rep.iterations
    assert any("upper estimate" in n for n in js["notes"])


def test_convexity_probe(space, rng):
    for _ in range(50):
        f = Frechet(space, [space.sample(rng) for _ in range(3)], rng.uniform(0.1, 2.0, 3))
        g = space.geodesic(space.sample(rng), space.sample(rng))
        ts = np.linspace(0.0, 1.0, 21)
        v = np.array([f(g(t)) for t in ts])
        assert np.min(v[:-2] - 2 * v[1:-1] + v[2:]) >= -1e-8
