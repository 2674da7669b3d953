"""Catalog of real-valued objectives on the model spaces."""

from __future__ import annotations

import math

from .errors import DomainError, SpaceMismatchError
from .spaces import Euclidean, TwoQuadrant


class ScalarField:
    space = None

    def __call__(self, p) -> float:
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError

    def __add__(self, other):
        return Sum((self, other))

    def __mul__(self, factor):
        return Scaled(self, factor)

    __rmul__ = __mul__


class Frechet(ScalarField):
    """Weighted sum of squared distances to anchor points."""

    def __init__(self, space, anchors, weights=None):
        self.space = space
        self.anchors = tuple(space.check_point(a) for a in anchors)
        if not self.anchors:
            raise DomainError("Frechet field needs at least one anchor")
        weights = [1.0] * len(self.anchors) if weights is None else [float(w) for w in weights]
        if len(weights) != len(self.anchors):
            raise DomainError("one weight per anchor")
        if any(not w > 0.0 for w in weights):
            raise DomainError("weights must be positive")
        self.weights = tuple(weights)

    def __call__(self, p):
        d = self.space.distance
        return sum(w * d(p, a) ** 2 for w, a in zip(self.weights, self.anchors))

    def to_json(self):
        return {"frechet": {"anchors": [self.space.point_to_json(a) for a in self.anchors],
                            "weights": list(self.weights)}}


class DistanceTo(ScalarField):
    def __init__(self, space, point):
        self.space = space
        self.point = space.check_point(point)

    def __call__(self, p):
        return self.space.distance(p, self.point)

    def to_json(self):
        return {"distance_to": self.space.point_to_json(self.point)}


class Coordinate(ScalarField):
    def __init__(self, space, index: int):
        if not isinstance(space, (Euclidean, TwoQuadrant)):
            raise SpaceMismatchError("coordinate fields need euclidean or two_quadrant coordinates")
        n = space.dim if isinstance(space, Euclidean) else 2
        if not 0 <= index < n:
            raise DomainError(f"coordinate index {index} out of range")
        self.space = space
        self.index = int(index)

    def __call__(self, p):
        return p[self.index]

    def to_json(self):
        return {"coordinate": {"index": self.index}}


class Affine1D(ScalarField):
    """``f(x) = x`` on the real line."""

    def __init__(self, space):
        if not (isinstance(space, Euclidean) and space.dim == 1):
            raise SpaceMismatchError("affine_1d lives on euclidean(1)")
        self.space = space

    def __call__(self, p):
        return p[0]

    def to_json(self):
        return {"affine_1d": {}}


class Constant(ScalarField):
    def __init__(self, space, value: float = 0.0):
        self.space = space
        self.value = float(value)

    def __call__(self, p):
        return self.value

    def to_json(self):
        return {"constant": {"value": self.value}}


class QuadrantNorm(ScalarField):
    """Norm field on the two-quadrant space.

    Zero on the negative square minus the origin, ``plateau`` on the
    nonnegative ordinate axis (origin included) and the Euclidean norm
    elsewhere.  Only ``plateau = 0`` gives a field whose derivative at the
    origin is finite in every direction.
    """

    def __init__(self, space, plateau: float = 0.0):
        if not isinstance(space, TwoQuadrant):
            raise SpaceMismatchError("the norm field lives on the two_quadrant space")
        self.space = space
        self.plateau = float(plateau)

    def __call__(self, p):
        x1, x2 = p
        if x1 == 0.0 and x2 >= 0.0:
            return self.plateau
        if x1 <= 0.0 and x2 <= 0.0:
            return 0.0
        return math.hypot(x1, x2)

    def to_json(self):
        return {"norm": {"plateau": self.plateau}}


class Scaled(ScalarField):
    def __init__(self, field: ScalarField, factor: float):
        self.field = field
        self.space = field.space
        self.factor = float(factor)

    def __call__(self, p):
        return self.factor * self.field(p)

    def to_json(self):
        return {"scaled": {"factor": self.factor, "field": self.field.to_json()}}


class Sum(ScalarField):
    def __init__(self, fields):
        self.fields = tuple(fields)
        if not self.fields:
            raise DomainError("sum of no fields")
        self.space = self.fields[0].space

    def __call__(self, p):
        return sum(f(p) for f in self.fields)

    def to_json(self):
        return {"sum": [f.to_json() for f in self.fields]}


class AsymptoticRadiusSquared(ScalarField):
    """``y -> max_n d(x_n, y)^2`` over a fixed finite set of points."""

    def __init__(self, space, points):
        self.space = space
        self.points = tuple(points)

    def __call__(self, p):
        d = self.space.distance
        return max(d(q, p) for q in self.points) ** 2

    def to_json(self):
        return {"asymptotic_radius_sq": [self.space.point_to_json(q) for q in self.points]}


def field_from_json(space, obj) -> ScalarField:
    if not isinstance(obj, dict) or len(obj) != 1:
        raise DomainError(f"field JSON must have exactly one key, got {obj!r}")
    (kind, body), = obj.items()
    if kind == "frechet":
        return Frechet(space, [space.point_from_json(a) for a in body["anchors"]], body.get("weights"))
    if kind == "distance_to":
        return DistanceTo(space, space.point_from_json(body))
    if kind == "coordinate":
        return Coordinate(space, int(body["index"]))
    if kind == "affine_1d":
        return Affine1D(space)
    if kind == "constant":
        return Constant(space, body.get("value", 0.0))
    if kind == "norm":
        return QuadrantNorm(space, body.get("plateau", 0.0))
    if kind == "scaled":
        return Scaled(field_from_json(space, body["field"]), body["factor"])
    if kind == "sum":
        return Sum([field_from_json(space, b) for b in body])
    if kind == "asymptotic_radius_sq":
        return AsymptoticRadiusSquared(space, [space.point_from_json(q) for q in body])
    raise DomainError(f"unknown field kind {kind!r}")
