"""Dual functions ``y -> d(x, P_gamma y)`` and sampled bounds on their metric."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import DomainError, PreconditionError, SpaceMismatchError
from .geometry import Geodesic
from .projections import project_to_geodesic
from .spaces import Euclidean

BASE_TOL = 1e-9


@dataclass(frozen=True)
class DualFunction:
    space: object
    base: object
    geodesic: Geodesic

    def __post_init__(self):
        if self.space.distance(self.base, self.geodesic.start) > BASE_TOL:
            raise PreconditionError("geodesic does not start at the base point")

    def __call__(self, y) -> float:
        return phi_eval(self, y)

    def to_json(self):
        sp = self.space
        return {"base": sp.point_to_json(self.base), "end": sp.point_to_json(self.geodesic.end)}


def dual_function(space, x, end) -> DualFunction:
    x = space.check_point(x)
    return DualFunction(space, x, space.geodesic(x, space.check_point(end)))


def dual_from_json(space, obj) -> DualFunction:
    return dual_function(space, space.point_from_json(obj["base"]), space.point_from_json(obj["end"]))


def phi_eval(phi: DualFunction, y) -> float:
    sp = phi.space
    y = sp.check_point(y)
    if phi.geodesic.length == 0.0:
        return 0.0
    return sp.distance(phi.base, project_to_geodesic(sp, phi.geodesic, y).foot)


def _shared_base(a: DualFunction, b: DualFunction):
    if a.space != b.space:
        raise SpaceMismatchError("dual functions live in different spaces")
    if a.space.distance(a.base, b.base) > BASE_TOL:
        raise PreconditionError("dual functions have different base points")


def default_dual_sample(a: DualFunction, b: DualFunction, n_random: int = 256, seed: int = 0) -> list:
    """Random points plus both geodesic endpoints (the endpoints separate distinct duals)."""
    rng = np.random.default_rng(seed)
    pts = [a.space.sample(rng) for _ in range(n_random)]
    return pts + [a.geodesic.end, b.geodesic.end]


def dual_distance_estimate(a: DualFunction, b: DualFunction, sample=None, seed: int = 0) -> float:
    """Lower bound for the dual distance: max normalised gap over ``sample``.

    Sample points within 1e-9 of the base are skipped.
    """
    _shared_base(a, b)
    sp = a.space
    if sample is None:
        sample = default_dual_sample(a, b, seed=seed)
    best = 0.0
    for y in sample:
        y = sp.check_point(y)
        dy = sp.distance(a.base, y)
        if dy <= BASE_TOL:
            continue
        best = max(best, abs(phi_eval(a, y) - phi_eval(b, y)) / dy)
    return best


def weak_star_nbhd_contains(ref: DualFunction, eps: float, test_points, eta: DualFunction) -> bool:
    _shared_base(ref, eta)
    if not eps > 0.0:
        raise DomainError("eps must be positive")
    return all(abs(phi_eval(ref, y) - phi_eval(eta, y)) < eps for y in test_points)


# -- euclidean closed form ------------------------------------------------------


def _ratio_sup_along(p: float, q: float, a: float, b: float) -> float:
    """sup over R > 0 of |clip(Rp, 0, a) - clip(Rq, 0, b)| / R.

    Between breakpoints the numerator is affine in R, so the ratio is
    monotone and the sup sits at a breakpoint or at R -> 0.
    """
    best = abs(max(p, 0.0) - max(q, 0.0))
    for c, lim in ((p, a), (q, b)):
        if c > 0.0:
            R = lim / c
            best = max(best, abs(min(max(R * p, 0.0), a) - min(max(R * q, 0.0), b)) / R)
    return best


def exact_dual_distance_euclidean(a: DualFunction, b: DualFunction, grid: int = 7200) -> float:
    """Dual distance in euclidean space.

    Components orthogonal to both directions only enlarge ``|y - x|``, so the
    sup reduces to the plane they span; there a fine angular grid is followed
    by a bounded scalar polish around the best angle.
    """
    _shared_base(a, b)
    if not isinstance(a.space, Euclidean):
        raise SpaceMismatchError("closed form only in euclidean space")
    x = np.asarray(a.base)
    la, lb = a.geodesic.length, b.geodesic.length
    u = (np.asarray(a.geodesic.end) - x) / la if la > 0 else np.zeros_like(x)
    v = (np.asarray(b.geodesic.end) - x) / lb if lb > 0 else np.zeros_like(x)
    e1 = u if la > 0 else v
    if not np.any(e1):
        return 0.0
    w = v - (v @ e1) * e1 if la > 0 else np.zeros_like(x)
    if np.linalg.norm(w) > 1e-12:
        e2 = w / np.linalg.norm(w)
    elif a.space.dim >= 2:
        # parallel directions: any unit vector orthogonal to e1
        k = int(np.argmin(np.abs(e1)))
        t = np.zeros_like(x)
        t[k] = 1.0
        t -= (t @ e1) * e1
        e2 = t / np.linalg.norm(t)
    else:
        e2 = None

    def g(th):
        d = math.cos(th) * e1 + (math.sin(th) * e2 if e2 is not None else 0.0)
        return _ratio_sup_along(float(d @ u), float(d @ v), la, lb)

    if e2 is None:
        return max(g(0.0), g(math.pi))
    thetas = np.linspace(0.0, 2.0 * math.pi, grid, endpoint=False)
    vals = [g(t) for t in thetas]
    i = int(np.argmax(vals))
    h = 2.0 * math.pi / grid
    res = minimize_scalar(lambda t: -g(t), bounds=(thetas[i] - h, thetas[i] + h), method="bounded",
                          options={"xatol": 1e-12})
    return max(vals[i], -res.fun)
