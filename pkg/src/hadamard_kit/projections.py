"""Metric projections onto convex sets and the checks built on them."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .errors import DomainError, PreconditionError, UnsupportedRepresentationError
from .geometry import Geodesic, alexandrov_angle
from .spaces import MetricTree, TreePoint, direction_fan

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
MAX_ITERS = 200
EPS = 2.220446049250313e-16


# -- convex set representations ---------------------------------------------


@dataclass(frozen=True)
class Segment:
    geodesic: Geodesic

    def to_json(self):
        sp = self.geodesic.space
        return {"segment": {"start": sp.point_to_json(self.geodesic.start),
                            "end": sp.point_to_json(self.geodesic.end)}}


@dataclass(frozen=True)
class Ball:
    center: object
    radius: float

    def __post_init__(self):
        if not self.radius > 0.0:
            raise DomainError(f"ball radius must be positive, got {self.radius!r}")

    def to_json(self, space):
        return {"ball": {"center": space.point_to_json(self.center), "radius": self.radius}}


@dataclass(frozen=True)
class TreeHull:
    points: tuple

    def __post_init__(self):
        if not self.points:
            raise DomainError("tree hull needs at least one point")

    def to_json(self, space):
        return {"tree_hull": [space.point_to_json(p) for p in self.points]}


@dataclass(frozen=True)
class ProjectionResult:
    foot: object
    distance: float
    parameter: float | None = None


# -- projections -------------------------------------------------------------


def _ternary_min(f: Callable[[float], float], tol: float) -> float:
    """Minimise a convex function on [0, 1].

    Golden-section form of ternary search (one new probe per iteration),
    then a parabolic polish on the smooth part, then an endpoint check.
    """
    a, b = 0.0, 1.0
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(MAX_ITERS):
        if b - a <= tol:
            break
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    t, ft = (c, fc) if fc <= fd else (d, fd)
    # Near a flat minimum, comparing f values only resolves t to about
    # sqrt(machine eps).  A parabola through well-separated probes does
    # better, so its vertex is taken whenever the curvature stands clear of
    # rounding noise and the vertex stays inside the probe bracket.  The
    # equally spaced triple is shifted to stay inside [0, 1].
    for h in (1e-3, 1e-4, 1e-5):
        lo = max(0.0, min(t - h, 1.0 - 2.0 * h))
        mid, hi = lo + h, lo + 2.0 * h
        f_lo, f_mid, f_hi = f(lo), f(mid), f(hi)
        curv = f_lo - 2.0 * f_mid + f_hi
        if not curv > 64.0 * EPS * (abs(f_lo) + abs(f_mid) + abs(f_hi)):
            continue
        cand = mid - 0.5 * h * (f_hi - f_lo) / curv
        if lo <= cand <= hi:
            fc_ = f(cand)
            # kinks make the parabola lie; rounding-level losses are fine
            if fc_ <= ft + 8.0 * EPS * (abs(ft) + 1.0):
                t, ft = cand, min(fc_, ft)
    for end in (0.0, 1.0):
        fe = f(end)
        if fe <= ft:
            t, ft = end, fe
    return t


def project_to_geodesic(space, gamma: Geodesic, y, tol: float = 1e-10) -> ProjectionResult:
    """Nearest point of the segment ``gamma`` to ``y``.

    ``t -> d(gamma(t), y)^2`` is convex in a CAT(0) space, so a bracketing
    search on [0, 1] finds the unique minimiser.
    """
    if not tol > 0.0:
        raise DomainError("tolerance must be positive")
    if gamma.length == 0.0:
        return ProjectionResult(gamma.start, space.distance(gamma.start, y), 0.0)
    dist = space.distance
    t = _ternary_min(lambda s: dist(gamma(s), y) ** 2, tol)
    foot = gamma(t)
    return ProjectionResult(foot, dist(foot, y), t)


def _tree_hull_intervals(space: MetricTree, points) -> dict:
    """Per-edge offset interval covered by the subtree spanned by ``points``."""
    spans: dict = {}

    def add(ei, a, b):
        lo, hi = min(a, b), max(a, b)
        if ei in spans:
            lo = min(lo, spans[ei][0])
            hi = max(hi, spans[ei][1])
        spans[ei] = (lo, hi)

    for p in points:
        add(p.edge, p.offset, p.offset)
    for i, p in enumerate(points):
        for q in points[i + 1:]:
            for ei, f, t in space._legs(p, q):
                add(ei, f, t)
    return spans


def _side_of_edge(space: MetricTree, ei: int, y: TreePoint):
    """Where ``y`` sits relative to edge ``ei``: ('on', offset), ('lo', _) or ('hi', _)."""
    if y.edge == ei:
        return "on", y.offset
    a, b, length = space._ends[ei]
    da = space.distance_to_vertex(y, a)
    db = space.distance_to_vertex(y, b)
    return ("lo", 0.0) if da < db else ("hi", length)


def _project_tree_hull(space: MetricTree, points, y) -> ProjectionResult:
    best = None
    for ei, (lo, hi) in _tree_hull_intervals(space, points).items():
        side, off = _side_of_edge(space, ei, y)
        if side == "on":
            s = min(max(off, lo), hi)
        else:
            s = lo if side == "lo" else hi
        cand = TreePoint(ei, s)
        d = space.distance(cand, y)
        if best is None or d < best.distance:
            best = ProjectionResult(cand, d)
    return best


def project_to_convex(space, C, y) -> ProjectionResult:
    y = space.check_point(y)
    if isinstance(C, Segment):
        return project_to_geodesic(space, C.geodesic, y)
    if isinstance(C, Ball):
        d = space.distance(C.center, y)
        if d <= C.radius:
            return ProjectionResult(y, 0.0)
        foot = space.geodesic(C.center, y)(C.radius / d)
        return ProjectionResult(foot, space.distance(foot, y))
    if isinstance(C, TreeHull):
        if not isinstance(space, MetricTree):
            raise UnsupportedRepresentationError("tree_hull is only available in tree spaces")
        return _project_tree_hull(space, [space.check_point(p) for p in C.points], y)
    raise UnsupportedRepresentationError(f"unknown convex set {C!r}")


def contains(space, C, y, tol: float = 1e-8) -> bool:
    return project_to_convex(space, C, y).distance <= tol


def projection_inequality_residual(space, C, x, y) -> float:
    """``d(x,y)^2 - d(y,Px)^2 - d(x,Px)^2`` for ``y`` in ``C``; never below -1e-8."""
    x = space.check_point(x)
    y = space.check_point(y)
    if not contains(space, C, y):
        raise PreconditionError("y is not in the convex set")
    foot = project_to_convex(space, C, x).foot
    d = space.distance
    return d(x, y) ** 2 - d(y, foot) ** 2 - d(x, foot) ** 2


# -- normal cone ---------------------------------------------------------------


def sample_convex(space, C, k: int = 64) -> list:
    """Deterministic grid of points of ``C`` used by the normal-cone test."""
    if isinstance(C, Segment):
        g = C.geodesic
        return [g(i / (k - 1)) for i in range(k)] if k > 1 else [g.start]
    if isinstance(C, Ball):
        fan = direction_fan(space, C.center, k)
        return [g.at_arclength(C.radius) for g in fan.geodesics]
    if isinstance(C, TreeHull):
        if not isinstance(space, MetricTree):
            raise UnsupportedRepresentationError("tree_hull is only available in tree spaces")
        spans = _tree_hull_intervals(space, [space.check_point(p) for p in C.points])
        per = max(2, k // max(1, len(spans)))
        out = []
        for ei, (lo, hi) in sorted(spans.items()):
            out.extend(TreePoint(ei, lo + (hi - lo) * i / (per - 1)) for i in range(per))
        return out
    raise UnsupportedRepresentationError(f"unknown convex set {C!r}")


@dataclass(frozen=True)
class NormalConeResult:
    status: str  # "yes" | "no" | "inconclusive"
    min_angle: float
    witness: object = None
    spread: float = 0.0
    sampled: int = 0


def normal_cone_contains(space, p, C, x, angle_tol: float = 1e-6, k: int = 64) -> NormalConeResult:
    """Sampled test of whether every segment into ``C`` meets ``[p, x]`` at an
    Alexandrov angle of at least pi/2."""
    p = space.check_point(p)
    x = space.check_point(x)
    if space.distance(p, x) <= 1e-12:
        raise DomainError("x coincides with p")
    if not contains(space, C, p):
        raise PreconditionError("p is not in the convex set")
    gx = space.geodesic(p, x)
    threshold = 0.5 * math.pi - angle_tol
    worst = None
    uncertain = False
    n = 0
    for y in sample_convex(space, C, k):
        if space.distance(p, y) <= 1e-12:
            continue
        n += 1
        est = alexandrov_angle(space, gx, space.geodesic(p, y))
        if worst is None or est.value < worst[0]:
            worst = (est.value, y, est.spread)
        if est.value < threshold:
            if est.value + est.spread < threshold:
                return NormalConeResult("no", est.value, y, est.spread, n)
            uncertain = True
    if worst is None:
        return NormalConeResult("yes", math.pi, None, 0.0, 0)
    status = "inconclusive" if uncertain else "yes"
    return NormalConeResult(status, worst[0], worst[1], worst[2], n)


# -- geodesic monotonicity -------------------------------------------------------


@dataclass(frozen=True)
class MonotonicityResult:
    monotone: bool
    witness: tuple | None
    values: tuple


def geodesic_monotonicity_check(space, T, x0, x1, grid_size: int = 33,
                                tol: float = 1e-9) -> MonotonicityResult:
    """Check that ``alpha -> d(T x0, T x_alpha)`` is monotone on a uniform grid.

    The witness is the first pair of consecutive grid parameters at which the
    sampled sequence reverses direction.
    """
    if grid_size < 3:
        raise DomainError("grid_size must be at least 3")
    g = space.geodesic(space.check_point(x0), space.check_point(x1))
    alphas = [i / (grid_size - 1) for i in range(grid_size)]
    t0 = T(g.start)
    phi = [space.distance(t0, T(g(a))) for a in alphas]
    trend = 0
    for i in range(1, grid_size):
        diff = phi[i] - phi[i - 1]
        step = 1 if diff > tol else (-1 if diff < -tol else 0)
        if step == 0:
            continue
        if trend == 0:
            trend = step
        elif step != trend:
            return MonotonicityResult(False, (alphas[i - 1], alphas[i]), tuple(phi))
    return MonotonicityResult(True, None, tuple(phi))
