"""Geodesic segments issuing from a fixed base point, viewed as a metric space.

A segment is stored as a :class:`~hadamard_kit.geometry.Geodesic` whose start
is the base.  The endpoint map is a bijection onto the space, so the
endpoint is a lossless encoding and every operation here goes through it.
"""

from __future__ import annotations

from .convergence import SequenceTrace, Verdict, weak_converges
from .errors import DomainError, PreconditionError
from .geometry import Geodesic

BASE_TOL = 1e-9


def _check_base(space, *segs: Geodesic):
    x = segs[0].start
    for g in segs[1:]:
        if space.distance(x, g.start) > BASE_TOL:
            raise PreconditionError("segments do not share a base point")
    return x


def trivial_segment(space, x) -> Geodesic:
    x = space.check_point(x)
    return space.geodesic(x, x)


def d1(space, gamma: Geodesic, eta: Geodesic, grid: int = 129) -> float:
    """Sup distance between the curves on a uniform grid that contains t = 1."""
    if grid < 2:
        raise DomainError("grid must have at least two points")
    _check_base(space, gamma, eta)
    best = 0.0
    for i in range(grid):
        t = i / (grid - 1)
        best = max(best, space.distance(gamma(t), eta(t)))
    return best


def psi(gamma: Geodesic):
    return gamma.end


def psi_inverse(space, x, y) -> Geodesic:
    return space.geodesic(space.check_point(x), space.check_point(y))


def segment_combine(space, g1: Geodesic, g2: Geodesic, t: float) -> Geodesic:
    """Segment from the base to the ``t``-point between the two endpoints."""
    if not 0.0 <= t <= 1.0:
        raise DomainError(f"t={t!r} outside [0, 1]")
    x = _check_base(space, g1, g2)
    if t == 0.0:
        return g1
    if t == 1.0:
        return g2
    return space.geodesic(x, space.geodesic(g1.end, g2.end)(t))


def weak_gamma_converges(space, segments, limit: Geodesic, fan, tail_window: int | None = None,
                         decay_tol: float = 1e-6) -> Verdict:
    """Weak convergence of segments, decided on their endpoints."""
    segments = list(segments)
    _check_base(space, limit, *segments)
    trace = SequenceTrace(tuple(g.end for g in segments), tail_window)
    if fan is None:
        from .convergence import trace_fan
        fan = trace_fan(space, limit.end, trace)
    return weak_converges(space, trace, limit.end, fan, decay_tol=decay_tol)


def segment_to_json(space, g: Geodesic) -> dict:
    return {"base": space.point_to_json(g.start), "end": space.point_to_json(g.end)}


def segment_from_json(space, obj) -> Geodesic:
    return psi_inverse(space, space.point_from_json(obj["base"]), space.point_from_json(obj["end"]))
