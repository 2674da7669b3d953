"""Space-agnostic geometric kernel.

Every function here takes a space object first and dispatches to its
distance and geodesic formulas.  Points are validated on entry; the
hot loops elsewhere in the package call the space methods directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Sequence

from .errors import DomainError, PreconditionError

DEFAULT_TOL = 1e-9
DEGENERATE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Geodesic:
    """Constant-speed geodesic ``[0, 1] -> space`` from ``start`` to ``end``.

    ``data`` holds whatever the owning space precomputed to evaluate the
    curve (tree legs, product components, ...).  Calling the geodesic at
    ``t = 0`` or ``t = 1`` returns the stored endpoints exactly.
    """

    space: Any
    start: Any
    end: Any
    length: float
    data: Any = field(default=None, repr=False)

    def __call__(self, t: float):
        if t == 0.0:
            return self.start
        if t == 1.0:
            return self.end
        if not 0.0 <= t <= 1.0:
            raise DomainError(f"geodesic parameter {t!r} outside [0, 1]")
        if self.length == 0.0:
            return self.start
        return self.space._geodesic_point(self, t)

    @property
    def is_trivial(self) -> bool:
        return self.length == 0.0

    def at_arclength(self, s: float):
        """Point at arclength ``s`` from the start, following the extension
        past ``end`` when the space provides one.  Clamped at the reach."""
        if self.length == 0.0 or s <= 0.0:
            return self.start
        if s <= self.length:
            return self(s / self.length)
        reach = self.space.reach(self)
        return self.space._extend_point(self, min(s, reach))

    def reach(self) -> float:
        return self.space.reach(self)


@dataclass(frozen=True)
class AngleEstimate:
    """Sampled limsup of comparison angles at a shrinking schedule."""

    value: float
    spread: float
    schedule: tuple
    samples: tuple
    tail_window: int

    def to_json(self):
        return {
            "value": self.value,
            "spread": self.spread,
            "tail_window": self.tail_window,
            "schedule": list(self.schedule),
            "samples": list(self.samples),
        }


def distance(space, p, q) -> float:
    p = space.check_point(p)
    q = space.check_point(q)
    return space.distance(p, q)


def geodesic(space, p, q) -> Geodesic:
    p = space.check_point(p)
    q = space.check_point(q)
    return space.geodesic(p, q)


def combine(space, x, y, t: float):
    """The point ``(1-t) x (+) t y`` on the geodesic from ``x`` to ``y``."""
    if not 0.0 <= t <= 1.0:
        raise DomainError(f"combination weight t={t!r} outside [0, 1]")
    return geodesic(space, x, y)(t)


def _cosine_angle(a: float, b: float, c: float) -> float:
    """Angle between sides ``a`` and ``b`` opposite ``c``.

    Kahan's rearrangement of the law of cosines; stays accurate for
    needle-like triangles where ``acos`` of the cosine loses half the digits.
    """
    if a < b:
        a, b = b, a
    if c >= a + b:
        return math.pi
    if c <= a - b:
        return 0.0
    mu = c - (a - b) if b >= c else b - (a - c)
    num = ((a - b) + c) * mu
    den = (a + (b + c)) * ((a - c) + b)
    if den <= 0.0:
        return math.pi
    return 2.0 * math.atan(math.sqrt(max(num, 0.0) / den))


def comparison_angle(space, p, q, r) -> float:
    """Angle at ``p`` of the Euclidean triangle with the side lengths of ``pqr``."""
    p, q, r = (space.check_point(v) for v in (p, q, r))
    a = space.distance(p, q)
    b = space.distance(p, r)
    if a <= DEGENERATE_TOL:
        raise DomainError("comparison angle undefined: q coincides with p")
    if b <= DEGENERATE_TOL:
        raise DomainError("comparison angle undefined: r coincides with p")
    return _cosine_angle(a, b, space.distance(q, r))


def dyadic_schedule(n: int = 20) -> tuple:
    return tuple(2.0 ** (-k) for k in range(1, n + 1))


def alexandrov_angle(space, gamma: Geodesic, eta: Geodesic, schedule: Sequence[float] | None = None,
                     tail_window: int = 5) -> AngleEstimate:
    """Estimate the Alexandrov angle between two geodesics issuing from one point.

    The limsup is replaced by the maximum of the comparison angles over the
    last ``tail_window`` entries of ``schedule`` (default ``2**-k``,
    ``k = 1..20``).  ``spread`` is max minus min over that tail.
    """
    schedule = tuple(dyadic_schedule() if schedule is None else schedule)
    if len(schedule) < 1 or any(b >= a for a, b in zip(schedule, schedule[1:])):
        raise DomainError("schedule must be strictly decreasing")
    if schedule[0] > 1.0 or schedule[-1] <= 0.0:
        raise DomainError("schedule must lie in (0, 1]")
    if gamma.length <= DEGENERATE_TOL or eta.length <= DEGENERATE_TOL:
        raise DomainError("Alexandrov angle needs geodesics of positive length")
    if space.distance(gamma.start, eta.start) > 1e-9:
        raise PreconditionError("geodesics do not start at the same point")
    samples = []
    p = gamma.start
    for t in schedule:
        u, v = gamma(t), eta(t)
        a, b = space.distance(p, u), space.distance(p, v)
        if min(a, b) <= 0.0:
            # the scale fell below float resolution of the points
            break
        samples.append(_cosine_angle(a, b, space.distance(u, v)))
    if not samples:
        raise DomainError("schedule too fine for the point resolution")
    w = max(1, min(tail_window, len(samples)))
    tail = samples[-w:]
    return AngleEstimate(value=max(tail), spread=max(tail) - min(tail),
                         schedule=schedule[:len(samples)], samples=tuple(samples), tail_window=w)


def cat0_quadratic_residual(space, x, y, z, t: float) -> float:
    """Slack in ``d(x_t,z)^2 <= (1-t)d(x,z)^2 + t d(y,z)^2 - t(1-t)d(x,y)^2``.

    Nonnegative (up to rounding) in every CAT(0) space; zero in Euclidean space.
    """
    if not 0.0 <= t <= 1.0:
        raise DomainError(f"t={t!r} outside [0, 1]")
    x, y, z = (space.check_point(v) for v in (x, y, z))
    if t == 0.0:
        return 0.0
    xt = space.geodesic(x, y)(t)
    d = space.distance
    return ((1.0 - t) * d(x, z) ** 2 + t * d(y, z) ** 2
            - t * (1.0 - t) * d(x, y) ** 2 - d(xt, z) ** 2)


def quasilinearization(space, x, z, y, w) -> float:
    """Pairing of the bound vectors ``xz`` and ``yw``.

    Sign convention chosen so that in euclidean space the value is the dot
    product ``(z - x) . (w - y)``.
    """
    x, z, y, w = (space.check_point(v) for v in (x, z, y, w))
    d = space.distance
    return 0.5 * (d(x, w) ** 2 + d(z, y) ** 2 - d(x, y) ** 2 - d(z, w) ** 2)


def constant_speed_defect(space, gamma: Geodesic, n: int = 32) -> float:
    """Worst ``|d(g(s), g(t)) - |s-t| L|`` over ``n`` evenly spaced parameters,
    scaled by ``1 + L``."""
    ts = [i / (n - 1) for i in range(n)]
    pts = [gamma(t) for t in ts]
    worst = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            err = abs(space.distance(pts[i], pts[j]) - (ts[j] - ts[i]) * gamma.length)
            worst = max(worst, err)
    return worst / (1.0 + gamma.length)
