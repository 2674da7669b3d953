"""Sampled convergence diagnostics on finite traces.

Every limsup is estimated by a maximum over the last ``tail_window`` points
of a finite trace, and every "for all" quantifier over geodesics or points
is replaced by an explicit finite sample.  Verdicts therefore say
``holds_on_sample`` rather than claiming convergence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DomainError, PreconditionError
from .geometry import Geodesic, quasilinearization
from .projections import project_to_geodesic
from .spaces import DirectionFan, direction_fan, unit_cap

HOLDS = "holds_on_sample"
FAILS = "fails"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class SequenceTrace:
    points: tuple
    tail_window: int | None = None

    def __post_init__(self):
        pts = tuple(self.points)
        object.__setattr__(self, "points", pts)
        if len(pts) < 2:
            raise DomainError("a trace needs at least two points")
        w = self.tail_window if self.tail_window is not None else math.ceil(len(pts) / 4)
        if not 1 <= w <= len(pts):
            raise DomainError(f"tail window {w} outside [1, {len(pts)}]")
        object.__setattr__(self, "tail_window", int(w))

    def __len__(self):
        return len(self.points)

    @property
    def tail(self) -> tuple:
        return self.points[-self.tail_window:]

    @property
    def head(self) -> tuple:
        return self.points[:-self.tail_window]


@dataclass
class Verdict:
    status: str
    witnesses: list = field(default_factory=list)
    margins: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return self.status == HOLDS

    def to_json(self):
        return {"status": self.status, "witnesses": self.witnesses,
                "margins": self.margins, "notes": self.notes}


@dataclass(frozen=True)
class ElementarySet:
    """Points whose projections onto each geodesic land within ``radius`` of ``center``."""

    center: object
    radius: float
    geodesics: tuple

    def __post_init__(self):
        if not self.radius > 0.0:
            raise DomainError("elementary set radius must be positive")


def check_trace(space, trace: SequenceTrace) -> SequenceTrace:
    pts = tuple(space.check_point(p) for p in trace.points)
    return SequenceTrace(pts, trace.tail_window)


# -- asymptotic radius and center -------------------------------------------------


def asymptotic_radius(space, trace: SequenceTrace, y) -> float:
    y = space.check_point(y)
    return max(space.distance(p, y) for p in trace.tail)


@dataclass
class AsymptoticCenter:
    center: object
    radius: float
    status: str
    certified: bool
    report: object = None

    def to_json(self, space):
        out = {"center": space.point_to_json(self.center), "radius": self.radius,
               "status": self.status, "local_certificate": self.certified}
        if self.report is not None:
            out["descent"] = self.report.summary()
        return out


CERT_SCALES = (1e-1, 1e-2, 1e-3)
PAIR_TS = tuple(k / 20 for k in range(1, 20))


def _active_geodesics(space, trace, y, slack: float, cap: int = 4) -> list:
    """Geodesics from ``y`` toward the farthest tail points and toward points
    on the geodesics joining pairs of them.

    At a kink of the radius the downhill directions point into the region
    between the active points, which a fixed fan can miss entirely.
    """
    d = [space.distance(p, y) for p in trace.tail]
    r = max(d)
    order = sorted(range(len(d)), key=lambda i: -d[i])
    act = [trace.tail[i] for i in order[:cap] if d[i] >= r - slack]
    targets = list(act)
    for i in range(len(act)):
        for j in range(i + 1, len(act)):
            g = space.geodesic(act[i], act[j])
            targets.extend(g(t) for t in PAIR_TS)
    return [space.geodesic(y, z) for z in targets if space.distance(y, z) > 1e-12]


def _perturbations(space, trace, y, fan_size: int, s: float):
    for g in direction_fan(space, y, fan_size).geodesics:
        yield g.at_arclength(s * g.length)
    for g in _active_geodesics(space, trace, y, 2.0 * s):
        yield g.at_arclength(min(s, g.length))


def _compass_polish(space, trace, y, fan_size: int, max_moves: int = 4000):
    """Pattern search over fan and active-set perturbations.

    The radius is a max of distances, so descent can stall on a kink whose
    downhill direction falls between fan directions.  Moving to any better
    perturbation at shrinking scales fixes that.
    """
    r = asymptotic_radius(space, trace, y)
    scales = CERT_SCALES + (1e-4, 1e-5, 1e-6, 1e-7)
    moves = 0
    i = 0
    while i < len(scales) and moves < max_moves:
        moved = False
        for z in _perturbations(space, trace, y, fan_size, scales[i]):
            rz = asymptotic_radius(space, trace, z)
            if rz < r - 1e-15:
                y, r, moved = z, rz, True
                moves += 1
                break
        i = 0 if moved else i + 1
    return y


def asymptotic_center(space, trace: SequenceTrace, fan_size: int = 32, max_iters: int = 500,
                      tol: float = 1e-7, refine: int = 6) -> AsymptoticCenter:
    """Minimise ``y -> r(y)^2`` with geodesic steepest descent from the last trace point,
    then polish with a pattern search.

    ``certified`` reports whether no fan or active-set perturbation of the
    result (at a few radii) has a smaller asymptotic radius; the status is
    ``inconclusive`` without that certificate.
    """
    from .descent import DescentOptions, descent_minimize
    from .fields import AsymptoticRadiusSquared

    trace = check_trace(space, trace)
    f = AsymptoticRadiusSquared(space, trace.tail)
    opts = DescentOptions(fan_size=fan_size, max_iters=max_iters, tol=tol, refine=refine)
    rep = descent_minimize(space, f, trace.points[-1], opts)
    center = _compass_polish(space, trace, rep.iterates[-1], fan_size)
    radius = asymptotic_radius(space, trace, center)
    certified = all(asymptotic_radius(space, trace, z) >= radius - 1e-12
                    for s in CERT_SCALES for z in _perturbations(space, trace, center, fan_size, s))
    return AsymptoticCenter(center, radius, HOLDS if certified else INCONCLUSIVE, certified, rep)


# -- Delta convergence ------------------------------------------------------------


def _windows(n: int, w: int, strides: Sequence[int]) -> list:
    """Index sets approximating subsequences: suffix windows inside the tail
    and residue classes of the tail modulo small strides."""
    start = n - w
    out = []
    min_len = max(1, (w + 1) // 2)
    for m in range(start, n - min_len + 1):
        out.append(("suffix", m, list(range(m, n))))
    for s in strides:
        if w >= 2 * s:
            for r in range(s):
                idx = [i for i in range(start, n) if (i - start) % s == r]
                out.append((f"stride{s}", r, idx))
    return out


def default_competitors(space, trace: SequenceTrace, n_random: int = 64, seed: int = 0) -> list:
    rng = np.random.default_rng(seed)
    return [space.sample(rng) for _ in range(n_random)] + list(trace.points)


def delta_converges(space, trace: SequenceTrace, x, competitors=None, tol: float = 1e-8,
                    strides: Sequence[int] = (2, 3), seed: int = 0) -> Verdict:
    """Sampled Delta-convergence check.

    For each window of tail indices the limsup at ``x`` must not exceed the
    limsup at any competitor by more than ``tol``.
    """
    trace = check_trace(space, trace)
    x = space.check_point(x)
    if competitors is None:
        competitors = default_competitors(space, trace, seed=seed)
    competitors = [space.check_point(c) for c in competitors]
    if not competitors:
        raise PreconditionError("competitor sample is empty")
    pts = trace.points
    dx = [space.distance(p, x) for p in pts]
    dc = [[space.distance(p, c) for p in pts] for c in competitors]
    worst = math.inf
    witness = None
    for kind, key, idx in _windows(len(pts), trace.tail_window, strides):
        rx = max(dx[i] for i in idx)
        for ci, row in enumerate(dc):
            margin = max(row[i] for i in idx) - rx
            if margin < worst:
                worst = margin
                witness = {"window": kind, "start": key, "competitor": ci,
                           "limsup_at_x": rx, "limsup_at_competitor": rx + margin}
    notes = ["subsequences approximated by suffix windows and stride classes of the tail",
             f"tail_window={trace.tail_window}"]
    status = HOLDS if worst >= -tol else FAILS
    return Verdict(status, [witness] if status == FAILS else [],
                   {"min_margin": worst, "tol": tol}, notes)


# -- weak convergence -----------------------------------------------------------------


def trace_fan(space, x, trace: SequenceTrace, cap: float | None = None) -> DirectionFan:
    """Geodesics from ``x`` toward the trace points that precede the tail window.

    These directions are fixed before the tail, so they play the role of the
    fixed geodesics in the definition of weak convergence.
    """
    x = space.check_point(x)
    geods = []
    for p in trace.head:
        if space.distance(x, p) <= 1e-12:
            continue
        g = unit_cap(space, x, p, cap) if cap is not None else space.geodesic(x, p)
        if any(space.distance(g.end, h.end) <= 1e-12 for h in geods):
            continue
        geods.append(g)
    return DirectionFan(x, tuple(geods), tuple(f"head{i}" for i in range(len(geods))))


def _as_fan(space, x, fan) -> DirectionFan:
    if isinstance(fan, DirectionFan):
        geods = fan.geodesics
    else:
        geods = tuple(fan)
    for g in geods:
        if space.distance(g.start, x) > 1e-9:
            raise PreconditionError("fan geodesic does not start at the candidate limit")
    labels = fan.labels if isinstance(fan, DirectionFan) else tuple(f"g{i}" for i in range(len(geods)))
    return DirectionFan(x, geods, labels)


def projection_profile(space, trace: SequenceTrace, x, g: Geodesic) -> list:
    return [space.distance(x, project_to_geodesic(space, g, p).foot) for p in trace.tail]


def weak_converges(space, trace: SequenceTrace, x, fan, decay_tol: float = 1e-6) -> Verdict:
    """Check ``d(x, P_g x_n) <= decay_tol`` over the tail for every fan geodesic ``g``."""
    trace = check_trace(space, trace)
    x = space.check_point(x)
    fan = _as_fan(space, x, fan)
    if not fan.geodesics:
        raise PreconditionError("fan is empty")
    worst = 0.0
    witnesses = []
    profiles = {}
    n0 = len(trace) - trace.tail_window
    for label, g in zip(fan.labels, fan.geodesics):
        prof = projection_profile(space, trace, x, g)
        profiles[label] = max(prof)
        worst = max(worst, max(prof))
        if max(prof) > decay_tol:
            i = int(np.argmax(prof))
            witnesses.append({"geodesic": label, "index": n0 + i, "projection_distance": prof[i]})
    status = HOLDS if worst <= decay_tol else FAILS
    notes = [f"finite fan of {len(fan.geodesics)} geodesics", f"tail_window={trace.tail_window}"]
    return Verdict(status, witnesses[:1] if status == FAILS else [],
                   {"max_projection_distance": worst, "decay_tol": decay_tol,
                    "per_geodesic": profiles}, notes)


def elementary_set_contains(space, U: ElementarySet, y) -> bool:
    y = space.check_point(y)
    for g in U.geodesics:
        if not space.distance(U.center, project_to_geodesic(space, g, y).foot) < U.radius:
            return False
    return True


def boundedness(space, trace: SequenceTrace, x, tol: float = 1e-9) -> dict:
    """Compare distances from ``x`` on the tail against the head of the trace.

    Growth in the tail beyond every earlier distance is flagged ``unbounded``.
    """
    x = space.check_point(x)
    d = [space.distance(x, p) for p in trace.points]
    head = d[:-trace.tail_window] or [0.0]
    tail = d[-trace.tail_window:]
    flag = "unbounded" if max(tail) > max(head) + tol and tail[-1] >= max(tail) - tol else "bounded"
    return {"flag": flag, "max_distance": max(d), "head_max": max(head), "tail_max": max(tail)}


# -- weakly proper witness search ----------------------------------------------------


@dataclass
class WitnessBudget:
    k: int = 4
    samples: int = 400
    halvings: int = 6
    seed: int = 0


@dataclass
class WitnessReport:
    status: str  # "found" | "counterexample" | "exhausted"
    delta: float | None = None
    fan: tuple = ()
    counterexample: object = None
    tried: int = 0

    def to_json(self, space):
        return {"status": self.status, "delta": self.delta,
                "fan_endpoints": [space.point_to_json(g.end) for g in self.fan],
                "counterexample": None if self.counterexample is None
                else space.point_to_json(self.counterexample),
                "tried": self.tried}


def _parallel_candidate(space, at, gamma: Geodesic):
    from .spaces import Euclidean

    if isinstance(space, Euclidean):
        end = tuple(a + (e - s) for a, s, e in zip(at, gamma.start, gamma.end))
        return space.geodesic(at, end)
    return None


def _propose(space, at, rng, scale: float):
    z = space.sample(rng)
    g = space.geodesic(at, z)
    if g.length == 0.0:
        return z
    r = rng.uniform()
    if r < 0.4:
        return z
    s = scale * float(rng.uniform()) * (10.0 if r < 0.6 else 1.0)
    return g.at_arclength(s)


def weakly_proper_witness_search(space, x, epsilon: float, gamma: Geodesic, budget: WitnessBudget | None = None,
                                 at=None) -> WitnessReport:
    """Look for ``delta`` and geodesics ``eta_1..eta_k`` from ``at`` (default ``x``)
    such that a Monte-Carlo sample of ``U_at(delta; eta)`` lies inside ``U_x(epsilon; gamma)``."""
    budget = budget or WitnessBudget()
    if not epsilon > 0.0:
        raise DomainError("epsilon must be positive")
    x = space.check_point(x)
    if space.distance(gamma.start, x) > 1e-9:
        raise PreconditionError("gamma does not start at x")
    at = x if at is None else space.check_point(at)
    target = ElementarySet(x, epsilon, (gamma,))
    if not elementary_set_contains(space, target, at):
        raise PreconditionError("base point is not in the elementary set")
    if budget.k < 1 or budget.samples < 1:
        return WitnessReport("exhausted")
    candidates = []
    par = _parallel_candidate(space, at, gamma)
    if par is not None and par.length > 0:
        candidates.append(par)
    if space.distance(at, x) <= 1e-12:
        candidates.append(gamma)
    else:
        candidates.append(space.geodesic(at, x))
    if space.distance(at, gamma.end) > 1e-12:
        candidates.append(space.geodesic(at, gamma.end))
    candidates.extend(direction_fan(space, at, 8).geodesics)
    rng = np.random.default_rng(budget.seed)
    tried = 0
    counter = None
    judged = False
    for k in range(1, min(budget.k, len(candidates)) + 1):
        fan = tuple(candidates[:k])
        for j in range(budget.halvings + 1):
            delta = epsilon * 2.0 ** (-j)
            U = ElementarySet(at, delta, fan)
            tried += 1
            accepted = 0
            bad = None
            for _ in range(budget.samples * 20):
                z = _propose(space, at, rng, max(delta, epsilon))
                if not elementary_set_contains(space, U, z):
                    continue
                accepted += 1
                if not elementary_set_contains(space, target, z):
                    bad = z
                    break
                if accepted >= budget.samples:
                    break
            if bad is not None:
                counter = bad
                judged = True
                continue
            if accepted >= budget.samples:
                return WitnessReport("found", delta, fan, None, tried)
    if judged:
        return WitnessReport("counterexample", None, (), counter, tried)
    return WitnessReport("exhausted", None, (), None, tried)


# -- Kakavandi convergence -------------------------------------------------------------


def kakavandi_converges(space, trace: SequenceTrace, x, test_points, tol: float = 1e-6) -> Verdict:
    """Tail maxima of ``|<x x_n, x y>|`` over the test points must stay below ``tol``."""
    trace = check_trace(space, trace)
    x = space.check_point(x)
    test_points = [space.check_point(y) for y in test_points]
    if not test_points:
        raise PreconditionError("test point sample is empty")
    n0 = len(trace) - trace.tail_window
    worst = 0.0
    witness = None
    for j, y in enumerate(test_points):
        for i, p in enumerate(trace.tail):
            v = abs(quasilinearization(space, x, p, x, y))
            if v > worst:
                worst = v
                witness = {"test_point": j, "index": n0 + i, "value": v}
    status = HOLDS if worst <= tol else FAILS
    return Verdict(status, [witness] if status == FAILS else [],
                   {"max_abs_pairing": worst, "tol": tol},
                   [f"{len(test_points)} test points", f"tail_window={trace.tail_window}"])
