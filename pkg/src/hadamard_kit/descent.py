"""Directional derivatives along geodesics and a steepest-descent loop."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

from .errors import DomainError, PreconditionError, SolverError
from .geometry import Geodesic
from .segments import segment_combine
from .spaces import DirectionFan, Euclidean, Hyperbolic2, TwoQuadrant, direction_fan

T0 = 0.25
LEVELS = 17
UPPER_NOTE = "trivial-direction derivative is a finite-fan upper estimate of the infimum"


def default_schedule(t0: float = T0, levels: int = LEVELS) -> tuple:
    return tuple(t0 * 2.0 ** (-k) for k in range(levels))


@dataclass(frozen=True)
class DerivativeEstimate:
    value: float
    schedule: tuple
    quotients: tuple
    extrapolated: tuple
    residual: float
    upper_estimate: bool = False

    def to_json(self):
        return {"value": self.value, "residual": self.residual, "upper_estimate": self.upper_estimate,
                "schedule": list(self.schedule), "quotients": list(self.quotients)}


def geodesic_derivative(space, f, x, gamma: Geodesic, schedule=None, fan_size: int = 16) -> DerivativeEstimate:
    """One-sided derivative of ``f`` at ``x`` along ``gamma``.

    Difference quotients ``(f(gamma(t)) - f(x)) / (t L)`` on a halving
    schedule, then one Richardson step ``2 Q_{k+1} - Q_k``.  The value is the
    last extrapolant and ``residual`` the gap to the one before it.
    """
    if space.distance(gamma.start, x) > 1e-9:
        raise PreconditionError("geodesic does not start at x")
    if gamma.length == 0.0:
        fan = direction_fan(space, x, fan_size)
        v = trivial_derivative(space, f, x, fan)
        return DerivativeEstimate(v, (), (), (), math.nan, upper_estimate=True)
    sched = default_schedule() if schedule is None else tuple(schedule)
    if len(sched) < 2 or any(not 0.0 < t <= 1.0 for t in sched):
        raise DomainError("schedule needs at least two parameters in (0, 1]")
    fx = f(x)
    L = gamma.length
    q = tuple((f(gamma(t)) - fx) / (t * L) for t in sched)
    # Richardson for halving steps; ratio-aware for general schedules
    rich = []
    for k in range(len(q) - 1):
        r = sched[k + 1] / sched[k]
        rich.append((q[k + 1] - r * q[k]) / (1.0 - r))
    value = rich[-1]
    resid = abs(rich[-1] - rich[-2]) if len(rich) > 1 else abs(q[-1] - q[-2])
    return DerivativeEstimate(value, sched, q, tuple(rich), resid)


def trivial_derivative(space, f, x, fan) -> float:
    """Minimum of the fan derivatives; an upper estimate of the infimum over
    all sequences of directions shrinking to the trivial one."""
    geods = fan.geodesics if isinstance(fan, DirectionFan) else tuple(fan)
    if not geods:
        raise PreconditionError("fan is empty")
    return min(geodesic_derivative(space, f, x, g).value for g in geods if g.length > 0.0)


@dataclass
class SteepestResult:
    gamma_min: Geodesic
    value_min: float
    gamma_max: Geodesic
    value_max: float
    label_min: str
    label_max: str
    values: list = field(default_factory=list)
    residual_min: float = 0.0


def _unit(space, x, g: Geodesic) -> Geodesic:
    return space.geodesic(x, g.at_arclength(1.0))


def _refine(space, f, x, cands: list, sign: float, rounds: int):
    """Angular bisection around the best candidate; ``sign=1`` minimises."""
    for r in range(rounds):
        ib = min(range(len(cands)), key=lambda i: (sign * cands[i][1], i))
        gb = cands[ib][0]
        near = sorted((space.distance(gb.end, c[0].end), i) for i, c in enumerate(cands) if i != ib)
        added = False
        for _, j in near[:2]:
            m = segment_combine(space, gb, cands[j][0], 0.5)
            if m.length <= 1e-12:
                continue
            m = _unit(space, x, m)
            est = geodesic_derivative(space, f, x, m)
            if math.isfinite(est.value):
                cands.append((m, est.value, f"{cands[ib][2]}/r{r}", est.residual))
                added = True
        if not added:
            break


def steepest_direction(space, f, x, fan, refine: int = 0) -> SteepestResult:
    """Best and worst fan directions by derivative, ties to the lowest index.

    ``refine`` rounds of angular bisection apply in euclidean, two-quadrant
    and hyperbolic spaces; tree fans already hold every edge direction.
    """
    geods = fan.geodesics if isinstance(fan, DirectionFan) else tuple(fan)
    if len(geods) < 2:
        raise PreconditionError("steepest direction needs at least two fan directions")
    return _steepest(space, f, x, fan, refine)


def _steepest(space, f, x, fan, refine):
    geods = fan.geodesics if isinstance(fan, DirectionFan) else tuple(fan)
    labels = fan.labels if isinstance(fan, DirectionFan) else tuple(f"d{i}" for i in range(len(geods)))
    if not geods:
        raise SolverError("no direction issues from this point")
    cands = []
    values = []
    for g, lab in zip(geods, labels):
        est = geodesic_derivative(space, f, x, g)
        values.append(est.value)
        if math.isfinite(est.value):
            cands.append((g, est.value, lab, est.residual))
    if not cands:
        raise SolverError("every derivative estimate is non-finite")
    out = {}
    for sign in (1.0, -1.0):
        pool = list(cands)
        if refine > 0 and isinstance(space, (Euclidean, TwoQuadrant, Hyperbolic2)):
            _refine(space, f, x, pool, sign, refine)
        ib = min(range(len(pool)), key=lambda i: (sign * pool[i][1], i))
        out[sign] = pool[ib]
    lo, hi = out[1.0], out[-1.0]
    return SteepestResult(lo[0], lo[1], hi[0], hi[1], lo[2], hi[2], values, lo[3])


# -- descent loop ------------------------------------------------------------------


@dataclass(frozen=True)
class DescentOptions:
    fan_size: int = 16
    max_iters: int = 500
    c: float = 1e-4
    beta: float = 0.5
    step0: float = 1.0
    tol: float = 1e-7
    refine: int = 4
    max_backtracks: int = 60
    seed: int = 0

    def __post_init__(self):
        if self.fan_size < 2:
            raise DomainError("fan_size must be at least 2")
        if self.max_iters < 0:
            raise DomainError("max_iters must be nonnegative")
        if not 0.0 < self.c < 1.0:
            raise DomainError("Armijo constant must lie in (0, 1)")
        if not 0.0 < self.beta < 1.0:
            raise DomainError("backtracking factor must lie in (0, 1)")
        if not self.step0 > 0.0 or not self.tol > 0.0:
            raise DomainError("step0 and tol must be positive")

    def to_json(self):
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


@dataclass
class DescentReport:
    iterates: list
    objectives: list
    directions: list = field(default_factory=list)
    steps: list = field(default_factory=list)
    derivatives: list = field(default_factory=list)
    clamped: list = field(default_factory=list)
    reason: str = "max_iters"
    final_derivative: float = math.nan
    options: DescentOptions | None = None

    @property
    def iterations(self) -> int:
        return len(self.steps)

    def summary(self) -> dict:
        return {"reason": self.reason, "iterations": self.iterations,
                "initial_objective": self.objectives[0], "final_objective": self.objectives[-1],
                "final_min_derivative": self.final_derivative,
                "clamped_steps": int(sum(self.clamped)), "notes": [UPPER_NOTE]}

    def to_json(self, space) -> dict:
        out = self.summary()
        out["final_point"] = space.point_to_json(self.iterates[-1])
        out["options"] = self.options.to_json() if self.options else None
        out["trace"] = [
            {"iteration": i + 1, "objective": self.objectives[i + 1], "step": self.steps[i],
             "direction": self.directions[i], "derivative": self.derivatives[i],
             "clamped": self.clamped[i], "point": space.point_to_json(self.iterates[i + 1])}
            for i in range(self.iterations)]
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["iteration", "objective", "step", "direction", "derivative"])
        w.writerow([0, repr(self.objectives[0]), "", "", ""])
        for i in range(self.iterations):
            w.writerow([i + 1, repr(self.objectives[i + 1]), repr(self.steps[i]),
                        self.directions[i], repr(self.derivatives[i])])
        return buf.getvalue()


def descent_minimize(space, f, x0, opts: DescentOptions | None = None) -> DescentReport:
    """Armijo backtracking along the steepest fan direction until the best
    directional derivative is at least ``-tol``."""
    opts = opts or DescentOptions()
    x = space.check_point(x0)
    fx = f(x)
    if not math.isfinite(fx):
        raise SolverError("objective is not finite at the starting point")
    rep = DescentReport([x], [fx], options=opts)
    for it in range(opts.max_iters):
        fan = direction_fan(space, x, opts.fan_size, seed=opts.seed * 100003 + it)
        best = _steepest(space, f, x, fan, opts.refine)
        v = best.value_min
        rep.final_derivative = v
        if v >= -opts.tol:
            rep.reason = "stationary"
            return rep
        g = best.gamma_min
        s = opts.step0
        accepted = None
        for _ in range(opts.max_backtracks):
            y = g.at_arclength(s)
            s_eff = space.distance(x, y)
            fy = f(y)
            if s_eff > 0.0 and fy <= fx + opts.c * s_eff * v:
                accepted = (y, fy, s_eff, s_eff < s * (1.0 - 1e-12))
                break
            s *= opts.beta
        if accepted is None:
            rep.reason = "line_search_failure"
            return rep
        x, fx, s_eff, clamp = accepted
        rep.iterates.append(x)
        rep.objectives.append(fx)
        rep.directions.append(best.label_min)
        rep.steps.append(s_eff)
        rep.derivatives.append(v)
        rep.clamped.append(clamp)
    rep.reason = "max_iters"
    return rep
