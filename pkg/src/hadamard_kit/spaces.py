"""Concrete Hadamard spaces: constructors, validators, samplers and direction fans.

Six kinds ship:

* ``Euclidean(dim)`` -- points are tuples of floats.
* ``MetricTree(vertices, edges)`` -- points are ``TreePoint(edge, offset)``.
* ``MonodTree(num_rays)`` -- hub ``"o"`` with ray ``k`` a single edge of length ``k``.
* ``Product(left, right)`` -- points are ``ProductPoint(left, right)``, l2 metric.
* ``TwoQuadrant()`` -- the closed squares ``[0,1]^2`` and ``[-1,0]^2`` glued at
  the origin, with the induced length metric.
* ``Hyperbolic2()`` -- the hyperboloid model, points ``(x0, x1, x2)``.

Sampling regions are bounded: ``[-1, 1]^n`` for Euclidean space, the whole
tree (edges weighted by length), both squares, and the hyperbolic disk of
radius 3 around ``(1, 0, 0)``.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import ConstructionError, DomainError, SpaceMismatchError
from .geometry import Geodesic, constant_speed_defect, cat0_quadratic_residual

COORD_TOL = 1e-12
HYPERBOLOID_TOL = 1e-9


class TreePoint(NamedTuple):
    """Location on a metric tree: ``offset`` measured from the edge's first vertex."""

    edge: int
    offset: float


class ProductPoint(NamedTuple):
    left: object
    right: object


@dataclass
class Sampler:
    """Seeded point stream.  Identical seeds give identical streams.

    Instances are not safe to share between threads; give each worker its own.
    """

    seed: int = 0
    rng: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self):
        self.rng = np.random.default_rng(self.seed)


@dataclass(frozen=True)
class DirectionFan:
    """Finite set of geodesics issuing from ``base``."""

    base: object
    geodesics: tuple
    labels: tuple
    truncated: bool = False

    def __len__(self):
        return len(self.geodesics)

    def __iter__(self):
        return iter(self.geodesics)


class Space:
    """Interface shared by the model spaces.

    ``distance`` and ``geodesic`` assume already-validated points; use
    :meth:`check_point` (or the functions in :mod:`hadamard_kit.geometry`)
    at API boundaries.
    """

    kind = "abstract"

    def check_point(self, p):
        raise NotImplementedError

    def distance(self, p, q) -> float:
        raise NotImplementedError

    def geodesic(self, p, q) -> Geodesic:
        raise NotImplementedError

    def _geodesic_point(self, g: Geodesic, t: float):
        raise NotImplementedError

    def reach(self, g: Geodesic) -> float:
        """Longest arclength the geodesic can be prolonged to (at least its length)."""
        return g.length

    def _extend_point(self, g: Geodesic, s: float):
        return g.end

    def sample(self, rng: np.random.Generator):
        raise NotImplementedError

    def fan_endpoints(self, x, k: int, rng=None) -> list:
        raise NotImplementedError

    def same_point(self, p, q, tol: float = COORD_TOL) -> bool:
        return self.distance(p, q) <= tol

    def to_json(self) -> dict:
        raise NotImplementedError

    def point_to_json(self, p):
        raise NotImplementedError

    def point_from_json(self, obj):
        raise NotImplementedError

    def __eq__(self, other):
        return type(self) is type(other) and self.to_json() == other.to_json()

    def __hash__(self):
        return hash(repr(self.to_json()))

    def __repr__(self):
        return f"{type(self).__name__}({self.to_json()!r})"


def _coords(p, n: int, kind: str) -> tuple:
    if isinstance(p, (TreePoint, ProductPoint, str)):
        raise SpaceMismatchError(f"{type(p).__name__} is not a {kind} point")
    try:
        c = tuple(float(v) for v in p)
    except TypeError as exc:
        raise SpaceMismatchError(f"{p!r} is not a {kind} point") from exc
    if len(c) != n:
        raise SpaceMismatchError(f"{kind} point needs {n} coordinates, got {len(c)}")
    if not all(math.isfinite(v) for v in c):
        raise DomainError(f"non-finite coordinates {c!r}")
    return c


def _lerp(a: tuple, b: tuple, t: float) -> tuple:
    return tuple(u + t * (v - u) for u, v in zip(a, b))


def _norm(a) -> float:
    return math.sqrt(sum(v * v for v in a))


# --------------------------------------------------------------------------
# Euclidean space


class Euclidean(Space):
    kind = "euclidean"

    def __init__(self, dim: int):
        if int(dim) != dim or dim < 1:
            raise ConstructionError(f"dimension must be a positive integer, got {dim!r}")
        self.dim = int(dim)

    def check_point(self, p):
        return _coords(p, self.dim, self.kind)

    def distance(self, p, q):
        return math.dist(p, q)

    def geodesic(self, p, q):
        return Geodesic(self, p, q, math.dist(p, q))

    def _geodesic_point(self, g, t):
        return _lerp(g.start, g.end, t)

    def reach(self, g):
        return math.inf if g.length > 0 else 0.0

    def _extend_point(self, g, s):
        return _lerp(g.start, g.end, s / g.length)

    def sample(self, rng):
        return tuple(float(v) for v in rng.uniform(-1.0, 1.0, self.dim))

    def unit_directions(self, k: int, rng=None) -> list:
        """``k`` unit vectors spread over the sphere, optionally jittered."""
        n = self.dim
        if n == 1:
            return [(1.0,), (-1.0,)]
        if n == 2:
            phase = 0.0 if rng is None else float(rng.uniform(0.0, 2.0 * math.pi / k))
            return [(math.cos(phase + 2 * math.pi * j / k), math.sin(phase + 2 * math.pi * j / k))
                    for j in range(k)]
        dirs = []
        for i in range(n):
            for sign in (1.0, -1.0):
                e = [0.0] * n
                e[i] = sign
                dirs.append(tuple(e))
        if k > len(dirs):
            from scipy.stats import norm, qmc

            pts = qmc.Halton(d=n, scramble=False).random(k - len(dirs) + 1)[1:]
            for u in pts:
                v = norm.ppf(np.clip(u, 1e-9, 1 - 1e-9))
                dirs.append(tuple(float(c) for c in v / np.linalg.norm(v)))
        dirs = dirs[:max(k, 2)]
        if rng is not None:
            jittered = []
            for d in dirs:
                v = np.asarray(d) + 1e-3 * rng.standard_normal(n)
                jittered.append(tuple(float(c) for c in v / np.linalg.norm(v)))
            dirs = jittered
        return dirs

    def fan_endpoints(self, x, k, rng=None):
        return [tuple(a + b for a, b in zip(x, u)) for u in self.unit_directions(k, rng)]

    def to_json(self):
        return {"kind": self.kind, "dim": self.dim}

    def point_to_json(self, p):
        return {"coords": list(p)}

    def point_from_json(self, obj):
        return self.check_point(obj["coords"])


# --------------------------------------------------------------------------
# Metric trees


class MetricTree(Space):
    """Finite metric tree given by named vertices and weighted edges."""

    kind = "metric_tree"

    def __init__(self, vertices, edges):
        vertices = [str(v) for v in vertices]
        if not vertices:
            raise ConstructionError("a tree needs at least one vertex")
        if len(set(vertices)) != len(vertices):
            raise ConstructionError("duplicate vertex ids")
        index = {v: i for i, v in enumerate(vertices)}
        clean = []
        for e in edges:
            try:
                u, v, length = e
            except (TypeError, ValueError) as exc:
                raise ConstructionError(f"edge {e!r} is not (u, v, length)") from exc
            u, v = str(u), str(v)
            if u not in index or v not in index:
                raise ConstructionError(f"edge {e!r} references an unknown vertex")
            if u == v:
                raise ConstructionError(f"edge {e!r} is a loop")
            length = float(length)
            if not math.isfinite(length) or length <= 0.0:
                raise ConstructionError(f"edge {e!r} must have positive finite length")
            clean.append((u, v, length))
        if not clean:
            raise ConstructionError("a tree needs at least one edge")
        if len(clean) != len(vertices) - 1:
            raise ConstructionError(
                f"{len(clean)} edges on {len(vertices)} vertices: a tree has exactly |V|-1 edges")
        self.vertices = tuple(vertices)
        self.edges = tuple(clean)
        self.index = index
        self._ends = [(index[u], index[v], length) for u, v, length in clean]
        adj = [[] for _ in vertices]
        for ei, (a, b, _) in enumerate(self._ends):
            adj[a].append((ei, b))
            adj[b].append((ei, a))
        self._adj = adj
        # next_hop[b][a] = (edge, neighbour of a one step closer to b)
        n = len(vertices)
        self._dist = [[math.inf] * n for _ in range(n)]
        self._next = [[None] * n for _ in range(n)]
        for root in range(n):
            dist = self._dist[root]
            nxt = self._next[root]
            dist[root] = 0.0
            queue = deque([root])
            while queue:
                w = queue.popleft()
                for ei, o in adj[w]:
                    if dist[o] == math.inf:
                        dist[o] = dist[w] + self._ends[ei][2]
                        nxt[o] = (ei, w)
                        queue.append(o)
            if any(d == math.inf for d in dist):
                raise ConstructionError("tree graph is not connected")

    # -- points ---------------------------------------------------------

    def vertex_point(self, name) -> TreePoint:
        i = self.index.get(str(name))
        if i is None:
            raise SpaceMismatchError(f"unknown vertex {name!r}")
        ei, _ = self._adj[i][0]
        a, _, length = self._ends[ei]
        return TreePoint(ei, 0.0 if a == i else length)

    def vertex_of(self, p: TreePoint, tol: float = COORD_TOL):
        """Index of the vertex ``p`` sits on, or ``None`` for edge-interior points."""
        a, b, length = self._ends[p.edge]
        if p.offset <= tol:
            return a
        if p.offset >= length - tol:
            return b
        return None

    def check_point(self, p):
        if isinstance(p, str):
            return self.vertex_point(p)
        if not isinstance(p, TreePoint):
            raise SpaceMismatchError(f"{p!r} is not a tree point")
        if not 0 <= p.edge < len(self._ends):
            raise SpaceMismatchError(f"edge index {p.edge} out of range")
        length = self._ends[p.edge][2]
        off = float(p.offset)
        if not (-COORD_TOL <= off <= length + COORD_TOL):
            raise DomainError(f"offset {off} outside [0, {length}] on edge {p.edge}")
        return TreePoint(p.edge, min(max(off, 0.0), length))

    def _exits(self, p):
        a, b, length = self._ends[p.edge]
        return ((a, p.offset), (b, length - p.offset))

    def distance(self, p, q):
        if p.edge == q.edge:
            return abs(p.offset - q.offset)
        if p.edge > q.edge:
            # fixed summation order keeps the metric bitwise symmetric
            p, q = q, p
        best = math.inf
        for a, ca in self._exits(p):
            row = self._dist[a]
            for b, cb in self._exits(q):
                d = ca + row[b] + cb
                if d < best:
                    best = d
        return best

    def distance_to_vertex(self, p, v: int) -> float:
        a, b, length = self._ends[p.edge]
        return min(p.offset + self._dist[a][v], length - p.offset + self._dist[b][v])

    def _legs(self, p, q):
        """Pieces ``(edge, from_offset, to_offset)`` of the path from p to q."""
        if p.edge == q.edge:
            return [(p.edge, p.offset, q.offset)]
        best = None
        for a, ca in self._exits(p):
            for b, cb in self._exits(q):
                d = ca + self._dist[a][b] + cb
                if best is None or d < best[0]:
                    best = (d, a, b)
        _, a, b = best
        legs = [(p.edge, p.offset, self._vertex_offset(p.edge, a))]
        w = a
        nxt = self._next[b]
        while w != b:
            ei, o = nxt[w]
            legs.append((ei, self._vertex_offset(ei, w), self._vertex_offset(ei, o)))
            w = o
        legs.append((q.edge, self._vertex_offset(q.edge, b), q.offset))
        return [leg for leg in legs if leg[1] != leg[2]] or [legs[0]]

    def _vertex_offset(self, ei, v):
        a, _, length = self._ends[ei]
        return 0.0 if a == v else length

    def geodesic(self, p, q):
        legs = self._legs(p, q)
        cum = [0.0]
        for _, f, t in legs:
            cum.append(cum[-1] + abs(t - f))
        return Geodesic(self, p, q, self.distance(p, q), data=(legs, cum))

    def _geodesic_point(self, g, t):
        legs, cum = g.data
        s = t * cum[-1]
        i = 0
        while i < len(legs) - 1 and s > cum[i + 1]:
            i += 1
        ei, f, to = legs[i]
        step = s - cum[i]
        off = f + step if to >= f else f - step
        lo, hi = (f, to) if f <= to else (to, f)
        return TreePoint(ei, min(max(off, lo), hi))

    def reach(self, g):
        if g.length == 0.0:
            return 0.0
        ei, f, to = g.data[0][-1]
        length = self._ends[ei][2]
        return g.length + (length - to if to > f else to)

    def _extend_point(self, g, s):
        ei, f, to = g.data[0][-1]
        extra = s - g.length
        length = self._ends[ei][2]
        off = to + extra if to > f else to - extra
        return TreePoint(ei, min(max(off, 0.0), length))

    def sample(self, rng):
        lengths = np.array([e[2] for e in self._ends])
        if rng.uniform() < 0.1:
            v = int(rng.integers(len(self.vertices)))
            return self.vertex_point(self.vertices[v])
        ei = int(rng.choice(len(lengths), p=lengths / lengths.sum()))
        return TreePoint(ei, float(rng.uniform(0.0, lengths[ei])))

    def fan_endpoints(self, x, k, rng=None):
        v = self.vertex_of(x)
        out = []
        if v is None:
            length = self._ends[x.edge][2]
            out.append(TreePoint(x.edge, max(0.0, x.offset - 1.0)))
            out.append(TreePoint(x.edge, min(length, x.offset + 1.0)))
            return out
        for ei, _ in self._adj[v]:
            a, _, length = self._ends[ei]
            out.append(TreePoint(ei, min(1.0, length) if a == v else length - min(1.0, length)))
        return out

    def same_point(self, p, q, tol=COORD_TOL):
        return self.distance(p, q) <= tol

    def to_json(self):
        return {"kind": self.kind, "vertices": list(self.vertices),
                "edges": [[u, v, length] for u, v, length in self.edges]}

    def point_to_json(self, p):
        v = self.vertex_of(p, tol=0.0)
        if v is not None:
            return {"vertex": self.vertices[v]}
        return {"edge": p.edge, "offset": p.offset}

    def point_from_json(self, obj):
        if "vertex" in obj:
            return self.vertex_point(obj["vertex"])
        return self.check_point(TreePoint(int(obj["edge"]), float(obj["offset"])))


def tripod(leg: float = 1.0) -> MetricTree:
    """Star with hub ``"o"`` and three legs ``"a"``, ``"b"``, ``"c"``."""
    return MetricTree(["o", "a", "b", "c"], [("o", "a", leg), ("o", "b", leg), ("o", "c", leg)])


class MonodTree(MetricTree):
    """Truncated simplicial tree: hub ``"o"`` and rays ``r1..rN`` of lengths ``1..N``."""

    kind = "monod_tree"

    def __init__(self, num_rays: int):
        if int(num_rays) != num_rays or num_rays < 1:
            raise ConstructionError(f"num_rays must be a positive integer, got {num_rays!r}")
        self.num_rays = int(num_rays)
        rays = range(1, self.num_rays + 1)
        super().__init__(["o"] + [f"r{k}" for k in rays], [("o", f"r{k}", float(k)) for k in rays])

    @property
    def hub(self) -> TreePoint:
        return TreePoint(0, 0.0)

    def tip(self, k: int) -> TreePoint:
        return TreePoint(k - 1, float(k))

    def to_json(self):
        return {"kind": self.kind, "num_rays": self.num_rays}


# --------------------------------------------------------------------------
# Products


class Product(Space):
    kind = "product"

    def __init__(self, left: Space, right: Space):
        if not isinstance(left, Space) or not isinstance(right, Space):
            raise ConstructionError("product components must be spaces")
        self.left = left
        self.right = right

    def check_point(self, p):
        if not isinstance(p, ProductPoint):
            if isinstance(p, (tuple, list)) and len(p) == 2 and not isinstance(p, TreePoint):
                p = ProductPoint(*p)
            else:
                raise SpaceMismatchError(f"{p!r} is not a product point")
        return ProductPoint(self.left.check_point(p.left), self.right.check_point(p.right))

    def distance(self, p, q):
        return math.hypot(self.left.distance(p.left, q.left), self.right.distance(p.right, q.right))

    def geodesic(self, p, q):
        gl = self.left.geodesic(p.left, q.left)
        gr = self.right.geodesic(p.right, q.right)
        return Geodesic(self, p, q, math.hypot(gl.length, gr.length), data=(gl, gr))

    def _geodesic_point(self, g, t):
        gl, gr = g.data
        return ProductPoint(gl(t), gr(t))

    def reach(self, g):
        if g.length == 0.0:
            return 0.0
        ratio = math.inf
        for comp in g.data:
            if comp.length > 0.0:
                ratio = min(ratio, comp.space.reach(comp) / comp.length)
        return g.length * ratio

    def _extend_point(self, g, s):
        t = s / g.length
        gl, gr = g.data
        return ProductPoint(gl.at_arclength(t * gl.length), gr.at_arclength(t * gr.length))

    def sample(self, rng):
        return ProductPoint(self.left.sample(rng), self.right.sample(rng))

    def fan_endpoints(self, x, k, rng=None):
        left = self.left.fan_endpoints(x.left, k, rng)
        right = self.right.fan_endpoints(x.right, k, rng)
        pure = [ProductPoint(a, x.right) for a in left] + [ProductPoint(x.left, b) for b in right]
        mixed = [ProductPoint(a, b) for a in left for b in right]
        return (pure + mixed)[:max(k, len(pure))]

    def to_json(self):
        return {"kind": self.kind, "left": self.left.to_json(), "right": self.right.to_json()}

    def point_to_json(self, p):
        return {"left": self.left.point_to_json(p.left), "right": self.right.point_to_json(p.right)}

    def point_from_json(self, obj):
        return ProductPoint(self.left.point_from_json(obj["left"]),
                            self.right.point_from_json(obj["right"]))


# --------------------------------------------------------------------------
# Two closed squares glued at the origin


class TwoQuadrant(Space):
    """``[0,1]^2`` union ``[-1,0]^2`` with the length metric.

    Same-square pairs are joined by the straight segment; otherwise the
    geodesic runs through the origin and ``d(p, q) = |p| + |q|``.
    """

    kind = "two_quadrant"

    @staticmethod
    def square_of(p) -> int:
        """+1 for the positive square, -1 for the negative one, 0 for the origin."""
        if p[0] == 0.0 and p[1] == 0.0:
            return 0
        return 1 if p[0] >= 0.0 and p[1] >= 0.0 else -1

    def check_point(self, p):
        c = _coords(p, 2, self.kind)
        x1, x2 = c
        if -COORD_TOL <= x1 <= 1 + COORD_TOL and -COORD_TOL <= x2 <= 1 + COORD_TOL:
            return (min(max(x1, 0.0), 1.0), min(max(x2, 0.0), 1.0))
        if -1 - COORD_TOL <= x1 <= COORD_TOL and -1 - COORD_TOL <= x2 <= COORD_TOL:
            return (min(max(x1, -1.0), 0.0), min(max(x2, -1.0), 0.0))
        raise DomainError(f"{c!r} lies in neither closed square")

    def _same_square(self, p, q):
        a, b = self.square_of(p), self.square_of(q)
        return a == 0 or b == 0 or a == b

    def distance(self, p, q):
        if self._same_square(p, q):
            return math.dist(p, q)
        return math.hypot(*p) + math.hypot(*q)

    def geodesic(self, p, q):
        if self._same_square(p, q):
            return Geodesic(self, p, q, math.dist(p, q), data=None)
        np_, nq = math.hypot(*p), math.hypot(*q)
        return Geodesic(self, p, q, np_ + nq, data=(np_, nq))

    def _geodesic_point(self, g, t):
        if g.data is None:
            return _lerp(g.start, g.end, t)
        np_, nq = g.data
        s = t * (np_ + nq)
        if s <= np_:
            f = 1.0 - s / np_
            return (g.start[0] * f, g.start[1] * f)
        f = (s - np_) / nq
        return (g.end[0] * f, g.end[1] * f)

    @staticmethod
    def _box_exit(x, u, sign) -> float:
        lo, hi = (0.0, 1.0) if sign > 0 else (-1.0, 0.0)
        s = math.inf
        for xi, ui in zip(x, u):
            if ui > 0:
                s = min(s, (hi - xi) / ui)
            elif ui < 0:
                s = min(s, (lo - xi) / ui)
        return max(s, 0.0)

    def ray_reach(self, x, u) -> float:
        """Arclength a straight ray from ``x`` along unit ``u`` stays inside the space."""
        sq = self.square_of(x)
        if sq == 0:
            if u[0] >= -COORD_TOL and u[1] >= -COORD_TOL:
                sq = 1
            elif u[0] <= COORD_TOL and u[1] <= COORD_TOL:
                sq = -1
            else:
                return 0.0
        s = self._box_exit(x, u, sq)
        end = (x[0] + s * u[0], x[1] + s * u[1])
        if s > 0 and math.hypot(*end) <= 1e-12:
            other = -sq
            if (other > 0 and u[0] >= 0 and u[1] >= 0) or (other < 0 and u[0] <= 0 and u[1] <= 0):
                s += self._box_exit((0.0, 0.0), u, other)
        return s

    def reach(self, g):
        if g.length == 0.0:
            return 0.0
        if g.data is None:
            u = ((g.end[0] - g.start[0]) / g.length, (g.end[1] - g.start[1]) / g.length)
            return max(g.length, self.ray_reach(g.start, u))
        nq = g.data[1]
        u = (g.end[0] / nq, g.end[1] / nq)
        return g.length + self._box_exit(g.end, u, self.square_of(g.end))

    def _extend_point(self, g, s):
        if g.data is None:
            t = s / g.length
            x, y = _lerp(g.start, g.end, t)
        else:
            np_, nq = g.data
            f = (s - np_) / nq
            x, y = g.end[0] * f, g.end[1] * f
        return self.check_point((x, y))

    def sample(self, rng):
        r = rng.uniform()
        if r < 0.02:
            return (0.0, 0.0)
        sign = 1.0 if rng.uniform() < 0.5 else -1.0
        x1, x2 = rng.uniform(0.0, 1.0, 2)
        if r < 0.07:
            # boundary points keep the axis cases exercised
            x1 = 0.0
        return (sign * float(x1), sign * float(x2))

    def fan_endpoints(self, x, k, rng=None):
        out = []
        if self.square_of(x) == 0:
            m = max(2, k // 2)
            for base in (0.0, math.pi):
                for j in range(m):
                    th = base + 0.5 * math.pi * j / (m - 1)
                    out.append((math.cos(th), math.sin(th)))
            return [self.check_point((round(a, 15), round(b, 15))) for a, b in out]
        phase = 0.0 if rng is None else float(rng.uniform(0.0, 2.0 * math.pi / k))
        for j in range(k):
            th = phase + 2.0 * math.pi * j / k
            u = (math.cos(th), math.sin(th))
            s = min(1.0, self.ray_reach(x, u))
            if s > 1e-12:
                out.append(self.check_point((x[0] + s * u[0], x[1] + s * u[1])))
        return out

    def to_json(self):
        return {"kind": self.kind}

    def point_to_json(self, p):
        return {"coords": list(p)}

    def point_from_json(self, obj):
        return self.check_point(obj["coords"])


# --------------------------------------------------------------------------
# Hyperbolic plane, hyperboloid model


def minkowski(p, q) -> float:
    return -p[0] * q[0] + p[1] * q[1] + p[2] * q[2]


def _lift(x1: float, x2: float) -> tuple:
    return (math.sqrt(1.0 + x1 * x1 + x2 * x2), x1, x2)


class Hyperbolic2(Space):
    kind = "hyperbolic2"
    sample_radius = 3.0

    def check_point(self, p):
        c = _coords(p, 3, self.kind)
        if c[0] <= 0.0:
            raise DomainError(f"{c!r} is on the lower sheet")
        defect = c[0] ** 2 - c[1] ** 2 - c[2] ** 2 - 1.0
        if abs(defect) > HYPERBOLOID_TOL * (1.0 + c[0] ** 2):
            raise DomainError(f"{c!r} is off the hyperboloid (defect {defect:.3e})")
        return _lift(c[1], c[2])

    def distance(self, p, q):
        diff = (p[0] - q[0], p[1] - q[1], p[2] - q[2])
        return 2.0 * math.asinh(0.5 * math.sqrt(max(0.0, minkowski(diff, diff))))

    def geodesic(self, p, q):
        return Geodesic(self, p, q, self.distance(p, q))

    def _point_at(self, g, t):
        d = g.length
        sd = math.sinh(d)
        a = math.sinh((1.0 - t) * d) / sd
        b = math.sinh(t * d) / sd
        p, q = g.start, g.end
        return _lift(a * p[1] + b * q[1], a * p[2] + b * q[2])

    def _geodesic_point(self, g, t):
        return self._point_at(g, t)

    def reach(self, g):
        return math.inf if g.length > 0 else 0.0

    def _extend_point(self, g, s):
        return self._point_at(g, s / g.length)

    def tangent_basis(self, x):
        basis = []
        for v in ((0.0, 1.0, 0.0), (0.0, 0.0, 1.0)):
            w = [vi + minkowski(x, v) * xi for vi, xi in zip(v, x)]
            for e in basis:
                c = minkowski(w, e)
                w = [wi - c * ei for wi, ei in zip(w, e)]
            n = math.sqrt(minkowski(w, w))
            basis.append(tuple(wi / n for wi in w))
        return basis

    def exp(self, x, v):
        n = math.sqrt(max(0.0, minkowski(v, v)))
        if n == 0.0:
            return x
        ch, sh = math.cosh(n), math.sinh(n)
        return _lift(ch * x[1] + sh * v[1] / n, ch * x[2] + sh * v[2] / n)

    def sample(self, rng):
        r = self.sample_radius * math.sqrt(rng.uniform())
        th = rng.uniform(0.0, 2.0 * math.pi)
        return _lift(math.sinh(r) * math.cos(th), math.sinh(r) * math.sin(th))

    def fan_endpoints(self, x, k, rng=None):
        e1, e2 = self.tangent_basis(x)
        phase = 0.0 if rng is None else float(rng.uniform(0.0, 2.0 * math.pi / k))
        out = []
        for j in range(k):
            th = phase + 2.0 * math.pi * j / k
            v = tuple(math.cos(th) * a + math.sin(th) * b for a, b in zip(e1, e2))
            out.append(self.exp(x, v))
        return out

    def to_json(self):
        return {"kind": self.kind}

    def point_to_json(self, p):
        return {"coords": list(p)}

    def point_from_json(self, obj):
        c = obj["coords"]
        if len(c) == 2:
            return _lift(float(c[0]), float(c[1]))
        return self.check_point(c)


# --------------------------------------------------------------------------
# Public helpers


def sample_point(space: Space, sampler: Sampler):
    return space.sample(sampler.rng)


def unit_cap(space: Space, x, end, length: float = 1.0) -> Geodesic:
    """Geodesic from ``x`` toward ``end`` truncated to arclength ``length``."""
    g = space.geodesic(x, end)
    if g.length > length:
        return space.geodesic(x, g(length / g.length))
    return g


def direction_fan(space: Space, x, k: int = 16, seed: int | None = None) -> DirectionFan:
    """Unit-capped geodesics issuing from ``x``.

    Trees give one geodesic per incident edge direction regardless of ``k``;
    ``truncated`` flags fans with fewer than ``k`` members.
    """
    if k < 1:
        raise DomainError("fan size must be at least 1")
    x = space.check_point(x)
    rng = None if seed is None else np.random.default_rng(seed)
    geods = []
    for e in space.fan_endpoints(x, k, rng):
        g = unit_cap(space, x, e)
        if g.length > COORD_TOL:
            geods.append(g)
    labels = tuple(f"d{i}" for i in range(len(geods)))
    return DirectionFan(x, tuple(geods), labels, truncated=len(geods) < k)


# --------------------------------------------------------------------------
# Validation battery


@dataclass
class Diagnostics:
    passed: bool
    samples: int
    worst: dict
    witnesses: dict

    def to_json(self):
        return {"passed": self.passed, "samples": self.samples,
                "worst": self.worst, "witnesses": self.witnesses}


def validate(space: Space, samples: int = 2000, seed: int = 0, tol: float = 1e-9) -> Diagnostics:
    """Sampled check of the metric axioms, constant speed and the CAT(0) inequality.

    ``worst`` records the largest violation seen for each property (0 when
    the property held everywhere on the sample).
    """
    rng = np.random.default_rng(seed)
    worst = {"symmetry": 0.0, "triangle": 0.0, "identity": 0.0,
             "constant_speed": 0.0, "cat0": 0.0}
    witnesses = {}

    def note(name, value, what):
        if value > worst[name]:
            worst[name] = value
            witnesses[name] = what

    n_speed = max(1, samples // 50)
    for i in range(samples):
        x, y, z = space.sample(rng), space.sample(rng), space.sample(rng)
        t = float(rng.uniform())
        dxy, dyx = space.distance(x, y), space.distance(y, x)
        note("symmetry", abs(dxy - dyx), i)
        note("identity", space.distance(x, x), i)
        note("triangle", dxy - space.distance(x, z) - space.distance(z, y), i)
        note("cat0", -cat0_quadratic_residual(space, x, y, z, t), i)
        if i < n_speed:
            note("constant_speed", constant_speed_defect(space, space.geodesic(x, y), 8), i)
    passed = all(v <= tol for v in worst.values())
    return Diagnostics(passed, samples, worst, witnesses)
