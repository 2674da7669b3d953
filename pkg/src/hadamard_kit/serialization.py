"""JSON reading and writing for spaces, points, convex sets, fields and traces."""

from __future__ import annotations

import json
import math
import os

from .convergence import SequenceTrace
from .errors import ConstructionError, HadamardError, ParseError
from .fields import field_from_json
from .projections import Ball, Segment, TreeHull
from .spaces import Euclidean, Hyperbolic2, MetricTree, MonodTree, Product, TwoQuadrant, tripod


def parse_json(text: str, source: str = "<input>"):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{source}: {exc.msg} at line {exc.lineno}, column {exc.colno}") from exc


def load_json(arg: str):
    """``arg`` is a path to a JSON file or an inline JSON document."""
    if os.path.isfile(arg):
        with open(arg, encoding="utf-8") as fh:
            return parse_json(fh.read(), arg)
    s = arg.lstrip()
    if s[:1] in "{[" or s[:1].isdigit() or s[:1] == "-":
        return parse_json(arg, "<inline>")
    raise ParseError(f"{arg}: no such file")


def _need(obj, key, where):
    if not isinstance(obj, dict) or key not in obj:
        raise ParseError(f"{where}: missing key {key!r}")
    return obj[key]


def space_from_json(obj):
    if isinstance(obj, dict) and "space" in obj:
        obj = obj["space"]
    kind = _need(obj, "kind", "space")
    try:
        if kind == "euclidean":
            dim = _need(obj, "dim", "euclidean")
            if not isinstance(dim, int) or dim < 1:
                raise ConstructionError(f"euclidean dim must be a positive integer, got {dim!r}")
            return Euclidean(dim)
        if kind == "metric_tree":
            return MetricTree(_need(obj, "vertices", "metric_tree"), _need(obj, "edges", "metric_tree"))
        if kind == "tripod":
            return tripod(float(obj.get("leg", 1.0)))
        if kind == "monod_tree":
            return MonodTree(_need(obj, "num_rays", "monod_tree"))
        if kind == "product":
            return Product(space_from_json(_need(obj, "left", "product")),
                           space_from_json(_need(obj, "right", "product")))
        if kind == "two_quadrant":
            return TwoQuadrant()
        if kind == "hyperbolic2":
            return Hyperbolic2()
    except (TypeError, ValueError) as exc:
        if isinstance(exc, HadamardError):
            raise
        raise ConstructionError(str(exc)) from exc
    raise ParseError(f"unknown space kind {kind!r}")


def space_to_json(space) -> dict:
    return {"space": space.to_json()}


def point_from_json(space, obj):
    try:
        return space.point_from_json(obj)
    except HadamardError:
        raise
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise ParseError(f"bad point {obj!r} for {space.kind}: {exc}") from exc


def convex_from_json(space, obj):
    if not isinstance(obj, dict) or len(obj) != 1:
        raise ParseError(f"convex set JSON must have one key, got {obj!r}")
    (kind, body), = obj.items()
    if kind == "segment":
        a = point_from_json(space, _need(body, "start", "segment"))
        b = point_from_json(space, _need(body, "end", "segment"))
        return Segment(space.geodesic(a, b))
    if kind == "ball":
        return Ball(point_from_json(space, _need(body, "center", "ball")), float(_need(body, "radius", "ball")))
    if kind == "tree_hull":
        return TreeHull(tuple(point_from_json(space, p) for p in body))
    raise ParseError(f"unknown convex set kind {kind!r}")


def convex_to_json(space, C) -> dict:
    return C.to_json() if isinstance(C, Segment) else C.to_json(space)


def field_from_json_checked(space, obj):
    try:
        return field_from_json(space, obj)
    except HadamardError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad field {obj!r}: {exc}") from exc


def trace_from_json(obj, space=None):
    """Returns ``(space, trace)``; an explicit ``space`` must match the file's."""
    if "space" in obj:
        file_space = space_from_json(obj["space"])
        if space is not None and space != file_space:
            raise ParseError("trace space does not match --space")
        space = file_space
    if space is None:
        raise ParseError("trace has no space and none was given")
    pts = [point_from_json(space, p) for p in _need(obj, "points", "trace")]
    try:
        return space, SequenceTrace(tuple(pts), obj.get("tail_window"))
    except ValueError as exc:
        raise ParseError(f"trace: {exc}") from exc


def trace_to_json(space, trace: SequenceTrace) -> dict:
    return {"space": space.to_json(), "points": [space.point_to_json(p) for p in trace.points],
            "tail_window": trace.tail_window}


def _clean(obj):
    if isinstance(obj, float):
        if math.isnan(obj):
            return "nan"
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        return obj
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if hasattr(obj, "item") and not isinstance(obj, (str, bytes)):
        return _clean(obj.item())
    return obj


def dumps(obj) -> str:
    """Stable JSON text: sorted keys, non-finite floats spelled as strings."""
    return json.dumps(_clean(obj), indent=2, sort_keys=True) + "\n"
