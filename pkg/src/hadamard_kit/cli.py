"""Command-line front end.

Exit codes: 0 success, 1 property or verdict failure, 2 input error,
3 solver failure (the report is still written).
"""

from __future__ import annotations

import argparse
import sys
from datetime import datetime, timezone

from . import __version__
from .convergence import (ElementarySet, SequenceTrace, WitnessBudget, asymptotic_center, boundedness,
                          default_competitors, delta_converges, elementary_set_contains,
                          kakavandi_converges, trace_fan, weak_converges, weakly_proper_witness_search)
from .descent import DescentOptions, descent_minimize
from .dual import dual_distance_estimate, dual_function, exact_dual_distance_euclidean
from .errors import HadamardError, ParseError, SolverError
from .projections import geodesic_monotonicity_check, project_to_convex
from .serialization import (convex_from_json, dumps, field_from_json_checked, load_json, point_from_json,
                            space_from_json, trace_from_json)
from .spaces import Euclidean, direction_fan, validate

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_SOLVER = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _space(args):
    if args.space is None:
        raise ParseError("--space is required")
    return space_from_json(load_json(args.space))


def _point(space, arg, name):
    if arg is None:
        raise ParseError(f"--{name} is required")
    return point_from_json(space, load_json(arg))


def _trace(args):
    if args.trace is None:
        raise ParseError("--trace is required")
    space = _space(args) if args.space is not None else None
    return trace_from_json(load_json(args.trace), space)


# -- subcommands -------------------------------------------------------------------


def cmd_validate(args):
    space = _space(args)
    tol = 1e-9 if args.tol is None else args.tol
    diag = validate(space, samples=args.samples, seed=args.seed, tol=tol)
    result = {"space": space.to_json(), **diag.to_json(), "tol": tol}
    return result, EXIT_OK if diag.passed else EXIT_FAIL, f"validate: {'pass' if diag.passed else 'FAIL'}"


def cmd_diagnose(args):
    space, trace = _trace(args)
    x = _point(space, args.limit, "limit")
    decay = 1e-6 if args.tol is None else args.tol
    fan = trace_fan(space, x, trace) if args.fan == "trace" else None
    fan_kind = "trace"
    if fan is None or len(fan) == 0:
        fan = direction_fan(space, x, args.fan_size, seed=args.seed)
        fan_kind = "radial"
    sample = default_competitors(space, trace, seed=args.seed)
    delta = delta_converges(space, trace, x, sample)
    weak = weak_converges(space, trace, x, fan, decay_tol=decay)
    kak = kakavandi_converges(space, trace, x, sample, tol=decay)
    agreement = None
    if weak.holds:
        eps = weak.margins["max_projection_distance"] + decay
        U = ElementarySet(x, eps, fan.geodesics)
        agreement = {"eps": eps, "tail_inside_elementary_set":
                     all(elementary_set_contains(space, U, p) for p in trace.tail)}
    result = {"space": space.to_json(), "limit": space.point_to_json(x), "tail_window": trace.tail_window,
              "fan": {"kind": fan_kind, "size": len(fan)},
              "delta": delta.to_json(), "weak": weak.to_json(), "kakavandi": kak.to_json(),
              "boundedness": boundedness(space, trace, x), "tau_w_agreement": agreement}
    statuses = (delta.status, weak.status, kak.status)
    code = EXIT_OK if all(s == "holds_on_sample" for s in statuses) else EXIT_FAIL
    line = "diagnose: delta={} weak={} kakavandi={} ({})".format(*statuses, result["boundedness"]["flag"])
    return result, code, line


def _descent_opts(args, **defaults):
    kw = dict(defaults)
    for name in ("fan_size", "max_iters", "c", "beta", "step0", "refine"):
        v = getattr(args, name, None)
        if v is not None:
            kw[name] = v
    if args.tol is not None:
        kw["tol"] = args.tol
    kw["seed"] = args.seed
    return DescentOptions(**kw)


def cmd_descent(args):
    space = _space(args)
    if args.field is None:
        raise ParseError("--field is required")
    f = field_from_json_checked(space, load_json(args.field))
    x0 = _point(space, args.start, "start")
    rep = descent_minimize(space, f, x0, _descent_opts(args))
    result = {"space": space.to_json(), "field": f.to_json(), "start": space.point_to_json(x0),
              **rep.to_json(space)}
    code = EXIT_OK if rep.reason == "stationary" else EXIT_SOLVER
    line = "descent: {} after {} iterations, objective {!r}, point {}".format(
        rep.reason, rep.iterations, rep.objectives[-1], dumps(space.point_to_json(rep.iterates[-1])).strip())
    return result, code, line, rep


def cmd_asymptotic_center(args):
    space, trace = _trace(args)
    ac = asymptotic_center(space, trace, fan_size=args.fan_size or 32, max_iters=args.max_iters or 500,
                           tol=1e-7 if args.tol is None else args.tol)
    result = {"space": space.to_json(), "tail_window": trace.tail_window, **ac.to_json(space)}
    code = EXIT_OK if ac.status == "holds_on_sample" else EXIT_SOLVER
    return result, code, f"asymptotic-center: radius {ac.radius!r} ({ac.status})"


def cmd_dual_distance(args):
    space = _space(args)
    x = _point(space, args.base, "base")
    a = dual_function(space, x, _point(space, args.gamma_end, "gamma-end"))
    b = dual_function(space, x, _point(space, args.eta_end, "eta-end"))
    if args.sample is not None:
        sample = [point_from_json(space, p) for p in load_json(args.sample)]
        sample += [a.geodesic.end, b.geodesic.end]
    else:
        sample = None
    est = dual_distance_estimate(a, b, sample, seed=args.seed)
    result = {"space": space.to_json(), "gamma": a.to_json(), "eta": b.to_json(),
              "estimate": est, "kind": "sampled lower bound"}
    if isinstance(space, Euclidean):
        result["exact_euclidean"] = exact_dual_distance_euclidean(a, b)
    return result, EXIT_OK, f"dual-distance: {est!r}"


def cmd_witness_search(args):
    space = _space(args)
    x = _point(space, args.point, "point")
    gamma = space.geodesic(x, _point(space, args.gamma_end, "gamma-end"))
    at = None if args.at is None else _point(space, args.at, "at")
    budget = WitnessBudget(k=args.k, samples=args.samples, halvings=args.halvings, seed=args.seed)
    rep = weakly_proper_witness_search(space, x, args.epsilon, gamma, budget, at)
    result = {"space": space.to_json(), "point": space.point_to_json(x), "epsilon": args.epsilon,
              **rep.to_json(space)}
    code = {"found": EXIT_OK, "counterexample": EXIT_FAIL}.get(rep.status, EXIT_SOLVER)
    return result, code, f"witness-search: {rep.status}"


def cmd_monotonicity(args):
    space = _space(args)
    if args.convex is None:
        raise ParseError("--convex is required")
    C = convex_from_json(space, load_json(args.convex))
    a = _point(space, args.start, "start")
    b = _point(space, args.end, "end")
    res = geodesic_monotonicity_check(space, lambda y: project_to_convex(space, C, y).foot, a, b,
                                      grid_size=args.grid)
    result = {"space": space.to_json(), "monotone": res.monotone,
              "witness": list(res.witness) if res.witness else None, "values": list(res.values)}
    return result, EXIT_OK if res.monotone else EXIT_FAIL, f"monotonicity: {res.monotone}"


COMMANDS = {
    "validate": cmd_validate,
    "diagnose": cmd_diagnose,
    "descent": cmd_descent,
    "asymptotic-center": cmd_asymptotic_center,
    "dual-distance": cmd_dual_distance,
    "witness-search": cmd_witness_search,
    "monotonicity": cmd_monotonicity,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--space", help="space JSON file or inline JSON")
    common.add_argument("--trace", help="trace JSON file")
    common.add_argument("--field", help="scalar field JSON")
    common.add_argument("--tol", type=float)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--deterministic", action="store_true", help="omit the timestamp")

    p = _Parser(prog="hadamard-kit", description="Numerical diagnostics on Hadamard spaces.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("validate", parents=[common], help="sampled axiom and CAT(0) battery")
    v.add_argument("--samples", type=int, default=2000)

    d = sub.add_parser("diagnose", parents=[common], help="Delta / weak / Kakavandi verdicts")
    d.add_argument("--limit", help="candidate limit point")
    d.add_argument("--fan", choices=("trace", "radial"), default="trace")
    d.add_argument("--fan-size", type=int, default=16)

    for name in ("descent", "asymptotic-center"):
        s = sub.add_parser(name, parents=[common])
        s.add_argument("--fan-size", type=int)
        s.add_argument("--max-iters", type=int)
        if name == "descent":
            s.add_argument("--start", help="starting point")
            s.add_argument("--c", type=float)
            s.add_argument("--beta", type=float)
            s.add_argument("--step0", type=float)
            s.add_argument("--refine", type=int)

    dd = sub.add_parser("dual-distance", parents=[common], help="sampled dual distance")
    dd.add_argument("--base")
    dd.add_argument("--gamma-end")
    dd.add_argument("--eta-end")
    dd.add_argument("--sample", help="JSON list of sample points")

    w = sub.add_parser("witness-search", parents=[common], help="weakly-proper witness search")
    w.add_argument("--point")
    w.add_argument("--gamma-end")
    w.add_argument("--at")
    w.add_argument("--epsilon", type=float, default=0.5)
    w.add_argument("--k", type=int, default=4)
    w.add_argument("--samples", type=int, default=400)
    w.add_argument("--halvings", type=int, default=6)

    m = sub.add_parser("monotonicity", parents=[common],
                       help="exploratory: is d(P x0, P x_a) monotone along [x0, x1]?")
    m.add_argument("--convex")
    m.add_argument("--start")
    m.add_argument("--end")
    m.add_argument("--grid", type=int, default=33)
    return p


def _emit(args, text: str, line: str):
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        print(line)
    else:
        sys.stdout.write(text)
        print(line, file=sys.stderr)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.format == "csv" and args.command != "descent":
            raise ParseError("csv output is only available for descent")
        out = COMMANDS[args.command](args)
    except SolverError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (HadamardError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    result, code, line = out[:3]
    if args.format == "csv":
        text = out[3].to_csv()
    else:
        report = {"command": args.command, "version": __version__, "seed": args.seed,
                  "exit_code": code, "result": result}
        if not args.deterministic:
            report["timestamp"] = datetime.now(timezone.utc).isoformat()
        text = dumps(report)
    _emit(args, text, line)
    return code


if __name__ == "__main__":
    sys.exit(main())
