"""Batch command line front end.

Every command reads JSON problem files (schemas in :mod:`holoretract.serialize`)
and prints one JSON document ``{"envelope": ..., "report": ...}``. The report
is deterministic for a given scenario and seed; the envelope holds the
timestamp. ``--format text`` prints a flattened view of the same report.

Exit codes: 0 verified/constructed, 1 property refuted, 2 invalid input,
3 numerical failure.
"""

import argparse
import datetime
import json
import sys

import numpy as np

from . import __version__
from .caratheodory import (carath_origin, carath_supball, functional_lower_bound,
                           isometry_check)
from .errors import (DimensionError, DomainError, LinearityViolation, NotAnIsometry,
                     NumericalFailure, RankDeficient, VerificationFailure, WrongNormKind)
from .fixtures import OFFCENTER_A, OFFCENTER_B, offcenter_map
from .holomap import jacobian
from .norms import Sup
from .projections import counterexample_obstruction, min_projection_norm, property_v_supsource
from .retraction import (NoNormOneProjection, build_retraction, choose_projection,
                         retract_at_point)
from .serialize import (dumps, map_from_json, map_to_json, matrix_from_json, norm_from_json,
                        norm_to_json, vector_from_json, vector_to_json)

EXIT_OK, EXIT_REFUTED, EXIT_INVALID, EXIT_NUMERICAL = 0, 1, 2, 3

COMMANDS = ("metric", "check-isometry", "find-projection", "min-projection-norm",
            "retract", "counterexample", "corollary-demo")


class InvalidInput(Exception):
    pass


def _load(path):
    if path is None:
        raise InvalidInput("this command needs a problem file")
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidInput(f"cannot read {path}: {exc}") from exc


def _field(data, key):
    if key not in data:
        raise InvalidInput(f"missing field {key!r}")
    return data[key]


def cmd_metric(data, opts):
    N = norm_from_json(_field(data, "norm"))
    v = vector_from_json(_field(data, "vector"))
    point = vector_from_json(data["point"]) if "point" in data else np.zeros(N.dim)
    report = {"norm": norm_to_json(N), "vector": vector_to_json(v), "point": vector_to_json(point)}
    if np.any(point):
        if not isinstance(N, Sup):
            raise InvalidInput("interior base points are supported on polydisks only")
        value = carath_supball(point, v)
    else:
        value = carath_origin(N, v)
        report["functional_lower_bound"] = functional_lower_bound(N, v)
    report["caratheodory"] = value
    report["kobayashi"] = value
    return EXIT_OK, report


def _projection_problem(data):
    L = matrix_from_json(_field(data, "L"))
    n1 = norm_from_json(_field(data, "source_norm"))
    n2 = norm_from_json(_field(data, "target_norm"))
    if L.shape != (n2.dim, n1.dim):
        raise InvalidInput(f"L has shape {L.shape}, norms need {(n2.dim, n1.dim)}")
    return L, n1, n2


def cmd_check_isometry(data, opts):
    L, n1, n2 = _projection_problem(data)
    v = isometry_check(L, n1, n2, samples=opts.samples, seed=opts.seed, tol=opts.tol)
    return (EXIT_OK if v.is_isometry else EXIT_REFUTED), {"isometry": v.to_dict()}


def cmd_find_projection(data, opts):
    L, n1, n2 = _projection_problem(data)
    v = isometry_check(L, n1, n2, samples=opts.samples, seed=opts.seed, tol=opts.tol)
    report = {"isometry": v.to_dict()}
    if not v.is_isometry:
        return EXIT_REFUTED, report
    bundle = choose_projection(L, n1, n2, tol=opts.tol)
    report["projection"] = bundle.to_dict(L)
    if bundle.method == "c0":
        cross = property_v_supsource(L, n2, tol=opts.tol)
        report["cross_check"] = {"method": cross.method,
                                 "norm_certificate": cross.norm_certificate.to_dict(),
                                 "residuals": cross.residuals(L)}
    ok, _ = bundle.check(L, norm_tol=opts.tol)
    return (EXIT_OK if ok else EXIT_NUMERICAL), report


def cmd_min_projection_norm(data, opts):
    n2 = norm_from_json(_field(data, "target_norm"))
    if "range_basis" in data:
        basis = [vector_from_json(b) for b in data["range_basis"]]
    else:
        basis = list(matrix_from_json(_field(data, "L")).T)
    mp = min_projection_norm(basis, n2, tol=opts.tol, budget=opts.budget)
    report = {"min_projection": mp.to_dict()}
    if mp.upper <= 1 + opts.tol:
        return EXIT_OK, report
    if mp.lower > 1 + opts.tol:
        return EXIT_REFUTED, report
    return EXIT_NUMERICAL, report


def cmd_retract(data, opts):
    f = map_from_json(_field(data, "f"))
    n1 = norm_from_json(_field(data, "source_norm"))
    n2 = norm_from_json(_field(data, "target_norm"))
    if "point" in data and np.any(vector_from_json(data["point"])):
        if not (isinstance(n1, Sup) and isinstance(n2, Sup)):
            raise InvalidInput("base points away from 0 need polydisk source and target")
        out = retract_at_point(f, vector_from_json(data["point"]), samples=opts.samples,
                               seed=opts.seed, max_order=opts.max_order)
        return EXIT_OK, _pipeline_report(out)
    J = jacobian(f, np.zeros(n1.dim))
    pi = choose_projection(J, n1, n2, tol=opts.tol)
    bundle = build_retraction(f, n1, n2, pi, samples=opts.samples, seed=opts.seed,
                              max_order=opts.max_order)
    return EXIT_OK, {"retraction": bundle.to_dict()}


def _pipeline_report(out):
    return {
        "b": vector_to_json(out["b"]),
        "conjugated_map": map_to_json(out["conjugated"]),
        "conjugation": out["conjugation"],
        "retraction": out["bundle"].to_dict(),
        "retraction_of_original": map_to_json(out["R"]),
        "inverse_of_original": map_to_json(out["G"]),
        "original_residuals": out["original_residuals"],
    }


def cmd_counterexample(data, opts):
    report = counterexample_obstruction(seed=opts.seed, tol=opts.tol)
    return (EXIT_REFUTED if report["no_norm_one_projection"] else EXIT_NUMERICAL), report


def cmd_corollary_demo(data, opts):
    a = vector_from_json(data["a"]) if data and "a" in data else OFFCENTER_A
    b = vector_from_json(data["b"]) if data and "b" in data else OFFCENTER_B
    f = offcenter_map(a, b)
    out = retract_at_point(f, a, samples=opts.samples, seed=opts.seed,
                           max_order=opts.max_order, tol=1e-7)
    report = {"a": vector_to_json(a), "f": map_to_json(f), **_pipeline_report(out)}
    return EXIT_OK, report


HANDLERS = {
    "metric": cmd_metric,
    "check-isometry": cmd_check_isometry,
    "find-projection": cmd_find_projection,
    "min-projection-norm": cmd_min_projection_norm,
    "retract": cmd_retract,
    "counterexample": cmd_counterexample,
    "corollary-demo": cmd_corollary_demo,
}
NEEDS_INPUT = {"metric", "check-isometry", "find-projection", "min-projection-norm", "retract"}


def _error_report(exc):
    rep = {"error": type(exc).__name__, "message": str(exc)}
    for attr in ("lower", "upper", "residuals", "extension_norms", "multi_index", "modulus"):
        val = getattr(exc, attr, None)
        if val is not None:
            rep[attr] = list(val) if isinstance(val, tuple) else val
    w = getattr(exc, "witness", None)
    if w is not None:
        rep["witness"] = vector_to_json(w)
    return rep


def run(command, input_path=None, tol=1e-6, seed=0, samples=200, max_order=4, budget=2000):
    """Execute one scenario; returns ``(exit_code, report_dict)``."""
    opts = argparse.Namespace(tol=tol, seed=seed, samples=samples, max_order=max_order,
                              budget=budget)
    settings = {"command": command, "tol": tol, "seed": seed, "samples": samples,
                "max_order": max_order, "budget": budget}
    try:
        if command not in HANDLERS:
            raise InvalidInput(f"unknown command {command!r}")
        if command in NEEDS_INPUT or input_path is not None:
            data = _load(input_path)
        else:
            data = None
        code, body = HANDLERS[command](data, opts)
    except (NotAnIsometry, NoNormOneProjection, LinearityViolation, VerificationFailure) as exc:
        code, body = EXIT_REFUTED, _error_report(exc)
    except NumericalFailure as exc:
        code, body = EXIT_NUMERICAL, _error_report(exc)
    except (InvalidInput, DimensionError, DomainError, RankDeficient, WrongNormKind,
            KeyError, TypeError, ValueError) as exc:
        code, body = EXIT_INVALID, _error_report(exc)
    return code, {"settings": settings, "exit_code": code, **body}


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k in sorted(obj):
            yield from _flatten(obj[k], f"{prefix}{k}.")
    elif isinstance(obj, list) and obj and all(isinstance(x, (dict, list)) for x in obj) \
            and not all(isinstance(x, list) and len(x) == 2 and
                        all(isinstance(y, (int, float)) for y in x) for x in obj):
        for i, x in enumerate(obj):
            yield from _flatten(x, f"{prefix}{i}.")
    else:
        yield f"{prefix[:-1]}: {json.dumps(obj)}"


def render(report, fmt="json", timestamp=None):
    if fmt == "text":
        return "\n".join(_flatten(report)) + "\n"
    envelope = {"version": __version__,
                "generated_at": timestamp or datetime.datetime.now(datetime.timezone.utc).isoformat()}
    return dumps({"envelope": envelope, "report": report}) + "\n"


def build_parser():
    p = argparse.ArgumentParser(prog="holoretract", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("input", nargs="?", help="JSON problem file ('-' for stdin)")
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--max-order", type=int, default=4)
    p.add_argument("--budget", type=int, default=2000)
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--format", choices=("json", "text"), default="json")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    code, report = run(args.command, args.input, tol=args.tol, seed=args.seed,
                       samples=args.samples, max_order=args.max_order, budget=args.budget)
    text = render(report, args.format)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
