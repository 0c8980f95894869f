"""Scenario-driven command line front end.

A scenario is a JSON object::

    {
      "version": 1,
      "name": "power-laplacian-sanity",
      "young": {"family": "power", "p": 2},
      "s": 0.5,
      "n": 1,
      "seed": 0,
      "functions": {"u": {"kind": "closed_form", "name": "truncated_parabola_s", "params": {"s": 0.5}}},
      "sources": {"one": {"kind": "constant", "c": 1.0}},
      "operations": [{"op": "pv_eval", "function": "u", "x": [0.0, 0.3]}]
    }

Every operation produces one entry in ``report.json`` (keys sorted, so
reruns are byte identical) and, where tabular, a CSV file.  Exit code 0
means every check passed, 2 that some check failed and 1 an error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .dirichlet import solve_dirichlet
from .errors import OrliczFracError, SchemaError
from .fracop import QuadratureConfig, eval_g_gradient, eval_pv_glaplacian, inner_decay_probe
from .infconv import propinfconv_report
from .orlicz import Domain1D, luxemburg_norm, modular_G, modular_sG, sandwich_report
from .reports import CheckReport
from .sampled import SampledFunction, function_from_json, generators
from .solutions import (SourceFunction, TestFunction, bump_basis, caccioppoli_report, viscosity_point_check,
                        weak_supersolution_report)
from .young import complementary, complementary_inverse, inequality_suite, young_from_json

SCHEMA_VERSION = 1
log = logging.getLogger("orlicz_frac")

OP_GROUPS = {
    "op-eval": ("pv_eval", "g_gradient"),
    "op-probe": ("decay_probe",),
    "infconv": ("infconv",),
    "weakcheck": ("solve", "weakcheck"),
    "visccheck": ("solve", "visccheck"),
    "solve": ("solve",),
    "compare": ("compare",),
}


# -- scenario ------------------------------------------------------------------------


class Scenario:
    """Validated scenario plus the named objects it refers to."""

    def __init__(self, data: dict, tol: float | None = None):
        if not isinstance(data, dict):
            raise SchemaError("scenario must be a JSON object")
        version = data.get("version", SCHEMA_VERSION)
        if version != SCHEMA_VERSION:
            raise SchemaError(f"unsupported scenario version {version!r}")
        self.name = str(data.get("name", "scenario"))
        try:
            self.s = float(data.get("s", 0.5))
            self.n = int(data.get("n", 1))
            self.seed = int(data.get("seed", 0))
        except (TypeError, ValueError) as exc:
            raise SchemaError(f"bad scalar field: {exc}") from None
        if not 0 < self.s < 1:
            raise SchemaError(f"s must lie in (0, 1), got {self.s}")
        if self.n < 1:
            raise SchemaError(f"n must be >= 1, got {self.n}")
        self.young_spec = data.get("young", {"family": "power", "p": 2.0})
        try:
            self.Y = young_from_json(self.young_spec)
        except (TypeError, ValueError) as exc:
            raise SchemaError(f"bad young block: {exc}") from None
        funcs = data.get("functions", {}) or {}
        if not isinstance(funcs, dict):
            raise SchemaError("'functions' must be an object")
        self.functions: dict[str, SampledFunction] = {k: function_from_json(v) for k, v in funcs.items()}
        srcs = data.get("sources", {}) or {}
        if not isinstance(srcs, dict):
            raise SchemaError("'sources' must be an object")
        self.source_specs = srcs
        ops = data.get("operations", [])
        if not isinstance(ops, list) or not all(isinstance(o, dict) and "op" in o for o in ops):
            raise SchemaError("'operations' must be a list of objects with an 'op' field")
        for o in ops:
            if o["op"] not in HANDLERS:
                raise SchemaError(f"unknown operation {o['op']!r}; known: {sorted(HANDLERS)}")
        self.operations = ops
        self.cfg = _config(data.get("quadrature", {}))
        self.tol = tol
        self.solutions = {}

    def function(self, ref) -> SampledFunction:
        if isinstance(ref, dict):
            return function_from_json(ref)
        if isinstance(ref, str) and ref.startswith("solution:"):
            key = ref.split(":", 1)[1]
            if key not in self.solutions:
                raise SchemaError(f"no solution labelled {key!r} has been computed yet")
            return self.solutions[key].function
        if ref not in self.functions:
            raise SchemaError(f"unknown function reference {ref!r}")
        return self.functions[ref]

    def source(self, ref, domain) -> SourceFunction:
        block = ref if isinstance(ref, dict) else self.source_specs.get(ref)
        if block is None:
            raise SchemaError(f"unknown source reference {ref!r}")
        return SourceFunction.from_dict(block, domain=domain)

    def tolerance(self, op, default):
        if self.tol is not None:
            return self.tol
        return float(op.get("tol", default))


def _config(block) -> QuadratureConfig:
    if not isinstance(block, dict):
        raise SchemaError("'quadrature' must be an object")
    try:
        return QuadratureConfig(**block)
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"bad quadrature block: {exc}") from None


def load_scenario(path, tol=None) -> Scenario:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON ({exc})") from None
    return Scenario(data, tol)


# -- output helpers ------------------------------------------------------------------


def _clean(obj):
    """JSON-safe copy: numpy scalars and arrays to lists, non-finite floats to strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def _write_csv(path: Path, header, rows):
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in r])


def _domain(op, default=(-1.0, 1.0)):
    dom = op.get("domain", list(default))
    if not (isinstance(dom, (list, tuple)) and len(dom) == 2 and float(dom[0]) < float(dom[1])):
        raise SchemaError(f"domain must be [a, b] with a < b, got {dom!r}")
    return float(dom[0]), float(dom[1])


# -- operation handlers --------------------------------------------------------------
# each returns (list of CheckReport, payload dict)


def _op_pv_eval(sc: Scenario, op, out: Path, label):
    u = sc.function(op.get("function", "u"))
    xs = [float(x) for x in op.get("x", [0.0])]
    rows = []
    for x in xs:
        r = eval_pv_glaplacian(u, x, sc.Y, sc.s, sc.cfg, beta=op.get("beta"))
        rows.append((x, r.value, r.inner_part, r.outer_part, r.tail_part, r.error_estimate))
    _write_csv(out / f"{label}.csv", ["x", "value", "inner", "outer", "tail", "error_estimate"], rows)
    vals = np.array([r[1] for r in rows])
    reports = []
    expect = op.get("expect", {})
    if "spread" in expect and vals.size:
        spread = float((vals.max() - vals.min()) / abs(vals.mean()))
        reports.append(CheckReport("pv_spread", spread < float(expect["spread"]), (), spread,
                                   "relative spread of the values", bound=float(expect["spread"])))
    if "value" in expect and vals.size:
        ref = float(expect["value"])
        rtol = sc.tol if sc.tol is not None else float(expect.get("rtol", 5e-3))
        dev = float(np.max(np.abs(vals - ref)) / abs(ref))
        reports.append(CheckReport("pv_reference", dev < rtol, (), dev, f"max relative deviation from {ref}",
                                   bound=rtol))
    return reports, {"table": [dict(zip(("x", "value", "inner", "outer", "tail", "error_estimate"), r))
                               for r in rows]}


def _op_g_gradient(sc, op, out, label):
    u = sc.function(op.get("function", "u"))
    rows = [(float(x), eval_g_gradient(u, float(x), sc.Y, sc.s, sc.cfg)) for x in op.get("x", [0.0])]
    _write_csv(out / f"{label}.csv", ["x", "D_g^s u"], rows)
    return [], {"table": [{"x": x, "value": v} for x, v in rows]}


def _op_decay_probe(sc, op, out, label):
    u = sc.function(op.get("function", "u"))
    rhos = op.get("rhos")
    if rhos is None:
        rhos = np.geomspace(float(op.get("rho_min", 1e-4)), float(op.get("rho_max", 1e-1)), int(op.get("count", 12)))
    pr = inner_decay_probe(u, float(op.get("x", 0.0)), sc.Y, sc.s, rhos, beta=op.get("beta"), cfg=sc.cfg)
    _write_csv(out / f"{label}.csv", ["rho", "magnitude"], pr.to_rows())
    tol = sc.tolerance(op, 0.1)
    ok = (not pr.cancelled) and abs(pr.slope - pr.target) <= tol
    rep = CheckReport("decay_slope", bool(ok), (), pr.slope, f"target {pr.target:.6g}", bound=tol,
                      extra={"target": pr.target, "cancelled": pr.cancelled})
    return [rep], {"slope": pr.slope, "target": pr.target}


def _op_modular(sc, op, out, label):
    u = sc.function(op.get("function", "u"))
    a, b = _domain(op)
    dom = Domain1D(a, b)
    kind = op.get("kind", "LG")
    if kind == "LG":
        val = modular_G(u, dom, sc.Y)
    elif kind == "seminorm_sG":
        val = modular_sG(u, dom, sc.Y, sc.s)
    else:
        raise SchemaError(f"unknown modular kind {kind!r}")
    norm = luxemburg_norm(u, dom, sc.Y, kind, sc.s if kind != "LG" else None)
    return [], {"modular": val, "luxemburg_norm": norm, "kind": kind}


def _op_sandwich(sc, op, out, label):
    u = sc.function(op.get("function", "u"))
    a, b = _domain(op)
    kind = op.get("kind", "LG")
    rep = sandwich_report(u, Domain1D(a, b), sc.Y, kind, sc.s if kind != "LG" else None,
                          tol=sc.tolerance(op, 1e-6))
    return [rep], {}


def _op_inequality_suite(sc, op, out, label):
    reps = inequality_suite(sc.Y, checks=op.get("checks", "explicit"))
    return list(reps), {}


def _op_complementary(sc, op, out, label):
    a = np.geomspace(float(op.get("a_min", 1e-3)), float(op.get("a_max", 1e3)), int(op.get("count", 100)))
    back = complementary_inverse(sc.Y, complementary(sc.Y, a).value)
    err = float(np.max(np.abs(back - a) / a))
    tol = sc.tolerance(op, 1e-8)
    return [CheckReport("complementary_round_trip", err < tol, (), err, "max relative round-trip error",
                        bound=tol)], {}


def _op_infconv(sc, op, out, label):
    u = sc.function(op.get("function", "u"))
    nodes = None
    if "nodes" in op:
        nd = op["nodes"]
        nodes = np.linspace(float(nd[0]), float(nd[1]), int(nd[2]))
    eps = [float(e) for e in op.get("epsilons", [0.4, 0.2, 0.1])]
    reps = propinfconv_report(u, eps, q=float(op.get("q", 2.0)), nodes=nodes)
    return reps, {}


def _basis(op, a, b):
    spec = op.get("basis", {})
    return bump_basis(a, b, int(spec.get("centers", 8)), tuple(spec.get("radii", (0.05, 0.1, 0.2))))


def _op_weakcheck(sc, op, out, label):
    a, b = _domain(op)
    u = sc.function(op.get("function", "u"))
    f = sc.source(op.get("source", "f"), (a, b))
    rep = weak_supersolution_report(u, _basis(op, a, b), sc.Y, sc.s, f, sc.cfg, tol=sc.tolerance(op, 1e-3))
    rows = [(r["center"], r["radius"], r["lhs"], r["rhs"], r["margin"]) for r in rep.extra["rows"]]
    _write_csv(out / f"{label}.csv", ["center", "radius", "lhs", "rhs", "margin"], rows)
    return [rep], {}


def _op_visccheck(sc, op, out, label):
    a, b = _domain(op)
    u = sc.function(op.get("function", "u"))
    f = sc.source(op.get("source", "f"), (a, b))
    tol = sc.tolerance(op, 1e-3)
    reps = [viscosity_point_check(u, float(x), op.get("touch"), sc.Y, sc.s, f, sc.cfg, op.get("radius"),
                                  op.get("beta"), tol) for x in op.get("points", [0.0])]
    return reps, {}


def _op_caccioppoli(sc, op, out, label):
    a, b = _domain(op)
    u = sc.function(op.get("function", "u"))
    f = sc.source(op.get("source", "f"), (a, b))
    xi = op.get("xi", {"center": 0.5 * (a + b), "radius": 0.25 * (b - a)})
    rep = caccioppoli_report(u, TestFunction(float(xi["center"]), float(xi["radius"])), sc.Y, sc.s, f, sc.cfg)
    return [rep], {}


def _solve(sc, spec, a, b):
    ext = sc.function(spec.get("exterior", {"kind": "closed_form", "name": "constant", "params": {"c": 0.0}}))
    f = sc.source(spec.get("source", "f"), (a, b))
    return solve_dirichlet(a, b, ext, sc.Y, sc.s, f, N=int(spec.get("N", 201)), tol=float(spec.get("tol", 1e-10)),
                           max_sweeps=int(spec.get("max_sweeps", 2000)))


def _op_solve(sc, op, out, label):
    a, b = _domain(op)
    sol = _solve(sc, op, a, b)
    key = op.get("label", label)
    sc.solutions[key] = sol
    _write_csv(out / f"{label}.csv", ["x", "u"], sol.to_rows())
    _write_csv(out / f"{label}_convergence.csv", ["sweep", "max_update"],
               [(i + 1, v) for i, v in enumerate(sol.history)])
    return [], {"label": key, "sweeps": sol.sweeps, "newton_iterations": sol.newton_iterations,
                "residual": sol.residual}


def _op_compare(sc, op, out, label):
    a, b = _domain(op)
    lo = _solve(sc, {**op, **op.get("lower", {})}, a, b)
    hi = _solve(sc, {**op, **op.get("upper", {})}, a, b)
    gap = float(np.min(hi.values - lo.values))
    tol = sc.tolerance(op, 1e-8)
    _write_csv(out / f"{label}.csv", ["x", "lower", "upper"],
               [(x, l, h) for x, l, h in zip(lo.nodes, lo.values, hi.values)])
    return [CheckReport("comparison", gap >= -tol, (), gap, "min over nodes of upper - lower", bound=-tol)], {}


HANDLERS = {
    "pv_eval": _op_pv_eval,
    "g_gradient": _op_g_gradient,
    "decay_probe": _op_decay_probe,
    "modular": _op_modular,
    "sandwich": _op_sandwich,
    "inequality_suite": _op_inequality_suite,
    "complementary": _op_complementary,
    "infconv": _op_infconv,
    "weakcheck": _op_weakcheck,
    "visccheck": _op_visccheck,
    "caccioppoli": _op_caccioppoli,
    "solve": _op_solve,
    "compare": _op_compare,
}


def run_scenario(path, out=None, tol=None, only=None, threads=None) -> int:
    """Execute a scenario; returns the exit code (0 pass, 2 failed check, 1 error)."""
    try:
        sc = load_scenario(path, tol)
        outdir = Path(out) if out is not None else Path(".")
        outdir.mkdir(parents=True, exist_ok=True)
        entries = []
        for k, op in enumerate(sc.operations):
            if only is not None and op["op"] not in only:
                continue
            label = f"{k:02d}_{op['op']}"
            log.info("running %s", label)
            reports, payload = HANDLERS[op["op"]](sc, op, outdir, label)
            entries.append({"label": label, "op": op["op"], "passed": all(r.passed for r in reports),
                            "reports": [r.to_dict() for r in reports], **payload})
        report = {"version": __version__, "schema_version": SCHEMA_VERSION, "scenario": sc.name,
                  "young": sc.Y.to_dict(), "s": sc.s, "n": sc.n, "seed": sc.seed, "threads": threads,
                  "operations": entries, "passed": all(e["passed"] for e in entries)}
        text = json.dumps(_clean(report), sort_keys=True, indent=2)
        (outdir / "report.json").write_text(text + "\n")
        for e in entries:
            for r in e["reports"]:
                log.info("%s %s: %s", e["label"], r["name"], "PASS" if r["passed"] else "FAIL")
        return 0 if report["passed"] else 2
    except (OrliczFracError, ValueError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


def list_generators(stream=None) -> list[dict]:
    """Print the closed-form registry (alphabetical) as JSON and return it."""
    gens = generators()
    print(json.dumps(_clean(gens), sort_keys=True, indent=2), file=stream or sys.stdout)
    return gens


def _threads(arg):
    val = arg if arg is not None else os.environ.get("ORLICZ_FRAC_THREADS")
    if val is None:
        return None
    try:
        k = int(val)
    except ValueError:
        raise SchemaError(f"threads must be a positive integer, got {val!r}") from None
    if k < 1:
        raise SchemaError(f"threads must be a positive integer, got {k}")
    return k


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", required=True, help="scenario JSON file")
    common.add_argument("--out", default=".", help="output directory")
    common.add_argument("--tol", type=float, default=None, help="override every check tolerance")
    common.add_argument("--threads", default=None, help="worker threads (fallback: ORLICZ_FRAC_THREADS)")
    common.add_argument("--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="orlicz-frac", description=__doc__.split("\n")[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("run", parents=[common], help="run every operation of a scenario")
    sub.add_parser("generators", help="list closed-form function generators")
    opp = sub.add_parser("op", help="operator evaluations")
    opsub = opp.add_subparsers(dest="op_command", required=True)
    opsub.add_parser("eval", parents=[common], help="principal values and g-gradients")
    opsub.add_parser("probe", parents=[common], help="inner decay probes")
    icp = sub.add_parser("infconv", help="infimal convolution checks")
    icsub = icp.add_subparsers(dest="ic_command", required=True)
    icsub.add_parser("run", parents=[common])
    for name in ("weakcheck", "visccheck", "solve", "compare"):
        sub.add_parser(name, parents=[common], help=f"run the scenario's {name} operations")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "generators":
        list_generators()
        return 0
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        threads = _threads(args.threads)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    group = {"run": None, "op": "op-" + str(getattr(args, "op_command", "")), "infconv": "infconv"}.get(
        args.command, args.command)
    only = None if group is None else set(OP_GROUPS[group])
    return run_scenario(args.scenario, args.out, args.tol, only, threads)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
