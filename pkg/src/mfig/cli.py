"""``mfig`` command line: one subcommand per analysis, JSON report out, optional CSV trace.

Exit status: 0 when every check passes, 1 when a check fails, 2 on bad input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .curvature import global_curvature, is_constant_curvature, local_curvature
from .dynamics import (costa_check, de_bruijn_check, dissipation_certificate, gradient_flow,
                       log_sobolev_check)
from .energies import energy_from_config
from .errors import MfigError
from .gamma import build_context
from .geodesics import GeodesicState, integrate_geodesic, relative_speed_drift, unit_speed
from .graphs import graph_from_spec
from .means import mean_from_name
from .products import c4_property_check, product_bound_check
from .search import SearchConfig
from .two_point import (TwoPointProblem, effectiveness, kappa_grid, kappa_k2,
                        kappa_min_upper_bound, transport_distance)

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return x


def dump_json(report: dict) -> str:
    return json.dumps(_jsonable(report), sort_keys=True, indent=2) + "\n"


# -- argument resolution -----------------------------------------------------

def _field(name, fn, *args):
    try:
        return fn(*args)
    except (MfigError, ValueError, OSError, json.JSONDecodeError) as exc:
        raise UsageError(name, str(exc)) from None


def _energy(spec: str):
    def build():
        s = spec.strip()
        if s.startswith("file:"):
            return energy_from_config(json.loads(Path(s[5:]).read_text()))
        if s.startswith("{"):
            return energy_from_config(json.loads(s))
        return energy_from_config(s)
    return _field("--energy", build)


def _vector(name, text):
    def parse():
        vals = [float(v) for v in text.split(",") if v.strip()]
        if not vals:
            raise ValueError("empty vector")
        return np.array(vals)
    return _field(name, parse)


def _common(args):
    energy = _energy(args.energy)
    mean = _field("--mean", mean_from_name, args.mean, energy)
    return energy, mean


def _search(args):
    return SearchConfig(grid_per_dim=args.grid_per_dim, multistarts=args.multistarts,
                        margin=args.margin, seed=args.seed)


def _base(args, command):
    return {"command": command, "mean": args.mean, "energy": args.energy, "seed": args.seed,
            "version": __version__}


def _write_csv(path, header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(float(v)) for v in r])
    Path(path).write_text(buf.getvalue())


# -- subcommands ---------------------------------------------------------------

def cmd_curvature(args):
    energy, mean = _common(args)
    graph = _field("--graph", graph_from_spec, args.graph)
    rep = _base(args, "curvature")
    rep["graph"] = args.graph
    ok = True
    if args.p is not None:
        p = _vector("--p", args.p)
        ctx = _field("--p", build_context, graph, mean, energy, p)
        rep["local"] = local_curvature(ctx).to_dict()
    if args.use_global:
        rep["global"] = global_curvature(graph, mean, energy, _search(args)).to_dict()
    if args.constant:
        c = is_constant_curvature(graph, mean, energy, args.tol, args.samples, args.seed)
        rep["constant"] = {"constant": c.constant, "value": c.value, "spread": c.spread,
                           "samples": c.samples}
    if len(rep) == len(_base(args, "")) + 1:
        raise UsageError("curvature", "pass at least one of --p, --global, --constant")
    return rep, ok


def cmd_two_point(args):
    energy, mean = _common(args)
    prob = _field("--energy", TwoPointProblem, mean, energy)
    rep = _base(args, "two-point")
    if args.distance is not None:
        a, b = args.distance
        rep["distance"] = {"x1": a, "x2": b, "value": _field("--distance", transport_distance, prob, a, b)}
    if args.efct:
        rep["efct"] = effectiveness(prob, search=_search(args)).to_dict()
    if args.bound:
        rep["upper_bound"] = kappa_min_upper_bound(prob)
    if args.kappa_at is not None:
        rep["kappa"] = {"x": args.kappa_at, "value": _field("--kappa-at", kappa_k2, prob, args.kappa_at)}
    if args.kappa_grid is not None:
        xs, ks = kappa_grid(prob, args.kappa_grid, args.margin)
        rep["kappa_grid"] = {"points": args.kappa_grid, "min": float(ks.min()), "max": float(ks.max())}
        args.trace = (["x", "kappa"], list(zip(xs, ks)))
    if len(rep) == len(_base(args, "")):
        raise UsageError("two-point", "pass at least one of --distance, --efct, --bound, --kappa-at, --kappa-grid")
    return rep, True


def cmd_geodesic(args):
    energy, mean = _common(args)
    graph = _field("--graph", graph_from_spec, args.graph)
    p0 = _vector("--p0", args.p0)
    f0 = _vector("--f0", args.f0)
    if args.unit_speed:
        f0 = _field("--f0", unit_speed, graph, mean, p0, f0)
    traj = _field("--p0", integrate_geodesic, graph, mean, GeodesicState(p0, f0), args.t_end, args.step)
    speeds = traj.speeds(graph, mean)
    energies = traj.energies(energy)
    drift = relative_speed_drift(traj, graph, mean)
    rep = _base(args, "geodesic")
    rep.update({"graph": args.graph, "t_end": args.t_end, "step": args.step,
                "boundary_stop": traj.boundary_stop, "final_time": float(traj.times[-1]),
                "final_p": traj.p[-1], "gamma1_relative_drift": drift, "tol": args.tol,
                "pass": drift <= args.tol})
    n = graph.n
    header = ["t", *[f"p{i + 1}" for i in range(n)], *[f"f{i + 1}" for i in range(n)], "gamma1", "E"]
    rows = [np.concatenate([[t], p, f, [g, e]])
            for t, p, f, g, e in zip(traj.times, traj.p, traj.f, speeds, energies)]
    args.trace = (header, rows)
    return rep, drift <= args.tol


def cmd_flow(args):
    energy, mean = _common(args)
    graph = _field("--graph", graph_from_spec, args.graph)
    p0 = _vector("--p0", args.p0)
    trace = _field("--p0", gradient_flow, graph, mean, energy, p0, args.t_end, args.step)
    db = de_bruijn_check(trace)
    rep = _base(args, "flow")
    rep.update({"graph": args.graph, "t_end": args.t_end, "step": args.step,
                "truncated": trace.truncated, "equilibrium": trace.equilibrium,
                "final_p": trace.states[-1], "de_bruijn_first_order": db.first_order,
                "de_bruijn_second_order": db.second_order})
    ok = True
    if args.kappa is not None:
        d = dissipation_certificate(trace, args.kappa)
        rep["dissipation"] = {"kappa": d.kappa, "worst_energy_slack": d.worst_energy_slack,
                              "worst_j_slack": d.worst_j_slack, "pass": d.passed}
        ok = d.passed
    args.trace = (["t", *[f"p{i + 1}" for i in range(graph.n)], "E", "I", "J"], list(trace.rows()))
    return rep, ok


def cmd_lsi(args):
    energy, mean = _common(args)
    graph = _field("--graph", graph_from_spec, args.graph)
    rep = _base(args, "lsi")
    rep["graph"] = args.graph
    kappa = args.kappa
    if kappa is None:
        g = global_curvature(graph, mean, energy, _search(args))
        kappa = g.kappa0
        rep["kappa_source"] = "global search"
    rep["kappa"] = kappa
    if not kappa > 0.0:
        rep["status"] = "precondition not met: kappa must be positive"
        rep["pass"] = False
        return rep, False
    r = log_sobolev_check(graph, mean, energy, kappa, args.samples, args.seed)
    rep.update({"samples": r.samples, "worst_ratio": r.worst_ratio, "worst_slack": r.worst_slack,
                "closed_form_error": r.closed_form_error, "status": r.status, "pass": r.passed})
    return rep, r.passed


def cmd_costa(args):
    energy = _energy(args.energy)
    graph = _field("--graph", graph_from_spec, args.graph)
    p0 = _vector("--p0", args.p0)
    r = _field("--energy", costa_check, graph, energy, p0, args.t_end, args.step, _search(args), args.tol)
    rep = _base(args, "costa")
    rep.pop("mean")
    rep.update({"graph": args.graph, "t_end": args.t_end, "step": args.step, **r.to_dict()})
    args.trace = (["t", *[f"p{i + 1}" for i in range(graph.n)], "E", "I", "J", "N"], list(r.trace.rows()))
    return rep, r.concavity_pass


def cmd_product(args):
    energy, mean = _common(args)
    g = _field("--g", graph_from_spec, args.g)
    h = _field("--h", graph_from_spec, args.h)
    rep = _base(args, "product-check")
    rep.update({"g": args.g, "h": args.h})
    ok = True
    if args.c4_samples > 0:
        c4 = _field("--mean", c4_property_check, mean, energy, args.c4_samples, args.seed)
        rep["c4_property"] = c4.to_dict()
        ok = ok and c4.passed
    b = _field("--energy", product_bound_check, g, h, mean, energy, None, None, None, _search(args))
    rep["product_bound"] = b.to_dict()
    ok = ok and b.passed
    rep["pass"] = ok
    return rep, ok


# -- parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--graph", default="k2", help="k<n> | path<n> | cycle<n> | q<d> | file:<path>")
    common.add_argument("--mean", default="logarithmic",
                        help="arithmetic | geometric | logarithmic | spectral | tim[:C=<float>]")
    common.add_argument("--energy", default="shannon",
                        help="shannon | quadratic | JSON object | file:<path>")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help="write the JSON report here instead of stdout")
    common.add_argument("--csv", help="write the trace or grid as CSV")
    common.add_argument("--margin", type=float, default=1e-4, help="interior margin for searches")
    common.add_argument("--tol", type=float, default=None, help="pass/fail tolerance")
    common.add_argument("--grid-per-dim", type=int, default=None)
    common.add_argument("--multistarts", type=int, default=16)

    ap = argparse.ArgumentParser(prog="mfig", description="Mean-field information Gamma calculus on graphs")
    ap.add_argument("--version", action="version", version=f"mfig {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("run", help="run the command described by a JSON config file")

    c = sub.add_parser("curvature", parents=[common], help="local / global / constant curvature")
    c.add_argument("--p", help="comma-separated point for the local bound")
    c.add_argument("--global", dest="use_global", action="store_true")
    c.add_argument("--constant", action="store_true")
    c.add_argument("--samples", type=int, default=64)
    c.set_defaults(func=cmd_curvature, tol_default=1e-6)

    t = sub.add_parser("two-point", parents=[common], help="two-point distances, curvature, effectiveness")
    t.add_argument("--distance", nargs=2, type=float, metavar=("A", "B"))
    t.add_argument("--efct", action="store_true")
    t.add_argument("--bound", action="store_true")
    t.add_argument("--kappa-at", type=float)
    t.add_argument("--kappa-grid", type=int)
    t.set_defaults(func=cmd_two_point, tol_default=1e-9)

    g = sub.add_parser("geodesic", parents=[common], help="integrate a constant-speed geodesic")
    g.add_argument("--p0", required=True)
    g.add_argument("--f0", required=True)
    g.add_argument("--t-end", type=float, default=0.1)
    g.add_argument("--step", type=float, default=1e-4)
    g.add_argument("--unit-speed", action="store_true")
    g.set_defaults(func=cmd_geodesic, tol_default=1e-8)

    f = sub.add_parser("flow", parents=[common], help="gradient flow with De Bruijn and dissipation checks")
    f.add_argument("--p0", required=True)
    f.add_argument("--t-end", type=float, default=1.0)
    f.add_argument("--step", type=float, default=1e-3)
    f.add_argument("--kappa", type=float)
    f.set_defaults(func=cmd_flow, tol_default=1e-10)

    l = sub.add_parser("lsi", parents=[common], help="sampled log-Sobolev inequality")
    l.add_argument("--kappa", type=float)
    l.add_argument("--samples", type=int, default=10000)
    l.set_defaults(func=cmd_lsi, tol_default=1e-12)

    k = sub.add_parser("costa", parents=[common], help="entropy power concavity along the heat flow")
    k.add_argument("--p0", required=True)
    k.add_argument("--t-end", type=float, default=2.0)
    k.add_argument("--step", type=float, default=1e-3)
    k.set_defaults(func=cmd_costa, tol_default=1e-7)

    pc = sub.add_parser("product-check", parents=[common], help="C4-property and product curvature bound")
    pc.add_argument("--g", required=True)
    pc.add_argument("--h", required=True)
    pc.add_argument("--c4-samples", type=int, default=10000)
    pc.set_defaults(func=cmd_product, tol_default=1e-9)
    return ap


def _config_argv(parser, path: str) -> list[str]:
    """Translate a JSON run config into an argument vector, rejecting unknown fields."""
    try:
        cfg = json.loads(Path(path).read_text())
    except OSError as exc:
        raise UsageError("config", f"cannot read {path!r}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError("config", f"not valid JSON ({exc.msg})") from None
    if not isinstance(cfg, dict) or not cfg:
        raise UsageError("config", "expected a non-empty JSON object")
    command = cfg.get("command")
    subparsers = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    if command not in subparsers.choices or command == "run":
        raise UsageError("command", f"unknown command {command!r}")
    sub = subparsers.choices[command]
    known = {o: a for a in sub._actions for o in a.option_strings}
    argv = [command]
    for key, val in cfg.items():
        if key == "command":
            continue
        flag = "--" + key.replace("_", "-")
        if flag not in known:
            raise UsageError(key, f"unknown field for command {command!r}")
        if key == "energy" and isinstance(val, dict):
            val = json.dumps(val, sort_keys=True)
        if isinstance(val, bool):
            if val:
                argv.append(flag)
        elif isinstance(val, list):
            argv += [flag, *map(str, val)]
        else:
            argv += [flag, str(val)]
    return argv


def main(argv=None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        if argv[:1] == ["run"]:
            if len(argv) != 2:
                raise UsageError("config", "usage: mfig run <config.json>")
            argv = _config_argv(parser, argv[1])
        try:
            args = parser.parse_args(argv)
        except SystemExit as exc:
            return EXIT_PASS if exc.code in (0, None) else EXIT_USAGE
        if args.tol is None:
            args.tol = args.tol_default
        args.trace = None
        report, ok = args.func(args)
    except (UsageError, MfigError) as exc:
        print(f"mfig: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    report["pass"] = bool(ok)
    text = dump_json(report)
    # artifacts are written only once everything has succeeded
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if args.csv and args.trace is not None:
        _write_csv(args.csv, *args.trace)
    return EXIT_PASS if ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
