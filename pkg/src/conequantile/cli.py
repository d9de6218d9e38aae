"""Command line entry point: ``conequantile <command> ...``.

Exit codes: 0 success, 1 selftest failure, 2 malformed input, 3 numerical
failure (degenerate cone, unsupported dimension).
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__, galois, io
from .conecdf import ConeCdf
from .cones import ConvexCone
from .config import GEOM_TOL
from .distributions import EmpiricalSample
from .errors import ConfigurationError, DegenerateConeError, InvalidDirectionError, UnsupportedDimensionError
from .probes import ProbeGrid
from .randomset import CompactTestSet, SeededRng, capacity_mc
from .regions import QuantileFn

log = logging.getLogger("conequantile")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigurationError(message)


def _add_model(p, cone=True):
    g = p.add_argument_group("model")
    g.add_argument("--data", help="CSV sample (optional header, optional 'weight' column)")
    g.add_argument("--gaussian", help='JSON {"mu": [...], "sigma": [[...]]}')
    if cone:
        g.add_argument("--cone", default="orthant", help="orthant | zero | halfspace:<w1,...> | cone JSON file")


def _add_out(p):
    p.add_argument("--json", dest="json_out", help="write JSON here instead of stdout")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=GEOM_TOL, help="geometric tolerance")
    common.add_argument("--resolution", type=int, default=64, help="direction grid resolution")
    common.add_argument("--grid", type=int, default=41, help="probe points per axis")
    common.add_argument("--directions", choices=["auto", "critical", "grid"], default="auto")
    common.add_argument("-v", "--verbose", action="store_true")

    ap = _Parser(prog="conequantile", description="Cone distribution functions and set-valued quantiles.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("cdf", parents=[common], help="lower C-distribution function at points")
    _add_model(p)
    p.add_argument("--points", help="CSV of query points")
    p.add_argument("--z", action="append", default=[], help="query point 'x,y,...' (repeatable)")
    p.add_argument("--w", help="also report F_w for this direction 'w1,w2,...'")
    _add_out(p)

    p = sub.add_parser("depth", parents=[common], help="Tukey halfspace depth (C = {0})")
    _add_model(p, cone=False)
    p.add_argument("--points")
    p.add_argument("--z", action="append", default=[])
    _add_out(p)

    p = sub.add_parser("quantile", parents=[common], help="lower C-quantile regions")
    _add_model(p)
    p.add_argument("--p", dest="levels", type=float, action="append", required=True, help="level in [0,1] (repeatable)")
    p.add_argument("--bbox", help="xmin,ymin,xmax,ymax for polygons and SVG")
    p.add_argument("--svg", help="write nested region plot (planar data only)")
    p.add_argument("--dual", action="store_true", help="use the strict-cdf representation")
    _add_out(p)

    p = sub.add_parser("closure", parents=[common], help="inf-extension and closures of a generator set")
    _add_model(p)
    p.add_argument("--G", dest="genset", required=True, help='generator set: JSON {"G": [...]} or CSV')
    p.add_argument("--bbox")
    _add_out(p)

    p = sub.add_parser("rank", parents=[common], help="compare two generator sets")
    _add_model(p)
    p.add_argument("--D1", required=True)
    p.add_argument("--D2", required=True)
    _add_out(p)

    p = sub.add_parser("simulate", parents=[common], help="capacity functional: exact vs Monte Carlo")
    _add_model(p)
    p.add_argument("--K", required=True, help="CSV of test points")
    p.add_argument("--n", type=int, default=20000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trace", help="per-draw CSV (u, hit)")
    _add_out(p)

    p = sub.add_parser("selftest", parents=[common], help="run the invariant battery on built-in fixtures")
    _add_out(p)
    return ap


def _vec(s, what, dim=None):
    try:
        v = np.array([float(t) for t in s.split(",")])
    except ValueError:
        raise ConfigurationError(f"{what}: expected comma-separated numbers, got {s!r}") from None
    if dim is not None and len(v) != dim:
        raise ConfigurationError(f"{what}: expected {dim} components, got {len(v)}")
    return v


def _queries(args, dim):
    rows = [_vec(s, "--z", dim) for s in args.z]
    if args.points:
        P, _ = io.read_points_csv(args.points, "points")
        if P.shape[1] != dim:
            raise ConfigurationError(f"points: {P.shape[1]} columns, model has dimension {dim}")
        rows.extend(P)
    if not rows:
        raise ConfigurationError("give query points with --z or --points")
    return np.array(rows)


def _config(args):
    keys = ["command", "data", "gaussian", "cone", "tol", "resolution", "grid", "directions", "levels",
            "bbox", "genset", "D1", "D2", "K", "n", "seed", "dual"]
    return {k: getattr(args, k) for k in keys if getattr(args, k, None) is not None}


def _setup(args, cone_spec=None):
    model = io.read_model(args.data, args.gaussian)
    spec = cone_spec or args.cone
    cone = io.parse_cone(spec, model.dim, tol=args.tol)
    if args.resolution < 1:
        raise ConfigurationError("--resolution must be >= 1")
    c = ConeCdf.build(model, cone, resolution=args.resolution, directions=args.directions)
    return model, cone, c


def _bbox(args, model):
    if getattr(args, "bbox", None):
        b = _vec(args.bbox, "--bbox", 4)
        if b[2] <= b[0] or b[3] <= b[1]:
            raise ConfigurationError("--bbox must satisfy xmin < xmax and ymin < ymax")
        return tuple(b)
    if model.dim != 2:
        return None
    return ProbeGrid.for_model(model, per_axis=max(args.grid, 2)).bbox


def _probe(args, model):
    if args.grid < 2:
        raise ConfigurationError("--grid must be >= 2")
    return ProbeGrid.for_model(model, per_axis=args.grid)


def cmd_cdf(args):
    model, cone, c = _setup(args)
    Z = _queries(args, model.dim)
    vals, dirs = c.lower_cdf_many(Z)
    rec = {"exact": c.is_exact, "n_directions": len(c.dirs), "direction_kind": c.dirs.kind,
           "results": [{"z": z, "F_C": v, "argmin_w": w} for z, v, w in zip(Z, vals, dirs)]}
    if args.w:
        w = _vec(args.w, "--w", model.dim)
        for r, z in zip(rec["results"], Z):
            r["F_w"] = c.w_cdf(w, z)
    return rec


def cmd_depth(args):
    model, cone, c = _setup(args, cone_spec="zero")
    Z = _queries(args, model.dim)
    vals, _ = c.lower_cdf_many(Z)
    return {"exact": c.is_exact, "results": [{"z": z, "depth": v} for z, v in zip(Z, vals)]}


def cmd_quantile(args):
    model, cone, c = _setup(args)
    q = QuantileFn(c)
    for p in args.levels:
        if not 0.0 <= p <= 1.0:
            raise ConfigurationError(f"--p must lie in [0, 1], got {p}")
    bbox = _bbox(args, model)
    levels = sorted(args.levels)
    regions = [(p, q.dual_quantile(p) if args.dual else q.lower_quantile(p)) for p in levels]
    out = {"n_directions": len(c.dirs), "direction_kind": c.dirs.kind,
           "outer_approximation": c.dirs.kind != "exact-2d-critical",
           "regions": [io.region_to_json(r, p, bbox) for p, r in regions]}
    if args.svg:
        if model.dim != 2:
            raise UnsupportedDimensionError("SVG output needs planar data")
        pts = model.points if isinstance(model, EmpiricalSample) else None
        Path(args.svg).write_text(io.regions_svg(pts, regions, bbox))
    return out


def _genset(path, cone):
    return galois.GenSet(io.read_genset_points(path, cone.dim), cone)


def cmd_closure(args):
    model, cone, c = _setup(args)
    q = QuantileFn(c)
    D = _genset(args.genset, cone)
    rep = galois.closure_report(q, D, _probe(args, model))
    bbox = _bbox(args, model)
    return {"input": {"G": D.G}, "value": rep.value,
            "psi_closure": io.region_to_json(rep.psi_closure, bbox=bbox),
            "phi_closure": io.region_to_json(rep.phi_closure, bbox=bbox),
            "is_psi_fixed": rep.is_psi_fixed, "is_phi_fixed": rep.is_phi_fixed}


def cmd_rank(args):
    model, cone, c = _setup(args)
    D1, D2 = _genset(args.D1, cone), _genset(args.D2, cone)
    return {"F_inf": [galois.inf_extension(c, D1), galois.inf_extension(c, D2)],
            "psi": galois.set_rank(c, D1, D2, "psi"), "phi": galois.set_rank(c, D1, D2, "phi")}


def cmd_simulate(args):
    model, cone, c = _setup(args)
    K, _ = io.read_points_csv(args.K, "K")
    if K.shape[1] != model.dim:
        raise ConfigurationError(f"K: {K.shape[1]} columns, model has dimension {model.dim}")
    est, (u, hit) = capacity_mc(QuantileFn(c), CompactTestSet(K), args.n, SeededRng(args.seed), trace=True)
    if args.trace:
        with open(args.trace, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["u", "hit"])
            for a, b in zip(u, hit):
                w.writerow([repr(float(a)), int(b)])
    rec = est.to_dict()
    rec["within_3_std_error"] = est.within(3.0)
    return rec


def cmd_selftest(args):
    from .selftest import run_selftest

    rows = run_selftest()
    for name, ok, detail in rows:
        print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}", file=sys.stderr)
    return {"results": [{"name": n, "passed": ok, "detail": d} for n, ok, d in rows],
            "passed": all(ok for _, ok, _ in rows)}


COMMANDS = {"cdf": cmd_cdf, "depth": cmd_depth, "quantile": cmd_quantile, "closure": cmd_closure,
            "rank": cmd_rank, "simulate": cmd_simulate, "selftest": cmd_selftest}


def run(argv=None):
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
        rec = COMMANDS[args.command](args)
        rec = {"config": _config(args), **rec}
        text = io.dumps(rec)
        if getattr(args, "json_out", None):
            Path(args.json_out).write_text(text)
        else:
            sys.stdout.write(text)
        if args.command == "selftest" and not rec["passed"]:
            return 1
        return 0
    except (DegenerateConeError, UnsupportedDimensionError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except (ConfigurationError, InvalidDirectionError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


def main():
    sys.exit(run())
