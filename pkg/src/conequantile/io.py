"""Reading samples, models, cones and point sets; writing regions as JSON and SVG."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .cones import ConvexCone
from .config import GEOM_TOL
from .distributions import EmpiricalSample, GaussianModel
from .errors import ConfigurationError
from .regions import CRegion, vertices_2d


def _num(x):
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        raise ValueError("NaN cannot be serialized")
    return x


def _parse_num(v, what):
    if isinstance(v, str):
        s = v.strip().lower()
        if s in ("inf", "+inf", "infinity"):
            return math.inf
        if s in ("-inf", "-infinity"):
            return -math.inf
    try:
        return float(v)
    except (TypeError, ValueError):
        raise ConfigurationError(f"{what}: expected a number, got {v!r}") from None


def to_jsonable(obj):
    """Recursively convert arrays and extended reals for ``json.dumps``."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _num(obj)
    if hasattr(obj, "value") and isinstance(getattr(obj, "value"), str):  # enums
        return obj.value
    return obj


def dumps(obj):
    # repr-based floats are the shortest strings that parse back to the same double
    return json.dumps(to_jsonable(obj), indent=2, sort_keys=False) + "\n"


def _read_json(path, what):
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ConfigurationError(f"{what}: file not found: {path}") from None
    except json.JSONDecodeError as e:
        raise ConfigurationError(f"{what}: invalid JSON in {path}: {e}") from None


# ---------------------------------------------------------------------------
# samples and point sets
# ---------------------------------------------------------------------------

def _is_number(s):
    try:
        float(s)
        return True
    except ValueError:
        return False


def read_points_csv(path, what="points"):
    """Rows of numbers with an optional header; a ``weight`` column is split off.

    Returns ``(points, weights or None)``.
    """
    try:
        with open(path, newline="") as fh:
            rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    except FileNotFoundError:
        raise ConfigurationError(f"{what}: file not found: {path}") from None
    if not rows:
        raise ConfigurationError(f"{what}: {path} contains no rows")
    header = None
    if not all(_is_number(c) for c in rows[0]):
        header = [c.strip().lower() for c in rows[0]]
        rows = rows[1:]
    if not rows:
        raise ConfigurationError(f"{what}: {path} has a header but no data")
    width = len(rows[0])
    data = []
    for i, r in enumerate(rows, start=2 if header else 1):
        if len(r) != width:
            raise ConfigurationError(f"{what}: line {i} has {len(r)} fields, expected {width}")
        try:
            data.append([float(c) for c in r])
        except ValueError:
            raise ConfigurationError(f"{what}: line {i} has a non-numeric field") from None
    A = np.array(data, dtype=float)
    if not np.all(np.isfinite(A)):
        raise ConfigurationError(f"{what}: non-finite coordinate in {path}")
    weights = None
    if header is not None and "weight" in header:
        j = header.index("weight")
        weights = A[:, j]
        A = np.delete(A, j, axis=1)
        if np.any(weights < 0) or weights.sum() <= 0:
            raise ConfigurationError(f"{what}: weights must be nonnegative with positive sum")
        weights = weights / weights.sum()
    if A.shape[1] == 0:
        raise ConfigurationError(f"{what}: no coordinate columns")
    return A, weights


def read_model(data=None, gaussian=None):
    if (data is None) == (gaussian is None):
        raise ConfigurationError("model: give exactly one of --data and --gaussian")
    if data is not None:
        pts, w = read_points_csv(data, "data")
        return EmpiricalSample(pts, w)
    spec = _read_json(gaussian, "gaussian")
    if not isinstance(spec, dict) or "mu" not in spec or "sigma" not in spec:
        raise ConfigurationError("gaussian: JSON must have fields 'mu' and 'sigma'")
    try:
        return GaussianModel(spec["mu"], spec["sigma"])
    except ValueError as e:
        raise ConfigurationError(f"gaussian: {e}") from None


def parse_cone(spec, dim, tol=GEOM_TOL):
    """Preset ``orthant``, ``zero``, ``halfspace:<w1,w2,...>`` or a JSON cone file."""
    s = str(spec).strip()
    if s == "orthant":
        return ConvexCone.orthant(dim, tol=tol)
    if s == "zero":
        return ConvexCone.zero(dim, tol=tol)
    if s.startswith("halfspace:"):
        try:
            w = [float(t) for t in s.split(":", 1)[1].split(",")]
        except ValueError:
            raise ConfigurationError(f"cone: bad halfspace normal in {s!r}") from None
        if len(w) != dim:
            raise ConfigurationError(f"cone: halfspace normal has {len(w)} components, data has {dim}")
        return ConvexCone.halfspace(w, tol=tol)
    obj = _read_json(s, "cone")
    return cone_from_json(obj, dim, tol)


def cone_from_json(obj, dim=None, tol=GEOM_TOL):
    if not isinstance(obj, dict) or "generators" not in obj:
        raise ConfigurationError("cone: JSON must have a 'generators' field")
    d = int(obj.get("dim", dim if dim is not None else len(obj["generators"][0])))
    if dim is not None and d != dim:
        raise ConfigurationError(f"cone: dim {d} does not match data dimension {dim}")
    gens = np.asarray(obj["generators"], dtype=float).reshape(-1, d)
    duals = obj.get("dual_generators")
    duals = None if duals is None else np.asarray(duals, dtype=float).reshape(-1, d)
    return ConvexCone(d, gens, duals, tol=tol)


def read_genset_points(path, dim):
    """Generator points from ``{"G": [[...], ...]}`` JSON or a CSV file."""
    if str(path).lower().endswith(".json"):
        obj = _read_json(path, "generator set")
        if not isinstance(obj, dict) or "G" not in obj:
            raise ConfigurationError("generator set: JSON must have a 'G' field")
        G = np.asarray(obj["G"], dtype=float)
    else:
        G, _ = read_points_csv(path, "generator set")
    G = G.reshape(-1, dim) if G.size else np.zeros((0, dim))
    if G.shape[1] != dim:
        raise ConfigurationError(f"generator set: points have {G.shape[1]} coordinates, expected {dim}")
    return G


# ---------------------------------------------------------------------------
# regions
# ---------------------------------------------------------------------------

def region_to_json(r, p=None, bbox=None):
    level = p if p is not None else r.level
    out = {"p": None if level is None else _num(level), "variant": r.variant, "cone": r.cone.to_spec()}
    if r.variant == "genrep":
        out["G"] = r.generators.tolist()
    hs = r.halfspaces if r.variant != "whole" else []
    out["halfspaces"] = [{"w": h.normal.tolist(), "b": _num(h.offset)} for h in hs]
    if bbox is not None and r.dim == 2:
        out["polygon"] = vertices_2d(r, bbox).tolist()
    return to_jsonable(out)


def region_from_json(obj, tol=GEOM_TOL):
    cone = cone_from_json(obj["cone"], tol=tol)
    p = obj.get("p")
    level = None if p is None else _parse_num(p, "p")
    v = obj.get("variant", "hrep")
    if v == "whole":
        return CRegion.whole(cone, level)
    if v == "empty":
        return CRegion.empty(cone, level)
    if v == "genrep":
        return CRegion.from_generators(cone, obj["G"], level)
    hs = obj["halfspaces"]
    N = np.array([h["w"] for h in hs], dtype=float).reshape(-1, cone.dim)
    b = np.array([_parse_num(h["b"], "halfspace offset") for h in hs], dtype=float)
    return CRegion.from_halfspaces(cone, N, b, level)


# ---------------------------------------------------------------------------
# SVG
# ---------------------------------------------------------------------------

_PALETTE = ["#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d", "#666666"]


def regions_svg(points, regions, bbox, size=480):
    """Sample points and the boundary of each region clipped to ``bbox``; one path per region."""
    x0, y0, x1, y1 = map(float, bbox)
    sx = size / (x1 - x0) if x1 > x0 else 1.0
    sy = size / (y1 - y0) if y1 > y0 else 1.0

    def tx(x, y):
        return f"{(x - x0) * sx:.3f},{(y1 - y) * sy:.3f}"

    lines = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
             f'<rect x="0" y="0" width="{size}" height="{size}" fill="white" stroke="black"/>']
    for k, (p, r) in enumerate(regions):
        poly = vertices_2d(r, bbox)
        if len(poly) < 3:
            continue
        col = _PALETTE[k % len(_PALETTE)]
        d = "M " + " L ".join(tx(x, y) for x, y in poly) + " Z"
        lines.append(f'<path d="{d}" fill="{col}" fill-opacity="0.12" stroke="{col}" stroke-width="1.5"><title>p={p}</title></path>')
    if points is not None:
        for x, y in np.asarray(points)[:, :2]:
            cx, cy = tx(x, y).split(",")
            lines.append(f'<circle cx="{cx}" cy="{cy}" r="2.5" fill="black"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
