"""Hot loops with a numba implementation and a pure-numpy twin.

The backend is read once from ``CONE_QUANTILE_BACKEND`` (``numba`` or
``numpy``; default ``numba`` when it imports) and may be switched at runtime
with :func:`set_backend`. Both backends return bit-identical results for
uniform sample weights (masses are passed as ones and summed exactly).

``CONE_QUANTILE_THREADS`` caps the numba thread pool.
"""

import math
import os

import numpy as np

try:
    import numba
    from numba import njit, prange

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAS_NUMBA = False

TWO_PI = 2.0 * math.pi

_backend = os.environ.get("CONE_QUANTILE_BACKEND", "numba" if HAS_NUMBA else "numpy").lower()
if _backend not in ("numba", "numpy"):
    raise ValueError(f"CONE_QUANTILE_BACKEND must be 'numba' or 'numpy', got {_backend!r}")
if _backend == "numba" and not HAS_NUMBA:  # pragma: no cover
    _backend = "numpy"

if HAS_NUMBA and "NUMBA_THREADING_LAYER" not in os.environ:
    # the bundled TBB is often too old; workqueue is always available
    numba.config.THREADING_LAYER = "workqueue"

if HAS_NUMBA and os.environ.get("CONE_QUANTILE_THREADS"):
    numba.set_num_threads(max(1, min(int(os.environ["CONE_QUANTILE_THREADS"]), numba.config.NUMBA_NUM_THREADS)))


def get_backend():
    return _backend


def set_backend(name):
    """Select ``"numba"`` or ``"numpy"``; returns the previous backend."""
    global _backend
    name = name.lower()
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAS_NUMBA:
        raise RuntimeError("numba is not importable")
    prev, _backend = _backend, name
    return prev


# ---------------------------------------------------------------------------
# numpy implementations
# ---------------------------------------------------------------------------

def _sweep_one_np(px, py, mass, zx, zy, arcs, tol, tol_ang):
    rx = px - zx
    ry = py - zy
    at_z = (np.abs(rx) <= tol) & (np.abs(ry) <= tol)
    base = mass[at_z].sum()
    rx, ry, m = rx[~at_z], ry[~at_z], mass[~at_z]
    phi = np.arctan2(ry, rx)
    best, best_th = np.inf, np.nan
    for a in range(arcs.shape[0]):
        th0, width = arcs[a, 0], arcs[a, 1]
        for th in (th0, th0 + width):
            v = base + m[np.cos(th) * rx + np.sin(th) * ry <= tol].sum()
            if v < best:
                best, best_th = v, th
        ang = np.concatenate((np.mod(phi + 0.5 * np.pi - th0, TWO_PI), np.mod(phi + 1.5 * np.pi - th0, TWO_PI)))
        delta = np.concatenate((m, -m))
        keep = (ang > tol_ang) & (ang < width - tol_ang)
        ang, delta = ang[keep], delta[keep]
        order = np.argsort(ang, kind="stable")
        ang, delta = ang[order], delta[order]
        first = ang[0] if ang.size else width
        mid = th0 + 0.5 * first
        v0 = base + m[np.cos(mid) * rx + np.sin(mid) * ry <= 0.0].sum()
        if v0 < best:
            best, best_th = v0, mid
        if ang.size == 0:
            continue
        new_group = np.concatenate(([False], np.diff(ang) > tol_ang))
        gid = np.cumsum(new_group)
        ng = gid[-1] + 1
        # sequential sums so the numba twin reproduces them exactly
        gdelta = np.zeros(ng)
        for k in range(delta.size):
            gdelta[gid[k]] += delta[k]
        vals = np.cumsum(np.concatenate(([v0], gdelta)))[1:]
        last_in_group = np.flatnonzero(np.concatenate((new_group[1:], [True])))
        group_end = ang[last_in_group]
        next_start = np.concatenate((ang[last_in_group[:-1] + 1], [width]))
        j = int(np.argmin(vals))
        if vals[j] < best:
            best, best_th = vals[j], th0 + 0.5 * (group_end[j] + next_start[j])
    return best, best_th


def _sweep_np(px, py, mass, Z, arcs, tol, tol_ang):
    q = Z.shape[0]
    vals = np.empty(q)
    thetas = np.empty(q)
    for k in range(q):
        vals[k], thetas[k] = _sweep_one_np(px, py, mass, Z[k, 0], Z[k, 1], arcs, tol, tol_ang)
    return vals, thetas


def _grid_min_np(sorted_proj, cum, zproj, slack):
    m = sorted_proj.shape[0]
    q = zproj.shape[0]
    best = np.full(q, np.inf)
    arg = np.zeros(q, dtype=np.int64)
    padded = np.concatenate((np.zeros((m, 1)), cum), axis=1)
    for j in range(m):
        idx = np.searchsorted(sorted_proj[j], zproj[:, j] + slack, side="right")
        v = padded[j, idx]
        better = v < best
        best[better] = v[better]
        arg[better] = j
    return best, arg


def _halfspace_member_np(normals, offsets, Z, tol):
    out = np.empty(Z.shape[0], dtype=bool)
    chunk = max(1, 2_000_000 // max(1, normals.shape[0]))
    for s in range(0, Z.shape[0], chunk):
        proj = Z[s:s + chunk] @ normals.T
        out[s:s + chunk] = np.all(proj >= offsets - tol, axis=1)
    return out


def _clip_np(poly, normals, offsets, tol):
    pts = [tuple(p) for p in poly]
    for k in range(normals.shape[0]):
        if not pts:
            break
        nx, ny, b = normals[k, 0], normals[k, 1], offsets[k]
        out = []
        npts = len(pts)
        for i in range(npts):
            sx, sy = pts[i - 1]
            ex, ey = pts[i]
            fs = nx * sx + ny * sy - b
            fe = nx * ex + ny * ey - b
            if fe >= -tol:
                if fs < -tol:
                    t = fs / (fs - fe)
                    out.append((sx + t * (ex - sx), sy + t * (ey - sy)))
                out.append((ex, ey))
            elif fs >= -tol:
                t = fs / (fs - fe)
                out.append((sx + t * (ex - sx), sy + t * (ey - sy)))
        pts = out
    return np.array(pts, dtype=float).reshape(-1, 2)


# ---------------------------------------------------------------------------
# numba implementations
# ---------------------------------------------------------------------------

if HAS_NUMBA:

    @njit(cache=True)
    def _sweep_one_nb(px, py, mass, zx, zy, arcs, tol, tol_ang):
        n = px.shape[0]
        rx = np.empty(n)
        ry = np.empty(n)
        m = np.empty(n)
        phi = np.empty(n)
        base = 0.0
        k = 0
        for i in range(n):
            dx = px[i] - zx
            dy = py[i] - zy
            if abs(dx) <= tol and abs(dy) <= tol:
                base += mass[i]
            else:
                rx[k] = dx
                ry[k] = dy
                m[k] = mass[i]
                phi[k] = math.atan2(dy, dx)
                k += 1
        best = np.inf
        best_th = np.nan
        ang = np.empty(2 * k)
        delta = np.empty(2 * k)
        for a in range(arcs.shape[0]):
            th0 = arcs[a, 0]
            width = arcs[a, 1]
            for e in range(2):
                th = th0 + e * width
                c = math.cos(th)
                s = math.sin(th)
                v = base
                for i in range(k):
                    if c * rx[i] + s * ry[i] <= tol:
                        v += m[i]
                if v < best:
                    best = v
                    best_th = th
            ne = 0
            for i in range(k):
                a_in = (phi[i] + 0.5 * math.pi - th0) % TWO_PI
                if a_in > tol_ang and a_in < width - tol_ang:
                    ang[ne] = a_in
                    delta[ne] = m[i]
                    ne += 1
            for i in range(k):
                a_out = (phi[i] + 1.5 * math.pi - th0) % TWO_PI
                if a_out > tol_ang and a_out < width - tol_ang:
                    ang[ne] = a_out
                    delta[ne] = -m[i]
                    ne += 1
            order = np.argsort(ang[:ne], kind="mergesort")
            first = ang[order[0]] if ne > 0 else width
            mid = th0 + 0.5 * first
            c = math.cos(mid)
            s = math.sin(mid)
            v = base
            for i in range(k):
                if c * rx[i] + s * ry[i] <= 0.0:
                    v += m[i]
            if v < best:
                best = v
                best_th = mid
            j = 0
            while j < ne:
                gd = 0.0
                prev = ang[order[j]]
                gd += delta[order[j]]
                j += 1
                while j < ne and ang[order[j]] - prev <= tol_ang:
                    prev = ang[order[j]]
                    gd += delta[order[j]]
                    j += 1
                v += gd
                nxt = ang[order[j]] if j < ne else width
                if v < best:
                    best = v
                    best_th = th0 + 0.5 * (prev + nxt)
        return best, best_th

    @njit(cache=True, parallel=True)
    def _sweep_nb(px, py, mass, Z, arcs, tol, tol_ang):
        q = Z.shape[0]
        vals = np.empty(q)
        thetas = np.empty(q)
        for k in prange(q):
            vals[k], thetas[k] = _sweep_one_nb(px, py, mass, Z[k, 0], Z[k, 1], arcs, tol, tol_ang)
        return vals, thetas

    @njit(cache=True, parallel=True)
    def _grid_min_nb(sorted_proj, cum, zproj, slack):
        m = sorted_proj.shape[0]
        q = zproj.shape[0]
        best = np.empty(q)
        arg = np.zeros(q, dtype=np.int64)
        for k in prange(q):
            b = np.inf
            bj = 0
            for j in range(m):
                idx = np.searchsorted(sorted_proj[j], zproj[k, j] + slack, side="right")
                v = cum[j, idx - 1] if idx > 0 else 0.0
                if v < b:
                    b = v
                    bj = j
            best[k] = b
            arg[k] = bj
        return best, arg

    @njit(cache=True, parallel=True)
    def _halfspace_member_nb(normals, offsets, Z, tol):
        q = Z.shape[0]
        m = normals.shape[0]
        d = normals.shape[1]
        out = np.empty(q, dtype=np.bool_)
        for k in prange(q):
            ok = True
            for j in range(m):
                s = 0.0
                for t in range(d):
                    s += Z[k, t] * normals[j, t]
                if s < offsets[j] - tol:
                    ok = False
                    break
            out[k] = ok
        return out

    @njit(cache=True)
    def _clip_nb(poly, normals, offsets, tol):
        cap = poly.shape[0] + normals.shape[0] + 2
        cur = np.empty((cap, 2))
        nxt = np.empty((cap, 2))
        npts = poly.shape[0]
        cur[:npts] = poly
        for k in range(normals.shape[0]):
            if npts == 0:
                break
            nx = normals[k, 0]
            ny = normals[k, 1]
            b = offsets[k]
            no = 0
            for i in range(npts):
                sx = cur[i - 1, 0] if i > 0 else cur[npts - 1, 0]
                sy = cur[i - 1, 1] if i > 0 else cur[npts - 1, 1]
                ex = cur[i, 0]
                ey = cur[i, 1]
                fs = nx * sx + ny * sy - b
                fe = nx * ex + ny * ey - b
                if fe >= -tol:
                    if fs < -tol:
                        t = fs / (fs - fe)
                        nxt[no, 0] = sx + t * (ex - sx)
                        nxt[no, 1] = sy + t * (ey - sy)
                        no += 1
                    nxt[no, 0] = ex
                    nxt[no, 1] = ey
                    no += 1
                elif fs >= -tol:
                    t = fs / (fs - fe)
                    nxt[no, 0] = sx + t * (ex - sx)
                    nxt[no, 1] = sy + t * (ey - sy)
                    no += 1
            cur, nxt = nxt, cur
            npts = no
        return cur[:npts].copy()


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------

def sweep_min_2d(points, mass, Z, arcs, tol, tol_ang):
    """Exact minimum over each angular arc of ``sum(mass[w @ (x - z) <= 0])``.

    ``arcs`` is a ``(k, 2)`` array of ``(start_angle, width)``. Returns the
    minimum mass and the angle where it is attained, per query row of ``Z``.
    """
    points = np.ascontiguousarray(points, dtype=float)
    px = np.ascontiguousarray(points[:, 0])
    py = np.ascontiguousarray(points[:, 1])
    mass = np.ascontiguousarray(mass, dtype=float)
    Z = np.ascontiguousarray(np.atleast_2d(Z), dtype=float)
    arcs = np.ascontiguousarray(np.atleast_2d(arcs), dtype=float).reshape(-1, 2)
    if _backend == "numba":
        return _sweep_nb(px, py, mass, Z, arcs, float(tol), float(tol_ang))
    return _sweep_np(px, py, mass, Z, arcs, float(tol), float(tol_ang))


def grid_min(sorted_proj, cum, zproj, slack):
    """Per query, the minimum over directions of the cumulative mass at ``zproj + slack``.

    ``sorted_proj[j]`` holds the ascending projections onto direction ``j``
    and ``cum[j]`` the matching cumulative masses.
    """
    sorted_proj = np.ascontiguousarray(sorted_proj, dtype=float)
    cum = np.ascontiguousarray(cum, dtype=float)
    zproj = np.ascontiguousarray(np.atleast_2d(zproj), dtype=float)
    if _backend == "numba":
        return _grid_min_nb(sorted_proj, cum, zproj, float(slack))
    return _grid_min_np(sorted_proj, cum, zproj, float(slack))


def halfspace_member(normals, offsets, Z, tol):
    """Boolean mask: row ``z`` of ``Z`` satisfies ``normals @ z >= offsets - tol``."""
    normals = np.ascontiguousarray(normals, dtype=float)
    offsets = np.ascontiguousarray(offsets, dtype=float)
    Z = np.ascontiguousarray(np.atleast_2d(Z), dtype=float)
    if normals.shape[0] == 0:
        return np.ones(Z.shape[0], dtype=bool)
    if _backend == "numba":
        return _halfspace_member_nb(normals, offsets, Z, float(tol))
    return _halfspace_member_np(normals, offsets, Z, float(tol))


def clip_polygon(poly, normals, offsets, tol):
    """Sutherland-Hodgman clip of a convex polygon by halfplanes ``n @ x >= b``."""
    poly = np.ascontiguousarray(poly, dtype=float).reshape(-1, 2)
    normals = np.ascontiguousarray(normals, dtype=float).reshape(-1, 2)
    offsets = np.ascontiguousarray(offsets, dtype=float)
    if _backend == "numba":
        return _clip_nb(poly, normals, offsets, float(tol))
    return _clip_np(poly, normals, offsets, float(tol))


def warmup():
    """Compile every numba kernel once (no-op on the numpy backend)."""
    pts = np.array([[0.0, 0.0], [1.0, 0.5], [0.2, 1.0]])
    sweep_min_2d(pts, np.ones(3), pts, np.array([[0.0, TWO_PI]]), 1e-9, 1e-10)
    sp = np.sort(pts, axis=0).T.copy()
    grid_min(sp, np.tile(np.arange(1.0, 4.0), (2, 1)), pts, 1e-9)
    halfspace_member(np.eye(2), np.zeros(2), pts, 1e-9)
    clip_polygon(np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]), np.eye(2), np.full(2, 0.5), 1e-9)
