"""Polyhedral cones, dual cones, halfspaces and direction bases."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .config import ANGLE_TOL, GEOM_TOL
from .errors import DegenerateConeError, InvalidDirectionError, UnsupportedDimensionError

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Halfspace:
    """The set ``{z : normal @ z >= offset}``.

    ``offset = -inf`` is the whole space and ``offset = +inf`` the empty set.
    """

    normal: np.ndarray
    offset: float

    @property
    def is_whole(self):
        return self.offset == -math.inf

    @property
    def is_empty(self):
        return self.offset == math.inf

    def contains(self, z, tol=GEOM_TOL):
        if self.is_whole:
            return True
        if self.is_empty:
            return False
        return float(self.normal @ np.asarray(z, dtype=float)) >= self.offset - tol


def _unit_rows(V, tol):
    V = np.asarray(V, dtype=float).reshape(len(V), -1)
    norms = np.linalg.norm(V, axis=1)
    keep = norms > tol
    return V[keep] / norms[keep, None]


def _dedupe_rows(V, decimals=10):
    if len(V) == 0:
        return V
    _, idx = np.unique(np.round(V, decimals) + 0.0, axis=0, return_index=True)
    return V[np.sort(idx)]


def _null_space(A, tol):
    d = A.shape[1]
    if A.shape[0] == 0:
        return np.eye(d)
    _, s, vt = np.linalg.svd(A)
    rank = int(np.sum(s > tol * max(1.0, s[0])))
    return vt[rank:].T


def _polyhedral_generators(A, tol):
    """Generators of ``{w : A @ w >= 0}`` for small ``d``.

    Lineality basis (both signs) plus the extreme rays of the pointed part,
    each found as a one-dimensional solution set of an active row subset.
    """
    d = A.shape[1]
    L = _null_space(A, tol)
    gens = [L.T, -L.T] if L.shape[1] else []
    rows = list(range(A.shape[0]))
    for size in range(0, d):
        for S in itertools.combinations(rows, size):
            M = A[list(S)] if S else np.zeros((0, d))
            if L.shape[1]:
                M = np.vstack([M, L.T])
            N = _null_space(M, tol)
            if N.shape[1] != 1:
                continue
            r = N[:, 0]
            for cand in (r, -r):
                if A.shape[0] == 0 or np.all(A @ cand >= -tol):
                    gens.append(cand[None, :])
    if not gens:
        return np.zeros((0, d))
    return _dedupe_rows(_unit_rows(np.vstack(gens), tol))


@dataclass(frozen=True, eq=False)
class ConvexCone:
    """Closed polyhedral cone ``C = cone(generators)`` in ``R^dim``.

    ``dual_generators`` span ``C+ = {w : w @ v >= 0 for all v in C}``; they are
    computed on construction for ``dim <= 3`` and must be supplied otherwise.
    """

    dim: int
    generators: np.ndarray
    dual_generators: np.ndarray = None
    tol: float = GEOM_TOL
    name: str = field(default="custom", compare=False)

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("cone dimension must be >= 1")
        G = np.asarray(self.generators, dtype=float).reshape(-1, self.dim)
        if not np.all(np.isfinite(G)):
            raise ValueError("cone generators must be finite")
        G = _dedupe_rows(_unit_rows(G, self.tol)) if len(G) else G
        object.__setattr__(self, "generators", G)
        if self.dual_generators is None:
            if self.dim > 3:
                raise UnsupportedDimensionError(
                    f"automatic dual cone needs dim <= 3 (got {self.dim}); supply dual_generators"
                )
            D = _polyhedral_generators(G, self.tol)
        else:
            D = np.asarray(self.dual_generators, dtype=float).reshape(-1, self.dim)
            D = _dedupe_rows(_unit_rows(D, self.tol)) if len(D) else D
            if len(D) and len(G) and np.any(D @ G.T < -self.tol):
                raise ValueError("supplied dual_generators are not in the dual cone")
        object.__setattr__(self, "dual_generators", D)

    # -- presets ---------------------------------------------------------
    @classmethod
    def orthant(cls, dim, tol=GEOM_TOL):
        return cls(dim, np.eye(dim), tol=tol, name="orthant")

    @classmethod
    def zero(cls, dim, tol=GEOM_TOL):
        return cls(dim, np.zeros((0, dim)), tol=tol, name="zero")

    @classmethod
    def halfspace(cls, w, tol=GEOM_TOL):
        """``H+(w) = {z : w @ z >= 0}``; its dual is the ray spanned by ``w``."""
        w = np.asarray(w, dtype=float).ravel()
        if np.linalg.norm(w) <= tol:
            raise InvalidDirectionError("halfspace normal must be nonzero")
        B = _null_space(w[None, :], tol).T
        gens = np.vstack([w[None, :], B, -B]) if len(B) else w[None, :]
        dual = w[None, :] if len(w) > 3 else None
        return cls(len(w), gens, dual_generators=dual, tol=tol, name="halfspace:" + ",".join(repr(float(x)) for x in w))

    # -- queries ---------------------------------------------------------
    @property
    def is_whole_space(self):
        return len(self.dual_generators) == 0

    def contains(self, z):
        z = np.asarray(z, dtype=float)
        if len(self.dual_generators) == 0:
            return True
        return bool(np.all(self.dual_generators @ z >= -self.tol))

    def leq(self, y, z):
        """``y <=_C z``, i.e. ``z - y`` in the cone."""
        return self.contains(np.asarray(z, dtype=float) - np.asarray(y, dtype=float))

    def dual_contains(self, w):
        """``w`` in ``C+``, tested against the generators of ``C``."""
        w = np.asarray(w, dtype=float)
        if len(self.generators) == 0:
            return True
        return bool(np.all(self.generators @ w >= -self.tol))

    def dual_contains_many(self, W):
        W = np.atleast_2d(np.asarray(W, dtype=float))
        if len(self.generators) == 0:
            return np.ones(len(W), dtype=bool)
        return np.all(W @ self.generators.T >= -self.tol, axis=1)

    def subset_of(self, other):
        """Every generator of ``self`` lies in ``other``."""
        return all(other.contains(g) for g in self.generators)

    def equivalent(self, other):
        return self.subset_of(other) and other.subset_of(self)

    def to_spec(self):
        out = {"dim": self.dim, "generators": self.generators.tolist()}
        if self.dim > 3:
            out["dual_generators"] = self.dual_generators.tolist()
        return out

    def __repr__(self):
        return f"ConvexCone(dim={self.dim}, name={self.name!r}, n_gen={len(self.generators)}, n_dual={len(self.dual_generators)})"


def dual_cone(cone):
    """``C+`` as a generator cone. The dual of ``{0}`` is the whole space."""
    dual_of_dual = cone.generators if cone.dim > 3 else None
    if cone.dim > 3 and len(cone.dual_generators) == 0:
        raise UnsupportedDimensionError("dual of a dim > 3 cone needs its dual generators")
    return ConvexCone(cone.dim, cone.dual_generators, dual_generators=dual_of_dual, tol=cone.tol, name=f"dual({cone.name})")


def cone_contains(cone, z):
    return cone.contains(z)


def leq_C(cone, y, z):
    return cone.leq(y, z)


# ---------------------------------------------------------------------------
# direction bases
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class DirectionSet:
    """Finite set of unit directions in ``C+`` (rows of ``dirs``)."""

    dirs: np.ndarray
    resolution: int
    kind: str  # "exact-2d-critical", "grid" or "dual-generators"

    def __len__(self):
        return len(self.dirs)

    def union(self, extra, cone=None):
        extra = np.atleast_2d(np.asarray(extra, dtype=float))
        if extra.size == 0:
            return self
        extra = _unit_rows(extra, GEOM_TOL)
        if cone is not None:
            extra = extra[cone.dual_contains_many(extra)]
        return DirectionSet(_dedupe_rows(np.vstack([self.dirs, extra])), self.resolution, self.kind)


def dual_arcs_2d(cone):
    """Angular structure of ``C+`` in the plane.

    Returns ``(arcs, isolated)``: ``arcs`` is a list of ``(start, width)`` with
    ``0 < width <= 2*pi`` and ``isolated`` a list of angles of rays not covered
    by any arc (a ray or a line).
    """
    if cone.dim != 2:
        raise UnsupportedDimensionError("angular arcs are defined only in the plane")
    D = cone.dual_generators
    if len(D) == 0:
        raise DegenerateConeError("C is the whole plane, so C+ = {0}")
    th = np.sort(np.mod(np.arctan2(D[:, 1], D[:, 0]), TWO_PI))
    if len(th) == 1:
        return [], [float(th[0])]
    gaps = np.diff(np.concatenate([th, [th[0] + TWO_PI]]))
    if len(th) == 2 and abs(gaps[0] - math.pi) <= 1e-9:
        return [], [float(th[0]), float(th[1])]
    k = int(np.argmax(gaps))
    g = gaps[k]
    if g < math.pi - 1e-9:
        return [(0.0, TWO_PI)], []
    start = th[(k + 1) % len(th)]
    return [(float(start), float(TWO_PI - g))], []


def _angle_dirs(angles):
    a = np.asarray(angles, dtype=float)
    return np.column_stack([np.cos(a), np.sin(a)])


def _fibonacci_sphere(n):
    i = np.arange(n) + 0.5
    polar = np.arccos(1.0 - 2.0 * i / n)
    azim = math.pi * (1.0 + 5.0 ** 0.5) * i
    return np.column_stack([np.cos(azim) * np.sin(polar), np.sin(azim) * np.sin(polar), np.cos(polar)])


def direction_base(cone, resolution):
    """Deterministic grid over ``C+ ∩ S^{d-1}`` including the dual generators."""
    if resolution < 1:
        raise ValueError("resolution must be >= 1")
    if cone.is_whole_space:
        raise DegenerateConeError("C = R^d has C+ = {0}; the lower C-distribution function is undefined")
    D = cone.dual_generators
    if cone.dim == 1:
        dirs = D.copy()
    elif cone.dim == 2:
        arcs, isolated = dual_arcs_2d(cone)
        parts = [D, _angle_dirs(isolated)] if isolated else [D]
        for start, width in arcs:
            if width >= TWO_PI - ANGLE_TOL:
                parts.append(_angle_dirs(start + TWO_PI * np.arange(resolution) / resolution))
            else:
                parts.append(_angle_dirs(np.linspace(start, start + width, max(resolution, 2))))
        dirs = _dedupe_rows(np.vstack(parts))
    elif cone.dim == 3:
        S = _fibonacci_sphere(resolution)
        dirs = _dedupe_rows(np.vstack([D, S[cone.dual_contains_many(S)]]))
    else:
        dirs = D.copy()
        return DirectionSet(dirs, resolution, "dual-generators")
    return DirectionSet(dirs, resolution, "grid")


def critical_directions(cone, points, extra_points=None):
    """Directions of ``C+`` at which order statistics of projections can change.

    In the plane these are the normals of lines through pairs of ``points``
    (both orientations) plus the dual generators. Intersecting quantile
    halfspaces over this set gives the exact region for an empirical sample.
    ``extra_points`` adds normals of lines joining them to each other and to
    ``points``.
    """
    if cone.dim != 2:
        raise UnsupportedDimensionError("critical direction sets are built only in the plane")
    if cone.is_whole_space:
        raise DegenerateConeError("C = R^2 has C+ = {0}")
    P = np.asarray(points, dtype=float).reshape(-1, 2)
    if extra_points is not None:
        E = np.asarray(extra_points, dtype=float).reshape(-1, 2)
        diffs = [P[:, None, :] - E[None, :, :], E[:, None, :] - E[None, :, :]]
    else:
        diffs = []
    diffs.append(P[:, None, :] - P[None, :, :])
    V = np.vstack([d.reshape(-1, 2) for d in diffs])
    V = V[np.linalg.norm(V, axis=1) > cone.tol]
    perp = np.column_stack([-V[:, 1], V[:, 0]])
    W = np.vstack([perp, -perp]) if len(perp) else np.zeros((0, 2))
    W = _unit_rows(W, cone.tol) if len(W) else W
    W = W[cone.dual_contains_many(W)] if len(W) else W
    arcs, isolated = dual_arcs_2d(cone)
    ends = [s for s, _ in arcs] + [s + w for s, w in arcs if w < TWO_PI - ANGLE_TOL]
    parts = [cone.dual_generators, _angle_dirs(ends + isolated)]
    if len(W):
        parts.append(W)
    return DirectionSet(_dedupe_rows(np.vstack(parts)), 0, "exact-2d-critical")
