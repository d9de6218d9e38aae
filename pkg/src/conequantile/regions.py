"""Set-valued lower C-quantiles as elements of the lattice of C-stable closed convex sets.

A :class:`CRegion` is the whole space, the empty set, a finite intersection of
halfspaces (``hrep``) or ``cl co(G + K)`` for a finite point set ``G`` and a
cone ``K`` (``genrep``).

Quantile regions are built as ``hrep`` over the direction set of the
underlying :class:`~conequantile.conecdf.ConeCdf`. With a grid of directions
the result is an outer approximation of the true region, so exact point
membership goes through :func:`member`, which tests ``F_C(z) >= p``. With the
critical direction set of a planar sample the ``hrep`` is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog
from scipy.special import ndtri

from . import kernels
from .config import GEOM_TOL, PROB_TOL, prob_geq
from .cones import ConvexCone, Halfspace, _dedupe_rows, _unit_rows
from .distributions import EmpiricalSample
from .errors import UnsupportedDimensionError


@dataclass(frozen=True, eq=False)
class CRegion:
    variant: str
    cone: ConvexCone
    normals: np.ndarray = None
    offsets: np.ndarray = None
    generators: np.ndarray = None
    level: float = None

    @classmethod
    def whole(cls, cone, level=None):
        return cls("whole", cone, level=level)

    @classmethod
    def empty(cls, cone, level=None):
        return cls("empty", cone, level=level)

    @classmethod
    def from_halfspaces(cls, cone, normals, offsets, level=None):
        """Normalise: rows with offset ``-inf`` are dropped, any ``+inf`` gives the empty set."""
        normals = np.asarray(normals, dtype=float).reshape(-1, cone.dim)
        offsets = np.asarray(offsets, dtype=float).ravel()
        if np.any(offsets == math.inf):
            return cls.empty(cone, level)
        keep = offsets > -math.inf
        if not np.any(keep):
            return cls.whole(cone, level)
        return cls("hrep", cone, normals=normals[keep], offsets=offsets[keep], level=level)

    @classmethod
    def from_generators(cls, cone, G, level=None):
        G = np.asarray(G, dtype=float).reshape(-1, cone.dim)
        if len(G) == 0:
            return cls.empty(cone, level)
        return cls("genrep", cone, generators=G, level=level)

    @property
    def dim(self):
        return self.cone.dim

    @property
    def halfspaces(self):
        if self.variant == "whole":
            return []
        if self.variant == "empty":
            return [Halfspace(np.zeros(self.dim), math.inf)]
        if self.variant == "genrep":
            N, b = generator_hrep(self.generators, self.cone)
            return [Halfspace(n, float(o)) for n, o in zip(N, b)]
        return [Halfspace(n, float(o)) for n, o in zip(self.normals, self.offsets)]

    def contains_many(self, Z):
        Z = np.atleast_2d(np.asarray(Z, dtype=float))
        if self.variant == "whole":
            return np.ones(len(Z), dtype=bool)
        if self.variant == "empty":
            return np.zeros(len(Z), dtype=bool)
        if self.variant == "hrep":
            return kernels.halfspace_member(self.normals, self.offsets, Z, self.cone.tol)
        if self.dim <= 2:
            N, b = generator_hrep(self.generators, self.cone)
            return kernels.halfspace_member(N, b, Z, self.cone.tol)
        return np.array([_lp_member(self.generators, self.cone, z) for z in Z], dtype=bool)

    def contains(self, z):
        return bool(self.contains_many(z)[0])

    def to_hrep(self):
        if self.variant != "genrep":
            return self
        N, b = generator_hrep(self.generators, self.cone)
        return CRegion.from_halfspaces(self.cone, N, b, self.level)


# ---------------------------------------------------------------------------
# generator form -> halfspace form
# ---------------------------------------------------------------------------

def _candidate_normals(G, cone):
    d = cone.dim
    if d == 1:
        return np.array([[1.0], [-1.0]])
    edges = [(G[:, None, :] - G[None, :, :]).reshape(-1, d), cone.generators]
    E = np.vstack(edges)
    E = E[np.linalg.norm(E, axis=1) > cone.tol]
    parts = [cone.dual_generators, np.eye(d), -np.eye(d)]
    if len(E):
        E = _unit_rows(E, cone.tol)
        parts += [E, -E]
        if d == 2:
            P = np.column_stack([-E[:, 1], E[:, 0]])
            parts += [P, -P]
        elif d == 3:
            X = np.cross(E[:, None, :], E[None, :, :]).reshape(-1, 3)
            X = X[np.linalg.norm(X, axis=1) > cone.tol]
            if len(X):
                X = _unit_rows(X, cone.tol)
                parts += [X, -X]
    W = _dedupe_rows(np.vstack(parts))
    return W


def generator_hrep(G, cone):
    """Halfspaces ``w @ z >= min_g w @ g`` over candidate normals ``w`` in ``cone+``.

    Exact for ``d <= 2``: every edge of ``co(G) + cone`` is parallel to a
    difference of generators or to a cone generator, so its normal is among
    the candidates. In ``d = 3`` it is an outer approximation.
    """
    G = np.asarray(G, dtype=float).reshape(-1, cone.dim)
    W = _candidate_normals(G, cone)
    W = W[cone.dual_contains_many(W)]
    return W, (G @ W.T).min(axis=0)


def _lp_member(G, cone, z):
    """Feasibility of ``z = G.T @ lam + C.T @ mu`` with ``lam`` in the simplex and ``mu >= 0``."""
    k, r = len(G), len(cone.generators)
    A_eq = np.vstack([np.hstack([G.T, cone.generators.T]), np.concatenate([np.ones(k), np.zeros(r)])[None, :]])
    b_eq = np.concatenate([np.asarray(z, dtype=float), [1.0]])
    res = linprog(np.zeros(k + r), A_eq=A_eq, b_eq=b_eq, bounds=[(0, None)] * (k + r), method="highs")
    return res.status == 0


# ---------------------------------------------------------------------------
# quantile function
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class QuantileFn:
    """``p -> Q_C(p) = {z : F_C(z) >= p}`` for a :class:`ConeCdf`."""

    conecdf: object

    @property
    def cone(self):
        return self.conecdf.cone

    def thresholds(self, p, W=None):
        """Lower ``p``-quantile of ``w @ X`` for each direction row of ``W``."""
        c = self.conecdf
        Wd = c.dirs.dirs if W is None else np.atleast_2d(W)
        if p <= 0.0:
            return np.full(len(Wd), -math.inf)
        if p > 1.0:
            return np.full(len(Wd), math.inf)
        if isinstance(c.model, EmpiricalSample):
            sp, cum = c.sorted_for(W)
            ok = prob_geq(c.model.prob(cum), p)
            idx = np.argmax(ok, axis=1)
            out = sp[np.arange(len(Wd)), idx]
            out[~ok.any(axis=1)] = math.inf
            return out
        loc, sd, atom = c._gauss_dirs(Wd)
        q = math.inf if p >= 1.0 else float(ndtri(p))
        return np.where(atom, loc, loc + sd * q)

    def strict_thresholds(self, p, W=None):
        """``sup{r : P(w @ X < r) < p}`` per direction, from strict cdf values."""
        c = self.conecdf
        Wd = c.dirs.dirs if W is None else np.atleast_2d(W)
        if not isinstance(c.model, EmpiricalSample):
            return np.array([c.model.strict_sup_level(w, min(max(p, 0.0), 1.0)) if p <= 1.0 else math.inf for w in Wd])
        if p <= 0.0:
            return np.full(len(Wd), -math.inf)
        sp, cum = c.sorted_for(W)
        out = np.full(len(Wd), -math.inf)
        for j in range(len(Wd)):
            first = np.searchsorted(sp[j], sp[j], side="left")
            strict = np.where(first > 0, cum[j, np.maximum(first - 1, 0)], 0.0)
            ok = c.model.prob(strict) < p - PROB_TOL
            if np.any(ok):
                out[j] = sp[j][ok].max()
        if p > 1.0 + PROB_TOL:
            # strict cdf never reaches p: the set {r : P(w@X < r) < p} is all of R
            out[:] = math.inf
        return out

    def w_quantile_halfspace(self, w, p):
        u = self.conecdf._unit(w)
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"probability level must lie in [0, 1], got {p}")
        return Halfspace(u, float(self.thresholds(p, u[None, :])[0]))

    def lower_quantile(self, p):
        if p <= 0.0:
            return CRegion.whole(self.cone, level=p)
        W = self.conecdf.dirs.dirs
        return CRegion.from_halfspaces(self.cone, W, self.thresholds(p), level=p)

    def dual_quantile(self, p):
        if p <= 0.0:
            return CRegion.whole(self.cone, level=p)
        W = self.conecdf.dirs.dirs
        return CRegion.from_halfspaces(self.cone, W, self.strict_thresholds(p), level=p)

    def member_many(self, p, Z):
        Z = np.atleast_2d(np.asarray(Z, dtype=float))
        if p <= 0.0:
            return np.ones(len(Z), dtype=bool)
        vals, _ = self.conecdf.lower_cdf_many(Z)
        return prob_geq(vals, p)

    def member(self, p, z):
        return bool(self.member_many(p, z)[0])


def w_quantile_halfspace(q, w, p):
    return q.w_quantile_halfspace(w, p)


def lower_quantile(q, p):
    return q.lower_quantile(p)


def dual_quantile(q, p):
    return q.dual_quantile(p)


def member(q, p, z):
    return q.member(p, z)


def region_member(r, z):
    return r.contains(z)


# ---------------------------------------------------------------------------
# planar geometry
# ---------------------------------------------------------------------------

def vertices_2d(r, bbox):
    """Polygon ``r ∩ bbox`` (counterclockwise) for ``bbox = (xmin, ymin, xmax, ymax)``."""
    if r.dim != 2:
        raise UnsupportedDimensionError("vertices_2d needs a planar region")
    x0, y0, x1, y1 = map(float, bbox)
    box = np.array([[x0, y0], [x1, y0], [x1, y1], [x0, y1]])
    if r.variant == "whole":
        return box
    if r.variant == "empty":
        return np.zeros((0, 2))
    h = r.to_hrep()
    if h.variant != "hrep":
        return vertices_2d(h, bbox)
    poly = kernels.clip_polygon(box, h.normals, h.offsets, r.cone.tol)
    return _clean_polygon(poly, r.cone.tol)


def _clean_polygon(poly, tol):
    if len(poly) == 0:
        return poly
    keep = [0]
    for i in range(1, len(poly)):
        if np.max(np.abs(poly[i] - poly[keep[-1]])) > tol:
            keep.append(i)
    if len(keep) > 1 and np.max(np.abs(poly[keep[-1]] - poly[keep[0]])) <= tol:
        keep.pop()
    return poly[keep]


def region_to_generators(r, bbox):
    """Generator set ``G`` with ``cl co(G + C) = r`` for a planar C-stable region.

    ``G`` is the vertex list of ``r ∩ bbox``; exact whenever ``bbox`` contains
    every vertex of ``r`` and the recession cone of ``r`` is ``C``.
    """
    if r.variant == "whole":
        raise ValueError("the whole space has no finite generator set")
    if r.dim == 1:
        h = r.to_hrep()
        if h.variant == "empty":
            return np.zeros((0, 1))
        lo = max(float(o / n[0]) for n, o in zip(h.normals, h.offsets) if n[0] > 0)
        return np.array([[lo]])
    return vertices_2d(r, bbox)
