"""Inf-extension, the Galois connection between ``[0, 1]`` and C-stable sets, and its closures.

Sets are given in generator form :class:`GenSet` ``D = cl co(G + K)``. Because
``F_C`` is quasiconcave and C-increasing, ``inf_D F_C`` is attained on ``G``
when ``K ⊆ C``; otherwise some ``w`` in ``C+`` is unbounded below on ``D`` and
the infimum is 0.

Set equality and containment are decided on a :class:`ProbeGrid`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import PROB_TOL, prob_geq
from .conecdf import Comparison, compare_families
from .cones import ConvexCone, critical_directions, _dedupe_rows
from .distributions import EmpiricalSample
from .probes import ProbeGrid
from .regions import CRegion, QuantileFn, _candidate_normals, region_to_generators

# F△(∅) = +∞; kept as a sentinel and never used in arithmetic
EMPTY_INF = math.inf
BOUNDARY_TOL = 1e-7


@dataclass(frozen=True, eq=False)
class GenSet:
    G: np.ndarray
    cone: ConvexCone

    def __post_init__(self):
        G = np.asarray(self.G, dtype=float)
        if G.size == 0:
            G = np.zeros((0, self.cone.dim))
        G = G.reshape(-1, self.cone.dim) if G.ndim < 2 else G
        if G.shape[1] != self.cone.dim:
            raise ValueError(f"generator points must have {self.cone.dim} coordinates")
        if not np.all(np.isfinite(G)):
            raise ValueError("generator points must be finite")
        object.__setattr__(self, "G", G)

    @property
    def dim(self):
        return self.cone.dim

    @property
    def is_empty(self):
        return len(self.G) == 0

    def region(self):
        return CRegion.from_generators(self.cone, self.G)

    def contains_many(self, Z):
        return self.region().contains_many(Z)

    def depth_outside(self, Z):
        """``max_w (min_g w@g - w@z)`` over the facet normals; positive outside the set."""
        Z = np.atleast_2d(np.asarray(Z, dtype=float))
        if self.is_empty:
            return np.full(len(Z), math.inf)
        W = _candidate_normals(self.G, self.cone)
        W = W[self.cone.dual_contains_many(W)]
        b = (self.G @ W.T).min(axis=0)
        return (b[None, :] - Z @ W.T).max(axis=1)

    def merged(self, *others):
        """Lattice infimum (w.r.t. ⊇): ``cl co`` of the union."""
        for o in others:
            if not o.cone.equivalent(self.cone):
                raise ValueError("can only merge generator sets over the same cone")
        return GenSet(np.vstack([self.G] + [o.G for o in others]), self.cone)


def _as_genset(D, bbox=None):
    if isinstance(D, GenSet):
        return D
    if isinstance(D, CRegion):
        if D.variant == "genrep":
            return GenSet(D.generators, D.cone)
        if D.variant == "empty":
            return GenSet(np.zeros((0, D.dim)), D.cone)
        return GenSet(region_to_generators(D, bbox), D.cone)
    raise TypeError(f"expected GenSet or CRegion, got {type(D).__name__}")


# ---------------------------------------------------------------------------
# inf-extension
# ---------------------------------------------------------------------------

def inf_extension(c, D):
    """``F△(D) = inf_{z in D} F_C(z)``; :data:`EMPTY_INF` for the empty set."""
    if isinstance(D, CRegion) and D.variant == "whole":
        return 0.0
    D = _as_genset(D)
    if D.is_empty:
        return EMPTY_INF
    if not D.cone.subset_of(c.cone):
        return 0.0
    vals, _ = c.lower_cdf_many(D.G)
    return float(vals.min())


def _min_proj(D, u):
    if not D.cone.dual_contains(u):
        return -math.inf
    return float((D.G @ u).min())


def inf_extension_w(c, w, D):
    """``F_{w@X}(inf_{y in D} w@y)`` with ``F(-inf) = 0``."""
    u = c._unit(w)
    D = _as_genset(D)
    if D.is_empty:
        return EMPTY_INF
    m = _min_proj(D, u)
    val = c.model.project_cdf(u, m, slack=c.tol)
    if m > -math.inf:
        check = min(c.model.project_cdf(u, float(u @ g), slack=c.tol) for g in D.G)
        if abs(check - val) > PROB_TOL:
            raise ArithmeticError(f"inf-extension along {u.tolist()}: {val} != {check}")
    return float(val)


def adjunction_check(q, p, D):
    """``(Q(p) ⊇ D, p <= F△(D))``; the two must agree."""
    D = _as_genset(D)
    if p <= 0.0:
        lhs = True
    else:
        lhs = bool(np.all(q.member_many(p, D.G))) if not D.is_empty else True
        lhs = lhs and (D.is_empty or D.cone.subset_of(q.cone))
    F = inf_extension(q.conecdf, D)
    rhs = True if F == EMPTY_INF else bool(prob_geq(F, p))
    return lhs, rhs


# ---------------------------------------------------------------------------
# closures
# ---------------------------------------------------------------------------

def cl_psi(q, D):
    """``Q(F△(D))``; the returned region carries the level in ``.level``."""
    F = inf_extension(q.conecdf, D)
    if F == EMPTY_INF:
        return CRegion.empty(q.cone, level=EMPTY_INF)
    return q.lower_quantile(F)


def psi_member_many(q, D, Z):
    """Exact membership in ``cl_psi(D)`` through ``F_C``."""
    F = inf_extension(q.conecdf, D)
    if F == EMPTY_INF:
        return np.zeros(len(np.atleast_2d(Z)), dtype=bool)
    return q.member_many(F, Z)


def _phi_directions(c, D):
    parts = [c.dirs.dirs]
    if len(D.G):
        W = _candidate_normals(D.G, c.cone)
        parts.append(W[c.cone.dual_contains_many(W)])
    if c.dim == 2 and isinstance(c.model, EmpiricalSample):
        parts.append(critical_directions(c.cone, c.model.points, extra_points=D.G).dirs)
    return _dedupe_rows(np.vstack(parts))


def cl_phi(c, D):
    """``∩_w {z : F_w(z) >= F_w(inf_D w@y)}`` as halfspaces ``w@z >= s_w``.

    ``s_w`` is the smallest ``s`` with ``F_w(s) >= F_w(inf_D w@y)``. For a
    planar sample the direction set includes every angle at which the order
    of projections of sample and generator points changes, which makes the
    result exact.
    """
    if isinstance(D, CRegion) and D.variant == "whole":
        return CRegion.whole(c.cone)
    D = _as_genset(D)
    if D.is_empty:
        return CRegion.empty(c.cone)
    W = _phi_directions(c, D)
    thr = np.array([c.model.closure_threshold(u, _min_proj(D, u), slack=c.tol) for u in W])
    return CRegion.from_halfspaces(c.cone, W, thr)


# ---------------------------------------------------------------------------
# rankings and fixed points
# ---------------------------------------------------------------------------

def set_rank(c, D1, D2, family="psi"):
    """Compare ``D1`` and ``D2`` by ``F△`` (``psi``, total) or by ``F△_w`` per direction (``phi``)."""
    if family == "psi":
        a, b = inf_extension(c, D1), inf_extension(c, D2)
        if a == b or (a != EMPTY_INF and b != EMPTY_INF and abs(a - b) <= PROB_TOL):
            return Comparison.EQUAL
        return Comparison.LESS_EQUAL if a < b else Comparison.GREATER_EQUAL
    if family == "phi":
        W = c.dirs.dirs
        a = np.array([inf_extension_w(c, u, D1) for u in W])
        b = np.array([inf_extension_w(c, u, D2) for u in W])
        return compare_families(a, b)
    raise ValueError(f"family must be 'psi' or 'phi', got {family!r}")


def _agree(inside_a, inside_b, depth, tol):
    """Disagreements on probes farther than ``tol`` from the boundary of the reference set."""
    return int(np.sum((inside_a != inside_b) & (np.abs(depth) > tol)))


def fixed_point_check(q, D, probe=None, tol=BOUNDARY_TOL):
    """Whether ``D`` and ``cl_psi(D)`` agree on the probe grid (up to ``tol`` near the boundary of ``D``)."""
    if isinstance(D, CRegion) and D.variant == "whole":
        return True
    probe = probe or ProbeGrid.for_model(q.conecdf.model)
    D = _as_genset(D, probe.bbox if probe.dim == 2 else None)
    Z = probe.points()
    if D.is_empty:
        return True
    return _agree(D.contains_many(Z), psi_member_many(q, D, Z), D.depth_outside(Z), tol) == 0


@dataclass(frozen=True, eq=False)
class ClosureReport:
    input: GenSet
    value: float
    psi_closure: CRegion
    phi_closure: CRegion
    is_psi_fixed: bool
    is_phi_fixed: bool


def closure_report(q, D, probe=None, tol=BOUNDARY_TOL):
    c = q.conecdf
    probe = probe or ProbeGrid.for_model(c.model)
    D = _as_genset(D)
    Z = probe.points()
    phi = cl_phi(c, D)
    inside = D.contains_many(Z)
    depth = D.depth_outside(Z)
    return ClosureReport(
        input=D,
        value=inf_extension(c, D),
        psi_closure=cl_psi(q, D),
        phi_closure=phi,
        is_psi_fixed=D.is_empty or _agree(inside, psi_member_many(q, D, Z), depth, tol) == 0,
        is_phi_fixed=D.is_empty or _agree(inside, phi.contains_many(Z), depth, tol) == 0,
    )


# ---------------------------------------------------------------------------
# Φ-identity
# ---------------------------------------------------------------------------

@dataclass
class PhiIdentityReport:
    trials: int
    probes_per_trial: int
    violations: int = 0
    max_violation: float = 0.0
    violating_trials: int = 0
    counterexample: dict = field(default=None)

    @property
    def identity_holds(self):
        return self.violations == 0


def phi_violations(c, D, Z, tol=BOUNDARY_TOL):
    """Probes in ``cl_phi(D)`` lying farther than ``tol`` outside ``D`` and their distances."""
    D = _as_genset(D)
    depth = D.depth_outside(Z)
    in_phi = cl_phi(c, D).contains_many(Z)
    bad = in_phi & (depth > tol)
    return bad, depth


def phi_identity_check(c, trials, probe=None, rng=None, max_points=4, tol=BOUNDARY_TOL):
    """Compare ``D`` with ``cl_phi(D)`` on probes for ``trials`` random generator sets.

    With strictly increasing projection cdfs (e.g. a full-rank Gaussian) no
    violation is expected; flat stretches of an empirical cdf produce them.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    from .randomset import SeededRng

    rng = rng if rng is not None else SeededRng(0)
    probe = probe or ProbeGrid.for_model(c.model)
    Z = probe.points()
    lo, hi = np.asarray(probe.lo), np.asarray(probe.hi)
    # draw generators from the inner half of the probe box so closures stay visible
    mid, half = 0.5 * (lo + hi), 0.25 * (hi - lo)
    report = PhiIdentityReport(trials=trials, probes_per_trial=len(Z))
    for _ in range(trials):
        k = int(rng.integers(1, max_points + 1))
        G = mid + half * (2.0 * rng.uniform((k, c.dim)) - 1.0)
        D = GenSet(G, c.cone)
        bad, depth = phi_violations(c, D, Z, tol)
        nbad = int(bad.sum())
        if nbad:
            report.violations += nbad
            report.violating_trials += 1
            j = int(np.argmax(np.where(bad, depth, -np.inf)))
            report.max_violation = max(report.max_violation, float(depth[j]))
            if report.counterexample is None:
                report.counterexample = {"G": G.tolist(), "z": Z[j].tolist(), "distance": float(depth[j])}
    return report


def make_quantile_fn(c):
    return QuantileFn(c)
