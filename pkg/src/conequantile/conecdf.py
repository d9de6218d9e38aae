"""w-distribution functions, the lower C-distribution function and point rankings.

``F_w(z) = P(w @ X <= w @ z)`` and ``F_C(z) = inf over w in C+ \\ {0} of F_w(z)``.
With ``C = {0}`` the lower C-distribution function is Tukey's halfspace depth.

Evaluation paths for ``F_C``:

* empirical sample in the plane: exact rotating sweep over the arcs of ``C+``
  (see :func:`conequantile.kernels.sweep_min_2d`);
* empirical sample in dimension 1: exact, ``C+`` is one or two rays;
* Gaussian: minimum over the direction grid plus the stationary direction
  ``-pinv(sigma) @ (z - mu)`` when it lies in ``C+``, refined in the plane by
  golden-section search on the arc around the grid minimiser;
* anything else: minimum over the direction grid, an upper bound on ``F_C``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.special import ndtr

from . import kernels
from .config import ANGLE_TOL, PROB_TOL
from .cones import DirectionSet, critical_directions, direction_base, dual_arcs_2d
from .distributions import EmpiricalSample, GaussianModel
from .errors import InvalidDirectionError

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
CRITICAL_MAX_N = 200


class Comparison(str, enum.Enum):
    LESS_EQUAL = "less-or-equal"
    GREATER_EQUAL = "greater-or-equal"
    EQUAL = "equal"
    INCOMPARABLE = "incomparable"


def compare_families(a, b):
    """Componentwise comparison of two value vectors up to ``PROB_TOL``."""
    le = bool(np.all(np.asarray(a) <= np.asarray(b) + PROB_TOL))
    ge = bool(np.all(np.asarray(a) >= np.asarray(b) - PROB_TOL))
    if le and ge:
        return Comparison.EQUAL
    if le:
        return Comparison.LESS_EQUAL
    if ge:
        return Comparison.GREATER_EQUAL
    return Comparison.INCOMPARABLE


def compare_scalar(a, b):
    """-1, 0 or 1 as ``a`` is below, equal to or above ``b`` (up to ``PROB_TOL``)."""
    if abs(a - b) <= PROB_TOL:
        return 0
    return -1 if a < b else 1


@dataclass(frozen=True, eq=False)
class ConeCdf:
    """A model, an ordering cone and the direction set used for discretisation."""

    model: EmpiricalSample | GaussianModel
    cone: object
    dirs: DirectionSet
    exact2d: bool = False

    def __post_init__(self):
        if self.model.dim != self.cone.dim:
            raise ValueError(f"model dimension {self.model.dim} != cone dimension {self.cone.dim}")
        if self.exact2d and not (isinstance(self.model, EmpiricalSample) and self.model.dim == 2):
            raise ValueError("exact2d requires an empirical sample in the plane")
        if len(self.dirs.dirs) == 0:
            raise ValueError("direction set is empty")

    @classmethod
    def build(cls, model, cone, resolution=64, directions="auto", exact=None):
        """Pick the direction set and evaluation path for ``model`` and ``cone``.

        ``directions`` is ``"auto"``, ``"critical"`` or ``"grid"``. Critical
        directions (exact regions) are the default for planar samples with at
        most ``CRITICAL_MAX_N`` points.
        """
        if model.dim != cone.dim:
            raise ValueError(f"model dimension {model.dim} != cone dimension {cone.dim}")
        empirical_2d = isinstance(model, EmpiricalSample) and model.dim == 2
        if directions == "auto":
            directions = "critical" if empirical_2d and model.n <= CRITICAL_MAX_N else "grid"
        if directions == "critical":
            dirs = critical_directions(cone, model.points)
        elif directions == "grid":
            dirs = direction_base(cone, resolution)
        else:
            raise ValueError(f"unknown direction mode {directions!r}")
        if exact is None:
            exact = empirical_2d
        return cls(model, cone, dirs, exact2d=bool(exact))

    @property
    def dim(self):
        return self.model.dim

    @property
    def tol(self):
        return self.cone.tol

    @property
    def is_exact(self):
        """Whether ``lower_cdf`` is the exact infimum rather than a grid bound."""
        if isinstance(self.model, EmpiricalSample):
            return self.exact2d or self.dim == 1
        return self.dim == 1

    # -- per-direction machinery -------------------------------------------
    @cached_property
    def _arcs(self):
        arcs, isolated = dual_arcs_2d(self.cone)
        iso = np.array([[math.cos(a), math.sin(a)] for a in isolated]).reshape(-1, 2)
        return np.array(arcs, dtype=float).reshape(-1, 2), iso

    @cached_property
    def _sorted(self):
        return self.model.sorted_projections(self.dirs.dirs)

    def sorted_for(self, W=None):
        if W is None:
            return self._sorted
        return self.model.sorted_projections(W)

    def _unit(self, w):
        w = np.asarray(w, dtype=float).ravel()
        nrm = np.linalg.norm(w)
        if w.shape[0] != self.dim or not np.isfinite(nrm) or nrm <= self.tol:
            raise InvalidDirectionError("direction must be a finite nonzero vector of matching dimension")
        if not self.cone.dual_contains(w):
            raise InvalidDirectionError(f"direction {w.tolist()} is not in the dual cone")
        return w / nrm

    def w_cdf(self, w, z):
        """``F_w(z) = P(w @ X <= w @ z)`` for ``w`` in ``C+``."""
        u = self._unit(w)
        return self.model.project_cdf(u, float(u @ np.asarray(z, dtype=float)), slack=self.tol)

    def w_cdf_matrix(self, Z, W=None):
        """``F_w(z)`` for every query row of ``Z`` (rows) and direction of ``W`` (columns)."""
        Z = np.atleast_2d(np.asarray(Z, dtype=float))
        W = self.dirs.dirs if W is None else np.atleast_2d(np.asarray(W, dtype=float))
        zp = Z @ W.T
        if isinstance(self.model, EmpiricalSample):
            sp, cum = self.sorted_for(None if W is self.dirs.dirs else W)
            out = np.empty(zp.shape)
            for j in range(W.shape[0]):
                idx = np.searchsorted(sp[j], zp[:, j] + self.tol, side="right")
                out[:, j] = np.where(idx > 0, cum[j, np.maximum(idx - 1, 0)], 0.0)
            return self.model.prob(out)
        loc, sd, atom = self._gauss_dirs(W)
        with np.errstate(divide="ignore", invalid="ignore"):
            vals = ndtr((zp - loc) / np.where(atom, 1.0, sd))
        return np.where(atom, (zp + self.tol >= loc).astype(float), vals)

    def _gauss_dirs(self, W):
        m = self.model
        loc = W @ m.mu
        sd = np.sqrt(np.maximum(np.einsum("ij,jk,ik->i", W, m.sigma, W), 0.0))
        atom = sd <= m._atom_sd * np.linalg.norm(W, axis=1)
        return loc, sd, atom

    # -- lower C-distribution function -------------------------------------
    def lower_cdf(self, z):
        vals, _ = self.lower_cdf_many(np.atleast_2d(np.asarray(z, dtype=float)))
        return float(vals[0])

    def lower_cdf_many(self, Z):
        """``F_C`` at each row of ``Z`` and a direction attaining it."""
        Z = np.atleast_2d(np.asarray(Z, dtype=float))
        if Z.shape[1] != self.dim:
            raise ValueError(f"query points must have {self.dim} columns")
        if isinstance(self.model, GaussianModel):
            return self._gaussian_lower(Z)
        if self.exact2d:
            return self._sweep_lower(Z)
        sp, cum = self._sorted
        vals, arg = kernels.grid_min(sp, cum, Z @ self.dirs.dirs.T, self.tol)
        return self.model.prob(vals), self.dirs.dirs[arg]

    def _sweep_lower(self, Z):
        arcs, iso = self._arcs
        m = self.model
        q = Z.shape[0]
        vals = np.full(q, np.inf)
        dirs = np.full((q, 2), np.nan)
        if len(arcs):
            v, th = kernels.sweep_min_2d(m.points, m.mass, Z, arcs, self.tol, ANGLE_TOL)
            vals = v
            dirs = np.column_stack([np.cos(th), np.sin(th)])
        if len(iso):
            sp, cum = m.sorted_projections(iso)
            v, arg = kernels.grid_min(sp, cum, Z @ iso.T, self.tol)
            better = v < vals
            vals = np.where(better, v, vals)
            dirs[better] = iso[arg[better]]
        return m.prob(vals), dirs

    def _gaussian_lower(self, Z):
        m = self.model
        W = self.dirs.dirs
        F = self.w_cdf_matrix(Z, W)
        arg = np.argmin(F, axis=1)
        vals = F[np.arange(len(Z)), arg]
        best_dirs = W[arg].copy()
        pinv = np.linalg.pinv(m.sigma)
        arcs = self._arcs[0] if self.dim == 2 else None
        for k, z in enumerate(Z):
            cands = []
            wstar = -pinv @ (z - m.mu)
            if np.linalg.norm(wstar) > self.tol and self.cone.dual_contains(wstar):
                cands.append(wstar / np.linalg.norm(wstar))
            if arcs is not None and len(arcs):
                cands.extend(self._golden_refine(z, best_dirs[k], arcs))
            if cands:
                C = np.array(cands)
                Fc = self.w_cdf_matrix(z[None, :], C)[0]
                j = int(np.argmin(Fc))
                if Fc[j] < vals[k]:
                    vals[k] = Fc[j]
                    best_dirs[k] = C[j]
        return vals, best_dirs

    def _golden_refine(self, z, w0, arcs):
        m = self.model
        d = z - m.mu
        theta0 = math.atan2(w0[1], w0[0])
        # bracket wider than any grid spacing; the grid minimum is kept if golden search does worse
        step = 2.0 * math.pi / max(len(self.dirs.dirs), 2)

        def ratio(th):
            w = np.array([math.cos(th), math.sin(th)])
            sd = math.sqrt(max(float(w @ m.sigma @ w), 0.0))
            if sd <= m._atom_sd:
                return math.inf
            return float(w @ d) / sd

        out = []
        for start, width in arcs:
            rel = (theta0 - start) % (2.0 * math.pi)
            if rel > width + ANGLE_TOL:
                continue
            lo = max(0.0, rel - step)
            hi = min(width, rel + step)
            a, b = start + lo, start + hi
            c = b - _GOLDEN * (b - a)
            e = a + _GOLDEN * (b - a)
            fc, fe = ratio(c), ratio(e)
            for _ in range(80):
                if fc < fe:
                    b, e, fe = e, c, fc
                    c = b - _GOLDEN * (b - a)
                    fc = ratio(c)
                else:
                    a, c, fc = c, e, fe
                    e = a + _GOLDEN * (b - a)
                    fe = ratio(e)
            th = 0.5 * (a + b)
            out.append(np.array([math.cos(th), math.sin(th)]))
        return out

    def tukey_depth(self, z):
        """Halfspace depth; requires the trivial cone ``{0}``."""
        if len(self.cone.generators) != 0:
            raise ValueError("Tukey depth is the lower C-distribution function for C = {0}")
        return self.lower_cdf(z)

    # -- rankings ----------------------------------------------------------
    def rank_psi(self, z1, z2):
        """Total preorder by ``F_C``: -1, 0 or 1."""
        return compare_scalar(self.lower_cdf(z1), self.lower_cdf(z2))

    def rank_phi(self, z1, z2):
        """Componentwise order of ``(F_w(z1))_w`` and ``(F_w(z2))_w`` over the direction set."""
        F = self.w_cdf_matrix(np.vstack([np.asarray(z1, float), np.asarray(z2, float)]))
        return compare_families(F[0], F[1])


def w_cdf(c, w, z):
    return c.w_cdf(w, z)


def lower_cdf(c, z):
    return c.lower_cdf(z)


def tukey_depth(c, z):
    return c.tukey_depth(z)


def rank_psi(c, z1, z2):
    return c.rank_psi(z1, z2)


def rank_phi(c, z1, z2):
    return c.rank_phi(z1, z2)
