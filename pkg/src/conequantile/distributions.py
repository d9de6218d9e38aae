"""Probability models supplying the law of every projection ``w @ X``.

Two models are provided: a weighted empirical sample and a Gaussian. Both
expose the univariate cdf (weak and strict) and the lower quantile of the
projection onto a direction ``w``.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import ndtr, ndtri

from .config import PROB_TOL
from .errors import InvalidDirectionError

_ATOM_REL = 1e-7


def _direction(w, dim):
    w = np.asarray(w, dtype=float).ravel()
    if w.shape[0] != dim:
        raise InvalidDirectionError(f"direction has dimension {w.shape[0]}, model has {dim}")
    if not np.all(np.isfinite(w)) or not np.any(w != 0.0):
        raise InvalidDirectionError("direction must be finite and nonzero")
    return w


def _check_p(p):
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability level must lie in [0, 1], got {p}")


class EmpiricalSample:
    """Weighted point sample; uniform weights by default.

    Uniform weights are stored as unit masses with ``denom = n`` so that
    counts are summed exactly and divided once.
    """

    kind = "empirical"

    def __init__(self, points, weights=None):
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] < 1:
            raise ValueError("points must be an (n, d) array with n >= 1")
        if not np.all(np.isfinite(pts)):
            raise ValueError("sample coordinates must be finite")
        self.points = pts
        self.points.setflags(write=False)
        n = pts.shape[0]
        if weights is None:
            self.uniform = True
            self.weights = np.full(n, 1.0 / n)
            self.mass = np.ones(n)
            self.denom = float(n)
        else:
            w = np.asarray(weights, dtype=float).ravel()
            if w.shape[0] != n:
                raise ValueError("need one weight per point")
            if np.any(w < 0) or not np.all(np.isfinite(w)):
                raise ValueError("weights must be finite and nonnegative")
            if abs(w.sum() - 1.0) > 1e-12:
                raise ValueError(f"weights must sum to 1 (got {w.sum()!r})")
            self.uniform = bool(np.all(w == w[0]))
            self.weights = w
            self.mass = np.ones(n) if self.uniform else w
            self.denom = float(n) if self.uniform else 1.0
        self.weights.setflags(write=False)

    @property
    def dim(self):
        return self.points.shape[1]

    @property
    def n(self):
        return self.points.shape[0]

    def __repr__(self):
        return f"EmpiricalSample(n={self.n}, dim={self.dim}, uniform={self.uniform})"

    def prob(self, mass_sum):
        """Convert a summed mass to a probability."""
        return mass_sum / self.denom

    def shifted(self, c):
        """The model of ``X + c``."""
        return EmpiricalSample(self.points + np.asarray(c, dtype=float), None if self.uniform else self.weights)

    def _sorted(self, w):
        proj = self.points @ w
        order = np.argsort(proj, kind="stable")
        return proj[order], np.cumsum(self.mass[order])

    def project_cdf(self, w, t, slack=0.0):
        w = _direction(w, self.dim)
        if t == -math.inf:
            return 0.0
        if t == math.inf:
            return 1.0
        hit = self.points @ w <= t + slack
        return self.prob(self.mass[hit].sum())

    def project_strict_cdf(self, w, t, slack=0.0):
        w = _direction(w, self.dim)
        if t == -math.inf:
            return 0.0
        if t == math.inf:
            return 1.0
        hit = self.points @ w < t - slack
        return self.prob(self.mass[hit].sum())

    def project_quantile(self, w, p):
        """``inf{s : P(w @ X <= s) >= p}``; ``-inf`` at ``p = 0``."""
        w = _direction(w, self.dim)
        _check_p(p)
        if p == 0.0:
            return -math.inf
        s, cum = self._sorted(w)
        k = int(np.searchsorted(cum / self.denom, p - PROB_TOL, side="left"))
        return float(s[min(k, len(s) - 1)])

    def strict_sup_level(self, w, p):
        """``sup{r : P(w @ X < r) < p}`` from the strict cdf at the distinct projections."""
        w = _direction(w, self.dim)
        _check_p(p)
        vals = np.unique(self.points @ w)
        below = np.array([self.project_strict_cdf(w, r) for r in vals])
        ok = below < p - PROB_TOL
        if not np.any(ok):
            return -math.inf
        return float(vals[ok].max())

    def closure_threshold(self, w, t, slack=0.0):
        """Smallest ``s`` with ``F(s) >= F(t)`` for the projection cdf ``F``.

        This is the largest projection not exceeding ``t`` (``-inf`` if none).
        """
        w = _direction(w, self.dim)
        if t == -math.inf:
            return -math.inf
        proj = self.points @ w
        below = proj[(proj <= t + slack) & (self.mass > 0)]
        return float(below.max()) if below.size else -math.inf

    def sorted_projections(self, W):
        """Ascending projections onto each row of ``W`` and matching cumulative masses."""
        P = np.asarray(W, dtype=float) @ self.points.T
        order = np.argsort(P, axis=1, kind="stable")
        sp = np.take_along_axis(P, order, axis=1)
        cum = np.cumsum(self.mass[order], axis=1)
        return sp, cum


class GaussianModel:
    """Normal law ``N(mu, sigma)`` with ``sigma`` symmetric positive semidefinite."""

    kind = "gaussian"

    def __init__(self, mu, sigma):
        mu = np.asarray(mu, dtype=float).ravel()
        sigma = np.asarray(sigma, dtype=float)
        if sigma.shape != (mu.shape[0], mu.shape[0]):
            raise ValueError("sigma must be a d x d matrix matching mu")
        if not (np.all(np.isfinite(mu)) and np.all(np.isfinite(sigma))):
            raise ValueError("mu and sigma must be finite")
        if np.max(np.abs(sigma - sigma.T), initial=0.0) > 1e-12:
            raise ValueError("sigma must be symmetric")
        if np.min(np.linalg.eigvalsh(sigma)) < -1e-10:
            raise ValueError("sigma must be positive semidefinite")
        self.mu = mu
        self.sigma = 0.5 * (sigma + sigma.T)
        self.mu.setflags(write=False)
        self.sigma.setflags(write=False)
        # projections with smaller standard deviation are treated as point masses
        self._atom_sd = _ATOM_REL * math.sqrt(max(1.0, float(np.max(np.abs(self.sigma), initial=0.0))))

    @property
    def dim(self):
        return self.mu.shape[0]

    def __repr__(self):
        return f"GaussianModel(dim={self.dim})"

    def shifted(self, c):
        return GaussianModel(self.mu + np.asarray(c, dtype=float), self.sigma)

    def _loc_scale(self, w):
        w = _direction(w, self.dim)
        sd = math.sqrt(max(float(w @ self.sigma @ w), 0.0))
        return float(w @ self.mu), sd, sd <= self._atom_sd * float(np.linalg.norm(w))

    def project_cdf(self, w, t, slack=0.0):
        loc, sd, atom = self._loc_scale(w)
        if t == -math.inf:
            return 0.0
        if t == math.inf:
            return 1.0
        if atom:
            return 1.0 if t + slack >= loc else 0.0
        return float(ndtr((t - loc) / sd))

    def project_strict_cdf(self, w, t, slack=0.0):
        loc, sd, atom = self._loc_scale(w)
        if t == -math.inf:
            return 0.0
        if t == math.inf:
            return 1.0
        if atom:
            return 1.0 if t - slack > loc else 0.0
        return float(ndtr((t - loc) / sd))

    def project_quantile(self, w, p):
        loc, sd, atom = self._loc_scale(w)
        _check_p(p)
        if p == 0.0:
            return -math.inf
        if atom:
            return loc
        if p == 1.0:
            return math.inf
        return float(loc + sd * ndtri(p))

    def strict_sup_level(self, w, p):
        # atomless unless degenerate, where P(w@X < r) < p holds exactly for r <= loc
        loc, sd, atom = self._loc_scale(w)
        _check_p(p)
        if p == 0.0:
            return -math.inf
        if atom:
            return loc
        if p == 1.0:
            return math.inf
        return float(loc + sd * ndtri(p))

    def closure_threshold(self, w, t, slack=0.0):
        loc, sd, atom = self._loc_scale(w)
        if t == -math.inf:
            return -math.inf
        if atom:
            return loc if t + slack >= loc else -math.inf
        return float(t)


def project_cdf(model, w, t):
    return model.project_cdf(w, t)


def project_strict_cdf(model, w, t):
    return model.project_strict_cdf(w, t)


def project_quantile(model, w, p):
    return model.project_quantile(w, p)
