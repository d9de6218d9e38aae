"""The random set ``X = Q_C(U)`` for a standard uniform ``U`` and its capacity functional.

``X ∩ K ≠ ∅`` happens exactly when ``U <= max_{z in K} F_C(z)``, so for a
finite test set ``K`` the capacity ``T(K) = P(X ∩ K ≠ ∅)`` is that maximum.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .config import prob_geq
from .errors import ConfigurationError

MIN_DRAWS = 100


class SeededRng:
    """``numpy`` ``Generator`` over ``PCG64`` with a recorded 64-bit seed."""

    ALGORITHM = "PCG64"

    def __init__(self, seed):
        seed = int(seed)
        if not 0 <= seed < 2**64:
            raise ConfigurationError(f"seed must be a 64-bit unsigned integer, got {seed}")
        self.seed = seed
        self._gen = np.random.Generator(np.random.PCG64(seed))

    def uniform(self, size=None):
        return self._gen.random(size)

    def integers(self, low, high=None, size=None):
        return self._gen.integers(low, high, size)

    def normal(self, size=None):
        return self._gen.standard_normal(size)

    def spawn(self, k):
        """``k`` independent child streams derived from the seed."""
        children = np.random.SeedSequence(self.seed).spawn(k)
        out = []
        for ch in children:
            r = SeededRng.__new__(SeededRng)
            r.seed = self.seed
            r._gen = np.random.Generator(np.random.PCG64(ch))
            out.append(r)
        return out


class CompactTestSet:
    """Finite nonempty point set ``K``."""

    def __init__(self, K):
        K = np.atleast_2d(np.asarray(K, dtype=float))
        if K.size == 0:
            raise ConfigurationError("test set K must be nonempty")
        if not np.all(np.isfinite(K)):
            raise ConfigurationError("test set K must have finite coordinates")
        self.K = K

    def __len__(self):
        return len(self.K)


@dataclass(frozen=True)
class CapacityEstimate:
    exact: float
    mc_estimate: float
    n_draws: int
    std_error: float
    seed: int
    hits: int
    algorithm: str = SeededRng.ALGORITHM

    def within(self, k=3.0):
        return abs(self.mc_estimate - self.exact) <= k * self.std_error

    def to_dict(self):
        return asdict(self)


def _points(K):
    return K.K if isinstance(K, CompactTestSet) else CompactTestSet(K).K


def draw(q, rng):
    """``(u, Q(u))`` for one uniform draw ``u``."""
    u = float(rng.uniform())
    return u, q.lower_quantile(u)


def hits(q, u, K):
    """Whether ``Q(u)`` meets ``K``: some ``z`` in ``K`` has ``F_C(z) >= u``."""
    return bool(np.any(q.member_many(u, _points(K))))


def capacity_exact(c, K):
    vals, _ = c.lower_cdf_many(_points(K))
    return float(vals.max())


def capacity_mc(q, K, n, rng, trace=False):
    """Hit frequency over ``n`` draws; with ``trace`` also returns the ``(u, hit)`` arrays."""
    if int(n) < MIN_DRAWS:
        raise ConfigurationError(f"need at least {MIN_DRAWS} draws, got n={n}")
    n = int(n)
    t = capacity_exact(q.conecdf, K)
    u = rng.uniform(n)
    hit = (u <= 0.0) | prob_geq(t, u)
    k = int(hit.sum())
    mc = k / n
    est = CapacityEstimate(t, mc, n, math.sqrt(mc * (1.0 - mc) / n), rng.seed, k)
    if trace:
        return est, (u, hit)
    return est
