"""Probe grids: the finite point sets on which set equality and containment are tested."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .distributions import EmpiricalSample

DEFAULT_PER_AXIS = 41
DEFAULT_INFLATE = 0.25


@dataclass(frozen=True)
class ProbeGrid:
    lo: tuple
    hi: tuple
    per_axis: int = DEFAULT_PER_AXIS

    def __post_init__(self):
        if len(self.lo) != len(self.hi) or not len(self.lo):
            raise ValueError("probe box bounds must have equal nonzero length")
        if self.per_axis < 2:
            raise ValueError("need at least 2 probes per axis")
        if any(b < a for a, b in zip(self.lo, self.hi)):
            raise ValueError("probe box upper bound below lower bound")

    @property
    def dim(self):
        return len(self.lo)

    @classmethod
    def around(cls, points, inflate=DEFAULT_INFLATE, per_axis=DEFAULT_PER_AXIS):
        """Bounding box of ``points`` widened by ``inflate`` times its span on each side."""
        P = np.atleast_2d(np.asarray(points, dtype=float))
        lo, hi = P.min(axis=0), P.max(axis=0)
        span = np.where(hi - lo > 0, hi - lo, 1.0)
        return cls(tuple(lo - inflate * span), tuple(hi + inflate * span), per_axis)

    @classmethod
    def for_model(cls, model, inflate=DEFAULT_INFLATE, per_axis=DEFAULT_PER_AXIS):
        if isinstance(model, EmpiricalSample):
            return cls.around(model.points, inflate, per_axis)
        sd = np.sqrt(np.maximum(np.diag(model.sigma), 1e-12))
        return cls.around(np.vstack([model.mu - 2 * sd, model.mu + 2 * sd]), inflate, per_axis)

    @property
    def bbox(self):
        """``(xmin, ymin, xmax, ymax)`` for planar grids."""
        if self.dim != 2:
            raise ValueError("bbox is defined for planar grids")
        return (self.lo[0], self.lo[1], self.hi[0], self.hi[1])

    def points(self):
        axes = [np.linspace(a, b, self.per_axis) for a, b in zip(self.lo, self.hi)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.column_stack([m.ravel() for m in mesh])
