"""Global numerical tolerances.

``GEOM_TOL`` is the single slack used by every sign test on inner products
(``w @ x <= w @ z`` is evaluated as ``w @ x <= w @ z + GEOM_TOL``). Cones carry
their own copy so it can be changed per run (CLI ``--tol``).
"""

GEOM_TOL = 1e-9

# Probability comparisons ``F(z) >= p`` are evaluated as ``F(z) >= p - PROB_TOL``
# so that cumulative float sums of weights do not flip threshold decisions.
PROB_TOL = 1e-12

# Critical angles closer than this (radians) are treated as coincident by the sweep.
ANGLE_TOL = 1e-10


def prob_geq(value, p):
    """``value >= p`` up to ``PROB_TOL``; works elementwise on arrays."""
    return value >= p - PROB_TOL
