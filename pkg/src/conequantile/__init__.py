"""Lower cone distribution functions, set-valued quantiles and their Galois structure."""

__version__ = "0.1.0"

from .config import ANGLE_TOL, GEOM_TOL, PROB_TOL
from .errors import (
    ConeQuantileError,
    ConfigurationError,
    DegenerateConeError,
    InvalidDirectionError,
    UnsupportedDimensionError,
)
from .cones import ConvexCone, DirectionSet, Halfspace, cone_contains, critical_directions, direction_base, dual_cone, leq_C
from .distributions import EmpiricalSample, GaussianModel, project_cdf, project_quantile, project_strict_cdf
from .conecdf import Comparison, ConeCdf, lower_cdf, rank_phi, rank_psi, tukey_depth, w_cdf
from .regions import (
    CRegion,
    QuantileFn,
    dual_quantile,
    lower_quantile,
    member,
    region_member,
    vertices_2d,
    w_quantile_halfspace,
)
from .galois import (
    EMPTY_INF,
    ClosureReport,
    GenSet,
    adjunction_check,
    cl_phi,
    cl_psi,
    closure_report,
    fixed_point_check,
    inf_extension,
    inf_extension_w,
    phi_identity_check,
    set_rank,
)
from .probes import ProbeGrid
from .randomset import CapacityEstimate, CompactTestSet, SeededRng, capacity_exact, capacity_mc, draw, hits
