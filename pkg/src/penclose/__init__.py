"""Enclosure-method reconstruction for the weighted p-Laplace equation.

The library builds exponentially growing p-harmonic test functions from a
periodic oscillator profile, solves the weighted p-Laplace Dirichlet
problem by energy minimization, evaluates the boundary-pairing indicator
over growth rates and directions, and intersects the resulting support
half-planes into the convex hull of a conductivity inclusion.
"""

from .config import RunConfig
from .errors import PencloseError
from .geometry import (
    ConvexPolygon,
    Disk,
    HullResult,
    ShapeUnion,
    SupportEstimate,
    contains,
    halfspace_intersection,
    hausdorff_distance,
    penetration_integral,
    square,
    support_function,
)
from .indicator import (
    IndicatorSample,
    ReconstructionResult,
    SweepResult,
    estimate_support,
    reconstruct_hull,
    sweep,
    uniform_directions,
)
from .mesh import (
    ConductivityField,
    Mesh,
    assign_conductivity,
    background_field,
    generate_mesh,
    p1_gradient,
)
from .monotonicity import MonotonicityReport, check_monotonicity, random_suite
from .solver import SolveReport, dirichlet_energy, dn_pairing, solve_forward
from .wolff import (
    DirectionFrame,
    TestFunctionParams,
    WolffProfile,
    detect_period,
    eval_wolff,
    fd_plaplace_residual,
    integrate_profile,
    pharmonic_residual,
    potential_V,
)

__version__ = "0.1.0"
