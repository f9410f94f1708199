"""Two-sided monotonicity check for pairs of conductivities.

For any boundary data f and conductivities sigma0, sigma1 the difference
of boundary pairings is sandwiched between two weighted integrals of the
sigma0-solution's gradient:

    (p-1) int (sigma0 / sigma1^(1/(p-1)))
              (sigma1^(1/(p-1)) - sigma0^(1/(p-1))) |grad u0|^p
        <=  pairing(sigma1) - pairing(sigma0)
        <=  int (sigma1 - sigma0) |grad u0|^p.

Both sides and the middle share a sign: nonnegative when sigma1 >= sigma0
pointwise and nonpositive when sigma1 <= sigma0.  The chain holds exactly
in the discrete minimization (the same P1 space hosts both solves and the
discrete Euler-Lagrange equation kills the cross term), so the observed
slack is attributable to solver tolerance.  At p = 2 the lower bound
reduces to the classical identity int (sigma0/sigma1)(sigma1 - sigma0)
|grad u0|^2.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from . import geometry, wolff
from .mesh import ConductivityField, Mesh, assign_conductivity, background_field, generate_mesh, p1_gradient
from .solver import DEFAULT_TOL, dirichlet_energy, solve_forward

log = logging.getLogger(__name__)

# discrete slack allowance relative to the chain scale, on top of the
# propagated solver error
REL_TOL = 1e-6


@dataclass
class MonotonicityReport:
    """The three chain values and the verdict for one case."""

    lower: float
    middle: float
    upper: float
    p: float
    verdict: bool
    slack_lower: float
    slack_upper: float


def check_monotonicity(
    m: Mesh,
    sigma0: ConductivityField,
    sigma1: ConductivityField,
    boundary_values,
    p: float,
    tol: float = DEFAULT_TOL,
) -> MonotonicityReport:
    """Assemble the chain lower <= middle <= upper on one mesh.

    The sigma0 solve provides both |grad u0| for the two bounds and the
    sigma0 pairing; sigma1 needs one more solve.  The verdict allows
    100x the propagated solver error plus a 1e-6 relative slack.
    """
    u0, rep0 = solve_forward(m, sigma0, boundary_values, p, tol=tol)
    u1, rep1 = solve_forward(m, sigma1, boundary_values, p, tol=tol)

    g = p1_gradient(m, u0)
    gp = (g[:, 0] ** 2 + g[:, 1] ** 2) ** (0.5 * p)
    s0 = sigma0.values
    s1 = sigma1.values
    e = 1.0 / (p - 1.0)
    lower = (p - 1.0) * float(
        np.sum(m.areas * (s0 / s1 ** e) * (s1 ** e - s0 ** e) * gp)
    )
    upper = float(np.sum(m.areas * (s1 - s0) * gp))
    middle = rep1.energy - rep0.energy

    solver_err = 100.0 * (rep0.decrement + rep1.decrement
                          + 64.0 * np.finfo(float).eps * (abs(rep0.energy) + abs(rep1.energy)))
    allowance = float(solver_err + REL_TOL * max(abs(lower), abs(upper), 1e-300))
    slack_lower = middle - lower
    slack_upper = upper - middle
    verdict = bool(slack_lower >= -allowance and slack_upper >= -allowance)
    if not verdict:
        log.warning(
            "monotonicity chain violated: lower=%.6e middle=%.6e upper=%.6e", lower, middle, upper
        )
    return MonotonicityReport(
        lower=lower, middle=middle, upper=upper, p=p,
        verdict=verdict, slack_lower=slack_lower, slack_upper=slack_upper,
    )


def random_suite(
    p_list=(1.3, 1.5, 2.0, 3.0, 5.0),
    cases_per_p: int = 50,
    seed: int = 0,
    target_h: float = 1.0 / 24.0,
    tol: float = DEFAULT_TOL,
):
    """Randomized chain checks: disk inclusions, contrasts in [-0.9, 4].

    Boundary data alternates randomly between affine functions and
    oscillatory exponential traces (rate limited by the mesh rule).
    Yields one record dict per case; the generator is deterministic in
    the seed, which every record carries.
    """
    rng = np.random.default_rng(seed)
    omega = geometry.square((0.0, 0.0), 1.0)
    m = generate_mesh(omega, target_h)
    bnodes = m.vertices[m.boundary_nodes]
    sigma0 = background_field(m)
    tau_max = 0.2 / m.h_max
    profiles = {p: wolff.integrate_profile(p) for p in p_list}

    for p in p_list:
        for k in range(cases_per_p):
            center = rng.uniform(-0.25, 0.25, size=2)
            radius = float(rng.uniform(0.05, 0.2))
            contrast = float(rng.uniform(-0.9, 4.0))
            disk = geometry.Disk(center=tuple(center), radius=radius)
            sigma1 = assign_conductivity(m, disk, contrast)
            if rng.random() < 0.5:
                coeff = rng.uniform(-1.0, 1.0, size=2)
                coeff /= max(0.2, float(np.hypot(*coeff)))
                offset = float(rng.uniform(-0.5, 0.5))
                bv = bnodes @ coeff + offset
                data = {"kind": "affine", "coeff": coeff.tolist(), "offset": offset}
            else:
                angle = float(rng.uniform(0.0, 2.0 * math.pi))
                tau = float(rng.uniform(1.0, min(3.0, tau_max)))
                frame = wolff.DirectionFrame.from_angle(angle)
                t_anchor = geometry.support_function(omega, frame.rho)
                params = wolff.TestFunctionParams(
                    frame=frame, tau=tau, t=t_anchor, profile=profiles[p]
                )
                bv = wolff.eval_wolff(params, bnodes)[0]
                data = {"kind": "wolff", "angle": angle, "tau": tau, "t": t_anchor}
            report = check_monotonicity(m, sigma0, sigma1, bv, p, tol=tol)
            yield {
                "seed": seed,
                "case": k,
                "p": p,
                "inclusion": {"center": center.tolist(), "radius": radius},
                "contrast": contrast,
                "boundary": data,
                "lower": report.lower,
                "middle": report.middle,
                "upper": report.upper,
                "slack_lower": report.slack_lower,
                "slack_upper": report.slack_upper,
                "verdict": report.verdict,
            }
