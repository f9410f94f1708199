"""Indicator function, tau sweeps, support estimates, and hull recovery.

The indicator at direction rho, growth rate tau, and level offset t is

    I = tau^(2 - p) * (pairing_sigma - pairing_background),

the normalized difference of the boundary pairings with and without the
inclusion, driven by the exponential test function anchored at t.  Its
behavior in tau separates three regimes: exponential decay once the level
set x . rho = t has passed the inclusion (t > h_D(rho)), exponential
growth before it (t < h_D(rho)), and at most polynomial size at the
touching offset.  Fitting the slope of log|I| against tau therefore
recovers the support value, h_hat = t + slope / p, and intersecting the
resulting half-planes over a fan of directions recovers the convex hull.

Level offsets are anchored at t = h_Omega(rho) during reconstruction so
the test function stays bounded by 1 on the domain; by the exact discrete
scaling I(tau, t1) = exp(p tau (t2 - t1)) I(tau, t2) the anchor choice
does not affect the estimates.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import geometry, mesh as mesh_mod, solver, wolff
from .config import RunConfig
from .errors import (
    InsufficientDataError,
    NoiseFloorError,
    ReconstructionError,
    ResolutionError,
)

log = logging.getLogger(__name__)

NOISE_FLOOR_FACTOR = 10.0
MESH_RULE = 0.2               # enforce tau * h_max <= MESH_RULE


@dataclass(frozen=True)
class IndicatorSample:
    """One indicator evaluation and the two pairings behind it."""

    rho: tuple[float, float]
    tau: float
    t: float
    value: float
    pairing_sigma: float
    pairing_background: float


@dataclass
class SweepResult:
    """Indicator samples at one direction and offset, over increasing tau."""

    samples: list
    slope: float
    sign: int                   # +1 / -1 / 0 (indeterminate)
    usable: np.ndarray          # mask of samples above the noise floor
    fit_residual: float
    noise_floors: np.ndarray


def _pairing_with_noise(m, sig, bv, p, tol):
    u, report = solver.solve_forward(m, sig, bv, p, tol=tol)
    # propagated pairing error: float64 summation scale of the energy plus
    # the suboptimality bound left by the solver
    noise = 64.0 * np.finfo(float).eps * abs(report.energy) + report.decrement
    return report.energy, noise


def _indicator_with_noise(m, sig, bg, profile, rho, tau, t, p, tol):
    if tau * m.h_max > MESH_RULE * (1.0 + 1e-9):
        raise ResolutionError(
            f"tau * h_max = {tau * m.h_max:.3g} > {MESH_RULE}; the mesh aliases the oscillation"
        )
    frame = wolff.DirectionFrame.from_direction(rho)
    params = wolff.TestFunctionParams(frame=frame, tau=tau, t=t, profile=profile)
    bv = wolff.eval_wolff(params, m.vertices[m.boundary_nodes])[0]
    pair_s, noise_s = _pairing_with_noise(m, sig, bv, p, tol)
    pair_b, noise_b = _pairing_with_noise(m, bg, bv, p, tol)
    scale = tau ** (2.0 - p)
    sample = IndicatorSample(
        rho=(float(frame.rho[0]), float(frame.rho[1])),
        tau=tau,
        t=t,
        value=scale * (pair_s - pair_b),
        pairing_sigma=pair_s,
        pairing_background=pair_b,
    )
    return sample, scale * (noise_s + noise_b)


def indicator(m, sig, profile, rho, tau, t, p, tol=solver.DEFAULT_TOL) -> IndicatorSample:
    """Evaluate the indicator on a prepared mesh and conductivity."""
    bg = mesh_mod.background_field(m)
    sample, _ = _indicator_with_noise(m, sig, bg, profile, rho, tau, t, p, tol)
    return sample


def _mesh_for_tau(omega, tau, mesh_budget):
    # cells sized so the longest edge (the diagonal) obeys tau * h_max <= MESH_RULE
    target = MESH_RULE / (tau * math.sqrt(2.0))
    return mesh_mod.generate_mesh(omega, target, max_vertices=mesh_budget)


def _fit_sweep(samples, noise_floors) -> SweepResult:
    values = np.array([s.value for s in samples])
    taus = np.array([s.tau for s in samples])
    floors = np.asarray(noise_floors)
    usable = np.abs(values) >= floors
    signs = np.sign(values[usable])
    sign = int(signs[0]) if len(signs) and np.all(signs == signs[0]) else 0
    slope = math.nan
    fit_residual = math.nan
    n_use = int(usable.sum())
    if n_use >= 2:
        t_use = taus[usable]
        v_use = np.abs(values[usable])
        k = max(2, math.ceil(n_use / 2))        # top half of the tau range
        t_fit = t_use[-k:]
        logv = np.log(v_use[-k:])
        coef, res = np.polyfit(t_fit, logv, 1, full=True)[:2]
        slope = float(coef[0])
        fit_residual = float(math.sqrt(res[0] / k)) if len(res) else 0.0
    return SweepResult(
        samples=list(samples),
        slope=slope,
        sign=sign,
        usable=usable,
        fit_residual=fit_residual,
        noise_floors=floors,
    )


def sweep(
    omega,
    inclusion,
    sigma_d,
    profile,
    rho,
    t,
    p,
    tau_list,
    mesh_budget=40000,
    tol=solver.DEFAULT_TOL,
    noise_factor=NOISE_FLOOR_FACTOR,
) -> SweepResult:
    """Run the indicator over increasing tau, one fresh mesh per tau.

    Each tau gets a mesh obeying tau * h_max <= 0.2 within the vertex
    budget; samples whose |value| sits below noise_factor times the
    propagated pairing-error estimate are excluded from the slope fit.
    """
    taus = [float(v) for v in tau_list]
    if any(b <= a for a, b in zip(taus, taus[1:])):
        raise ValueError("tau_list must be strictly increasing")
    samples = []
    floors = []
    for tau in taus:
        m = _mesh_for_tau(omega, tau, mesh_budget)
        sig = mesh_mod.assign_conductivity(m, inclusion, sigma_d)
        bg = mesh_mod.background_field(m)
        sample, noise = _indicator_with_noise(m, sig, bg, profile, rho, tau, t, p, tol)
        samples.append(sample)
        floors.append(noise_factor * noise)
    return _fit_sweep(samples, floors)


def estimate_support(sweep_result: SweepResult, t: float, p: float) -> geometry.SupportEstimate:
    """Support value from the fitted growth rate: h_hat = t + slope / p.

    The slope of log|I| in tau is p (h_D(rho) - t) up to the polynomial
    prefactor, which vanishes from the fit as the tau range grows.
    """
    usable = sweep_result.usable
    if int(usable.sum()) == 0:
        raise NoiseFloorError("all indicator samples sit below the noise floor")
    if int(usable.sum()) < 4:
        raise InsufficientDataError(
            f"need at least 4 usable samples for a support estimate, have {int(usable.sum())}"
        )
    rho = sweep_result.samples[0].rho
    return geometry.SupportEstimate(
        rho=rho,
        h_hat=t + sweep_result.slope / p,
        slope_fit_residual=sweep_result.fit_residual,
    )


@dataclass
class ReconstructionResult:
    """Hull plus the per-direction estimate table behind it."""

    hull: geometry.HullResult | None
    estimates: list                 # SupportEstimate or None per direction
    sweeps: list                    # SweepResult per direction
    detected: bool
    messages: list


def uniform_directions(n: int) -> list[tuple[float, float]]:
    return [(math.cos(2.0 * math.pi * k / n), math.sin(2.0 * math.pi * k / n)) for k in range(n)]


def reconstruct_hull(config: RunConfig) -> ReconstructionResult:
    """Sweep every direction with offsets anchored at h_Omega(rho), then intersect.

    Directions whose sweep never rises above the noise floor are dropped;
    if none rises, the result reports no inclusion.  Fewer than 3 usable
    directions (with at least one above the floor) is an error.
    """
    config.validate()
    profile = wolff.integrate_profile(config.p)
    dirs = uniform_directions(config.directions)
    taus = [float(v) for v in config.tau_list]

    prepared = {}
    for tau in taus:
        m = _mesh_for_tau(config.domain, tau, config.mesh_budget)
        sig = mesh_mod.assign_conductivity(m, config.inclusion, config.sigma_d)
        prepared[tau] = (m, sig, mesh_mod.background_field(m))
    anchors = [geometry.support_function(config.domain, r) for r in dirs]

    def task(i_dir, i_tau):
        m, sig, bg = prepared[taus[i_tau]]
        return _indicator_with_noise(
            m, sig, bg, profile, dirs[i_dir], taus[i_tau], anchors[i_dir], config.p,
            config.solver_tol,
        )

    results = {}
    with ThreadPoolExecutor(max_workers=config.effective_workers()) as pool:
        futures = {
            (i, j): pool.submit(task, i, j)
            for i in range(len(dirs))
            for j in range(len(taus))
        }
        for key, fut in futures.items():
            results[key] = fut.result()

    sweeps = []
    estimates = []
    messages = []
    for i in range(len(dirs)):
        samples = [results[(i, j)][0] for j in range(len(taus))]
        floors = [NOISE_FLOOR_FACTOR * results[(i, j)][1] for j in range(len(taus))]
        sw = _fit_sweep(samples, floors)
        sweeps.append(sw)
        try:
            estimates.append(estimate_support(sw, anchors[i], config.p))
        except (NoiseFloorError, InsufficientDataError) as exc:
            estimates.append(None)
            messages.append(f"direction {i}: {exc}")
            log.info("direction %d unusable: %s", i, exc)

    good = [e for e in estimates if e is not None]
    if not good:
        return ReconstructionResult(
            hull=None, estimates=estimates, sweeps=sweeps, detected=False,
            messages=messages + ["no inclusion detected"],
        )
    if len(good) < 3:
        raise ReconstructionError(
            f"only {len(good)} of {len(dirs)} directions usable: " + "; ".join(messages)
        )
    hull = geometry.halfspace_intersection(good)
    return ReconstructionResult(
        hull=hull, estimates=estimates, sweeps=sweeps, detected=True, messages=messages,
    )
