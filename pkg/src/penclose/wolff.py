"""Exponentially growing test solutions of the p-Laplace equation.

The building block is the scalar profile a(s) solving the oscillator

    a'' + V(a, a') a = 0,
    V(a, b) = ((2p - 3) b**2 + (p - 1) a**2) / ((p - 1) b**2 + a**2),

whose orbit in the (a, a') plane is a closed loop around the origin for
every nonzero initial condition: a is periodic with some period
lambda_p > 0, has zero mean over one period, and a**2 + a'**2 stays
pinched between positive constants.  From the profile and an orthonormal
frame (rho, rho_perp) the test function

    u0(x) = exp(tau * (x . rho - t)) * a(tau * x . rho_perp)

is p-harmonic in the plane: exponential along rho and oscillatory across
it.  At p = 2 the oscillator degenerates to a'' + a = 0 and u0 is the
classical harmonic exponential exp(tau(x1 - t)) * cos(tau x2).

The integrator is a fixed-step classical RK4; the period is recovered by
tracking the winding angle of the orbit, which is strictly monotone
because d(theta)/ds = -(p-1)(a^2+b^2) / ((p-1) b^2 + a^2) < 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import (
    DegenerateInputError,
    ExponentOverflowError,
    OrbitCollapseError,
    PeriodDetectionError,
    ResolutionError,
)

_EXP_ARG_MAX = 700.0        # just under log(max float64)
_COLLAPSE_FRACTION = 1e-8   # r^2 below this fraction of r0^2 means the step blew up
_TWO_PI = 2.0 * math.pi


def _check_exponent(p: float) -> None:
    if not (1.0 < p < math.inf):
        raise ValueError(f"exponent p must lie in (1, inf), got {p}")


def potential_V(a: float, a_prime: float, p: float):
    """Oscillator coefficient ((2p-3) a'^2 + (p-1) a^2) / ((p-1) a'^2 + a^2).

    Accepts scalars or numpy arrays.  Raises DegenerateInputError where
    both arguments vanish (the denominator is zero there).
    """
    _check_exponent(p)
    a = np.asarray(a, dtype=float)
    b = np.asarray(a_prime, dtype=float)
    denom = (p - 1.0) * b * b + a * a
    if np.any(denom == 0.0):
        raise DegenerateInputError("potential_V undefined at a = a' = 0")
    out = ((2.0 * p - 3.0) * b * b + (p - 1.0) * a * a) / denom
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True, eq=False)
class WolffProfile:
    """Sampled periodic oscillator orbit for one exponent p.

    samples[i] = (a, a') at s = i * step, covering the full integration
    span (at least two periods).  period is the detected lambda_p.
    """

    p: float
    a0: float
    b0: float
    step: float
    samples: np.ndarray
    period: float

    def __post_init__(self):
        _check_exponent(self.p)
        if self.step <= 0.0:
            raise ValueError("step must be positive")
        if self.period <= 0.0:
            raise ValueError("period must be positive")
        if self.samples.ndim != 2 or self.samples.shape[1] != 2:
            raise ValueError("samples must be an (N, 2) array of (a, a') pairs")
        r2 = self.samples[:, 0] ** 2 + self.samples[:, 1] ** 2
        if not np.all(np.isfinite(r2)) or r2.min() <= 0.0:
            raise ValueError("orbit samples must stay finite and away from the origin")

    @property
    def s_max(self) -> float:
        return (len(self.samples) - 1) * self.step

    def orbit_bounds(self) -> tuple[float, float]:
        """Empirical (c, C) with c <= a^2 + a'^2 <= C over the samples."""
        r2 = self.samples[:, 0] ** 2 + self.samples[:, 1] ** 2
        return float(r2.min()), float(r2.max())

    @cached_property
    def _b_derivative(self) -> np.ndarray:
        # b' = -V(a, b) a at the sample points; free Hermite data for a'.
        a = self.samples[:, 0]
        b = self.samples[:, 1]
        return -potential_V(a, b, self.p) * a

    def ab(self, s) -> tuple[np.ndarray, np.ndarray]:
        """Evaluate (a, a') at arbitrary parameters by periodic extension.

        s is reduced modulo the period, then each of a and a' is cubic
        Hermite interpolated on its sample interval (the derivative data
        a' and a'' = -V a are exact at the nodes).
        """
        s = np.asarray(s, dtype=float)
        sr = np.mod(s, self.period)
        idx = np.minimum((sr / self.step).astype(int), len(self.samples) - 2)
        u = sr / self.step - idx
        u2 = u * u
        u3 = u2 * u
        h00 = 2.0 * u3 - 3.0 * u2 + 1.0
        h10 = u3 - 2.0 * u2 + u
        h01 = -2.0 * u3 + 3.0 * u2
        h11 = u3 - u2
        a = self.samples[:, 0]
        b = self.samples[:, 1]
        db = self._b_derivative
        h = self.step
        aval = h00 * a[idx] + h10 * h * b[idx] + h01 * a[idx + 1] + h11 * h * b[idx + 1]
        bval = h00 * b[idx] + h10 * h * db[idx] + h01 * b[idx + 1] + h11 * h * db[idx + 1]
        return aval, bval

    def period_integral(self) -> float:
        """Trapezoidal integral of a over one period (should vanish)."""
        k = int(self.period // self.step)
        s_last = k * self.step
        total = float(np.trapezoid(self.samples[: k + 1, 0], dx=self.step))
        # Simpson on the fractional remainder [s_last, period].
        rem = self.period - s_last
        if rem > 0.0:
            pts = np.array([s_last, s_last + 0.5 * rem, self.period])
            av, _ = self.ab(pts)
            total += rem / 6.0 * (av[0] + 4.0 * av[1] + av[2])
        return total

    def ode_residual(self) -> float:
        """Max |a'' + V(a, a') a| over interior samples.

        a'' is estimated by the fourth-order five-point stencil so the
        check resolves the integrator's own drift instead of being
        dominated by second-order differencing noise.
        """
        a = self.samples[:, 0]
        b = self.samples[:, 1]
        h = self.step
        a_dd = (
            -a[4:] + 16.0 * a[3:-1] - 30.0 * a[2:-2] + 16.0 * a[1:-3] - a[:-4]
        ) / (12.0 * h * h)
        res = a_dd + potential_V(a[2:-2], b[2:-2], self.p) * a[2:-2]
        return float(np.abs(res).max())

    def closure_error(self) -> float:
        """Orbit distance between the states at s = 0 and s = period."""
        av, bv = self.ab(np.array([self.period]))
        return float(math.hypot(av[0] - self.a0, bv[0] - self.b0))

    def to_csv(self, path) -> None:
        """Dump the sampled profile: comment line with p and period, then s,a,a_prime rows."""
        with open(path, "w", newline="") as fh:
            fh.write(f"# p={float(self.p)!r} period={float(self.period)!r}\n")
            fh.write("s,a,a_prime\n")
            for i, (a, b) in enumerate(self.samples):
                fh.write(f"{float(i * self.step)!r},{float(a)!r},{float(b)!r}\n")


@dataclass(frozen=True)
class DirectionFrame:
    """Orthonormal pair (rho, rho_perp) in the plane."""

    rho: tuple[float, float]
    rho_perp: tuple[float, float]

    def __post_init__(self):
        rx, ry = self.rho
        qx, qy = self.rho_perp
        if abs(math.hypot(rx, ry) - 1.0) > 1e-12 or abs(math.hypot(qx, qy) - 1.0) > 1e-12:
            raise ValueError("frame vectors must be unit length")
        if abs(rx * qx + ry * qy) > 1e-12:
            raise ValueError("frame vectors must be orthogonal")

    @classmethod
    def from_direction(cls, rho) -> "DirectionFrame":
        """Normalize rho and attach the +90-degree rotation as rho_perp."""
        rx, ry = float(rho[0]), float(rho[1])
        n = math.hypot(rx, ry)
        if n == 0.0:
            raise ValueError("direction must be nonzero")
        rx, ry = rx / n, ry / n
        return cls(rho=(rx, ry), rho_perp=(-ry, rx))

    @classmethod
    def from_angle(cls, theta: float) -> "DirectionFrame":
        return cls.from_direction((math.cos(theta), math.sin(theta)))


@dataclass(frozen=True)
class TestFunctionParams:
    """Growth direction, rate tau, level offset t, and the profile to use."""

    frame: DirectionFrame
    tau: float
    t: float
    profile: WolffProfile

    def __post_init__(self):
        if self.tau <= 0.0:
            raise ValueError("tau must be positive")


def integrate_profile(
    p: float,
    a0: float = 1.0,
    b0: float = 0.0,
    step: float = 1e-3,
    span: float = 40.0,
) -> WolffProfile:
    """Integrate the oscillator with fixed-step RK4 and detect its period.

    Parameters
    ----------
    p : exponent in (1, inf).
    a0, b0 : initial (a, a'), not both zero.
    step : RK4 step; 1e-3 keeps the FD residual of the samples near 1e-6.
    span : integration length; must cover at least two periods.

    Raises
    ------
    OrbitCollapseError
        if the orbit radius collapses toward the origin (step too large).
    PeriodDetectionError
        if no full revolution fits in the span, or fewer than two do.
    """
    _check_exponent(p)
    if a0 == 0.0 and b0 == 0.0:
        raise DegenerateInputError("initial conditions (a0, b0) must not both vanish")
    if step <= 0.0 or span <= 0.0:
        raise ValueError("step and span must be positive")

    n = int(round(span / step))
    if n < 4:
        raise ValueError("span must cover at least a few steps")
    out = np.empty((n + 1, 2))
    out[0, 0] = a0
    out[0, 1] = b0
    r0_sq = a0 * a0 + b0 * b0
    floor = _COLLAPSE_FRACTION * r0_sq

    c1 = 2.0 * p - 3.0
    c2 = p - 1.0
    a, b = float(a0), float(b0)
    h = step
    for i in range(1, n + 1):
        # inlined RK4 on (a, b) -> (b, -V(a, b) a)
        ka1 = b
        kb1 = -((c1 * b * b + c2 * a * a) / (c2 * b * b + a * a)) * a
        a2 = a + 0.5 * h * ka1
        b2 = b + 0.5 * h * kb1
        ka2 = b2
        kb2 = -((c1 * b2 * b2 + c2 * a2 * a2) / (c2 * b2 * b2 + a2 * a2)) * a2
        a3 = a + 0.5 * h * ka2
        b3 = b + 0.5 * h * kb2
        ka3 = b3
        kb3 = -((c1 * b3 * b3 + c2 * a3 * a3) / (c2 * b3 * b3 + a3 * a3)) * a3
        a4 = a + h * ka3
        b4 = b + h * kb3
        ka4 = b4
        kb4 = -((c1 * b4 * b4 + c2 * a4 * a4) / (c2 * b4 * b4 + a4 * a4)) * a4
        a += h / 6.0 * (ka1 + 2.0 * ka2 + 2.0 * ka3 + ka4)
        b += h / 6.0 * (kb1 + 2.0 * kb2 + 2.0 * kb3 + kb4)
        if a * a + b * b < floor:
            raise OrbitCollapseError(
                f"orbit radius collapsed at s={i * h:.3g}; reduce the step"
            )
        out[i, 0] = a
        out[i, 1] = b

    period = _detect_period(out, step)
    if span < 2.0 * period:
        raise PeriodDetectionError(
            f"span {span} covers fewer than two periods (lambda ~ {period:.6g})"
        )
    return WolffProfile(p=p, a0=a0, b0=b0, step=step, samples=out, period=period)


def _detect_period(samples: np.ndarray, step: float) -> float:
    """Parameter advance for one full (clockwise) revolution of the orbit."""
    theta = np.arctan2(samples[:, 1], samples[:, 0])
    d = np.diff(theta)
    d = (d + math.pi) % _TWO_PI - math.pi
    winding = np.concatenate(([0.0], np.cumsum(d)))
    crossed = np.nonzero(winding <= -_TWO_PI)[0]
    if len(crossed) == 0:
        raise PeriodDetectionError("orbit did not complete a revolution within the span")
    k = int(crossed[0])
    frac = (-_TWO_PI - winding[k - 1]) / (winding[k] - winding[k - 1])
    return float(step * (k - 1 + frac))


def detect_period(profile: WolffProfile) -> float:
    """Re-detect the period from a profile's stored samples."""
    return _detect_period(profile.samples, profile.step)


def eval_wolff(params: TestFunctionParams, x):
    """Evaluate the test function and its gradient.

    x may be a single point (2,) or a batch (..., 2).  Returns
    (value, gradient) with gradient shaped like x.

        value    = exp(tau (x.rho - t)) a(tau x.rho_perp)
        gradient = tau exp(tau (x.rho - t)) (rho a + rho_perp a')
    """
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    pts = np.atleast_2d(x)
    rho = np.array(params.frame.rho)
    rho_perp = np.array(params.frame.rho_perp)
    arg = params.tau * (pts @ rho - params.t)
    if np.any(arg > _EXP_ARG_MAX):
        raise ExponentOverflowError(
            "tau (x.rho - t) exceeds the float64 exponent range; shift t or shrink the window"
        )
    growth = np.exp(arg)
    a, b = params.profile.ab(params.tau * (pts @ rho_perp))
    value = growth * a
    gradient = params.tau * growth[:, None] * (rho[None, :] * a[:, None] + rho_perp[None, :] * b[:, None])
    if single:
        return float(value[0]), gradient[0]
    return value, gradient


def fd_plaplace_residual(values_fn, p: float, grid_spacing: float, window) -> float:
    """Max-norm FD residual of div(|grad u|^(p-2) grad u) on a window.

    values_fn maps an (N, 2) array of points to N samples of u.  Fluxes
    are formed at cell-edge midpoints from second-order differences of u
    and differenced again, so the residual of a smooth p-harmonic
    function decays as O(h^2).
    """
    _check_exponent(p)
    x0, x1, y0, y1 = (float(v) for v in window)
    if not (x1 > x0 and y1 > y0):
        raise ValueError("window must have positive extent")
    nx = max(4, int(round((x1 - x0) / grid_spacing)))
    ny = max(4, int(round((y1 - y0) / grid_spacing)))
    hx = (x1 - x0) / nx
    hy = (y1 - y0) / ny
    xs = x0 + hx * np.arange(nx + 1)
    ys = y0 + hy * np.arange(ny + 1)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    pts = np.column_stack((X.ravel(), Y.ravel()))
    U = values_fn(pts).reshape(nx + 1, ny + 1)

    half = 0.5 * (p - 2.0)

    def flux_weight(q):
        # 0^(negative) would overflow for p < 2; zero gradient means zero flux.
        out = np.zeros_like(q)
        nz = q > 0.0
        out[nz] = q[nz] ** half
        return out

    # vertical faces (i + 1/2, j), j = 1 .. ny-1
    gx = (U[1:, 1:-1] - U[:-1, 1:-1]) / hx
    gy = (U[1:, 2:] + U[:-1, 2:] - U[1:, :-2] - U[:-1, :-2]) / (4.0 * hy)
    fx = flux_weight(gx * gx + gy * gy) * gx
    # horizontal faces (i, j + 1/2), i = 1 .. nx-1
    gyh = (U[1:-1, 1:] - U[1:-1, :-1]) / hy
    gxh = (U[2:, 1:] + U[2:, :-1] - U[:-2, 1:] - U[:-2, :-1]) / (4.0 * hx)
    fy = flux_weight(gxh * gxh + gyh * gyh) * gyh

    div = (fx[1:, :] - fx[:-1, :]) / hx + (fy[:, 1:] - fy[:, :-1]) / hy
    return float(np.abs(div).max())


def pharmonic_residual(params: TestFunctionParams, grid_spacing: float, window) -> float:
    """FD p-Laplace residual of the test function on an axis-aligned window."""
    if params.tau * grid_spacing > 0.2 * (1.0 + 1e-9):
        raise ResolutionError(
            f"tau * grid_spacing = {params.tau * grid_spacing:.3g} > 0.2 cannot resolve the oscillation"
        )
    return fd_plaplace_residual(
        lambda pts: eval_wolff(params, pts)[0], params.profile.p, grid_spacing, window
    )
