"""Spin reduced-state evolution across its three regimes.

The reduced state is tracked through r3 (projection on the total-field axis)
and the complex transverse amplitude r_plus, with r_n = 1 - r3 measuring the
departure from full alignment. The solver works in the rotating frame
(rbar_plus = exp(-2i Omega t) r_plus) so the only fast phases left are the
ones inside the memory kernel; lab-frame output is an exact phase map.

Regimes:
  * early (Gaussian): r_n ~ exp(-H0 t^2 / 2) while the kernel is flat,
  * full solver: the two coupled nonlinear Volterra integro-differential
    equations with trapezoidal history quadrature and a fixed-step
    predictor-corrector,
  * exponential: linearized decay exp(-xi t) after the matching time
    t* = xi / H0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq

from . import modes
from .errors import CrossingError, SolverError
from .modes import KernelTable
from .params import DerivedParams

PURITY_TOL = 1e-9


@dataclass(frozen=True)
class BlochState:
    """Spin state coefficients along the total-field axis nhat.

    r3 is real, r_minus = conj(r_plus), and r3^2 + |r_plus|^2 <= 1 with
    equality for a pure state.
    """

    r3: float
    r_plus: complex

    @property
    def r_n(self) -> float:
        return 1.0 - self.r3

    @property
    def purity_excess(self) -> float:
        return self.r3 ** 2 + abs(self.r_plus) ** 2 - 1.0

    def rbar_plus(self, omega: float, t: float) -> complex:
        """Rotating-frame amplitude exp(-2i Omega t) r_plus."""
        return complex(np.exp(-2j * omega * t) * self.r_plus)

    def validate(self, tol: float = PURITY_TOL) -> None:
        if not math.isfinite(self.r3) or not np.isfinite(self.r_plus):
            raise ValueError("non-finite Bloch state")
        if self.purity_excess > tol:
            raise ValueError(
                f"Bloch vector outside the unit ball: r3^2 + |r+|^2 - 1 = "
                f"{self.purity_excess:.3e}"
            )


def engine_initial_state(params: DerivedParams) -> BlochState:
    """Thermal z-polarized state expressed along nhat: r3 = Delta sin(theta),
    r_plus = Delta cos(theta)."""
    return BlochState(r3=params.Delta * params.sin_theta,
                      r_plus=complex(params.Delta * params.cos_theta))


@dataclass(frozen=True)
class TrajectoryTrace:
    """Time history of the spin state with a per-sample regime tag."""

    times: np.ndarray
    r3: np.ndarray
    r_plus: np.ndarray
    regime: np.ndarray
    radiated_energy: np.ndarray | None = None

    @property
    def r_n(self) -> np.ndarray:
        return 1.0 - self.r3

    def state_at(self, index: int) -> BlochState:
        return BlochState(r3=float(self.r3[index]), r_plus=complex(self.r_plus[index]))


@dataclass(frozen=True)
class EarlyTimeCoeffs:
    """Short-time Taylor data of the decay exponents.

    r_n(t) = r_n(0) exp(-f), f = a2 t^2/2 + a3 t^3/6 + ...
    rbar_plus(t) = rbar_plus(0) exp(-g), g = b2 t^2/2 + b3 t^3/6 + ...
    with a2 = b2 = H0 and a3 = Re(H1) = 0 for a real coupling density.
    The matching fields are populated when the decay rate is supplied.
    """

    a2: float
    b2: float
    a3: float
    b3: complex
    r_n0: float
    rbar_plus0: complex
    t_star: float | None = None
    amp_factor: float | None = None

    def gaussian_r_n(self, t: np.ndarray | float) -> np.ndarray | float:
        return self.r_n0 * np.exp(-0.5 * self.a2 * np.asarray(t, dtype=float) ** 2)

    def gaussian_rbar_plus(self, t: np.ndarray | float) -> np.ndarray | complex:
        t = np.asarray(t, dtype=float)
        return self.rbar_plus0 * np.exp(-(0.5 * self.b2 * t ** 2 + self.b3 * t ** 3 / 6.0))


def early_time_coeffs(
    init: BlochState,
    h0: float,
    h1: complex,
    omega: float,
    xi: float | None = None,
) -> EarlyTimeCoeffs:
    """Taylor coefficients of the early-time Gaussian stage.

    Derived by expanding the memory equations around t = 0: the first-order
    coefficients vanish, the quadratic ones equal H0, and the transverse
    cubic picks up the kernel slope plus the 2 Omega phase drag weighted by
    r_n(0). Note the sign of the H1 term follows from the expansion of the
    equations of motion (see tests against the full solver).
    """
    if h0 <= 0.0:
        raise ValueError("H0 must be > 0")
    a3 = 0.5 * (h1 + h1.conjugate()).real
    b3 = h1 - 2j * omega * h0 * init.r_n
    t_star = None
    amp = None
    if xi is not None:
        if xi < 0.0:
            raise ValueError("xi must be >= 0")
        t_star = xi / h0
        amp = math.exp(xi ** 2 / (2.0 * h0))
    return EarlyTimeCoeffs(a2=h0, b2=h0, a3=a3, b3=b3,
                           r_n0=init.r_n, rbar_plus0=complex(init.rbar_plus(omega, 0.0)),
                           t_star=t_star, amp_factor=amp)


class MatchingPoint(NamedTuple):
    t_star: float
    exp_amplitude: float   # t=0 amplitude of the exponential branch
    amp_factor: float      # exp(xi^2 / (2 H0))


def matching_point(xi: float, h0: float, r_z0: float) -> MatchingPoint:
    """Hand-over from the Gaussian stage to exponential decay.

    Matching value and slope of r_z0 exp(-H0 t^2/2) to A exp(-xi t) gives
    t* = xi/H0 and A = r_z0 exp(xi^2/(2 H0)).
    """
    if h0 <= 0.0:
        raise ValueError("H0 must be > 0")
    if xi < 0.0:
        raise ValueError("xi must be >= 0")
    factor = math.exp(xi ** 2 / (2.0 * h0))
    return MatchingPoint(t_star=xi / h0, exp_amplitude=r_z0 * factor, amp_factor=factor)


def evolve_linearized(init: BlochState, xi: float, omega: float, t: float) -> BlochState:
    """Exponential-stage state: rotating-frame amplitudes decay as exp(-xi t)."""
    if xi < 0.0:
        raise ValueError("xi must be >= 0")
    decay = math.exp(-xi * t)
    r_n = init.r_n * decay
    rbar = init.rbar_plus(omega, 0.0) * decay
    return BlochState(r3=1.0 - r_n, r_plus=complex(rbar * np.exp(2j * omega * t)))


def linearized_trace(init: BlochState, xi: float, omega: float,
                     times: np.ndarray) -> TrajectoryTrace:
    """Linearized trajectory sampled on `times` (tag: exponential)."""
    times = np.asarray(times, dtype=float)
    decay = np.exp(-xi * times)
    r3 = 1.0 - init.r_n * decay
    rbar0 = init.rbar_plus(omega, 0.0)
    r_plus = rbar0 * decay * np.exp(2j * omega * times)
    return TrajectoryTrace(times=times, r3=r3, r_plus=r_plus,
                           regime=np.full(times.shape, "exponential", dtype=object))


def early_time_trace(coeffs: EarlyTimeCoeffs, omega: float,
                     times: np.ndarray) -> TrajectoryTrace:
    """Gaussian-stage trajectory sampled on `times` (tag: early)."""
    times = np.asarray(times, dtype=float)
    r_n = coeffs.gaussian_r_n(times)
    rbar = coeffs.gaussian_rbar_plus(times)
    return TrajectoryTrace(times=times, r3=1.0 - r_n,
                           r_plus=rbar * np.exp(2j * omega * times),
                           regime=np.full(times.shape, "early", dtype=object))


def evolve_full(
    init: BlochState,
    kernel: KernelTable,
    omega: float,
    t_end: float,
    step: float,
    *,
    corrector_iters: int = 2,
    invariant_tol: float = PURITY_TOL,
) -> TrajectoryTrace:
    """Integrate the coupled nonlinear Volterra equations.

    In the rotating frame, with u = r_n and v = rbar_plus,

      du/dt = -Re integral_0^t H(t-t') [ v(t') (conj(v)(t) - conj(v)(t'))
                                         + u(t') ] dt'
      dv/dt = -integral_0^t H(t-t') v(t')
                 [ 1 + u(t') exp(-2i Omega (t-t')) - u(t) ] dt'

    History integrals use the trapezoid rule on the solver's own grid with
    kernel values interpolated from the table; the memory window is
    truncated at the table end, where the envelope is negligible by
    construction. Fixed-step Euler predictor with trapezoidal corrector
    (second order); the step must sample the tabulated kernel densely
    enough, otherwise the run is rejected.
    """
    init.validate(invariant_tol)
    if t_end <= 0.0 or step <= 0.0:
        raise ValueError("t_end and step must be > 0")
    h = float(step)
    n = int(round(t_end / h))
    if n < 2:
        raise SolverError("fewer than two steps requested; reduce the step")
    # The history trapezoid must resolve whatever the kernel table resolves:
    # its oscillation period and its envelope width. Allow h up to 4 table
    # steps so solver and table can share a scale.
    env = np.abs(kernel.values)
    if env[0] > 0.0:
        below = np.nonzero(env < 0.5 * env[0])[0]
        env_width = float(kernel.tau[below[0]]) if below.size else kernel.tau_max
    else:
        env_width = kernel.tau_max
    phase_scale = 1.0 / kernel.two_omega if kernel.two_omega > 0.0 else kernel.tau_max
    h_limit = max(4.0 * kernel.tau_step, 0.2 * min(env_width, phase_scale))
    if h > h_limit * (1.0 + 1e-12):
        raise SolverError(
            f"step {h:.3e} s too coarse relative to kernel grid "
            f"(limit {h_limit:.3e} s); history quadrature would undersample"
        )
    if abs(kernel.two_omega - 2.0 * omega) > 1e-9 * max(kernel.two_omega, 2.0 * omega):
        raise ValueError("kernel table was built for a different precession frequency")

    m = min(int(math.floor(kernel.tau_max / h + 1e-9)), n)
    hk = kernel.sample_lags(h, m)
    hk_ph = hk * np.exp(-2j * omega * h * np.arange(m + 1))
    # reversed copies so windows are contiguous slices ordered by history index
    k1_rev = hk[::-1].copy()
    k2_rev = hk_ph[::-1].copy()
    h0k = complex(hk[0])

    u = np.empty(n + 1, dtype=float)
    v = np.empty(n + 1, dtype=complex)
    # per-sample columns entering the memory sums: v, v*u, |v|^2, u
    cols = np.empty((n + 1, 4), dtype=complex)
    u[0] = init.r_n
    v[0] = init.rbar_plus(omega, 0.0)
    cols[0] = (v[0], v[0] * u[0], abs(v[0]) ** 2, u[0])
    fu_prev = 0.0
    fv_prev = 0.0 + 0.0j

    for i in range(1, n + 1):
        j_lo = max(0, i - m)
        length = i - j_lo  # history points j_lo .. i-1
        seg = cols[j_lo:i]
        kern1 = k1_rev[m - length:m]
        kern2 = k2_rev[m - length:m]
        ya = kern1 @ seg[:, 0]
        yb = kern2 @ seg[:, 1]
        yc = kern1 @ seg[:, 2]
        yd = kern1 @ seg[:, 3]
        # left trapezoid endpoint carries weight 1/2
        ya -= 0.5 * kern1[0] * seg[0, 0]
        yb -= 0.5 * kern2[0] * seg[0, 1]
        yc -= 0.5 * kern1[0] * seg[0, 2]
        yd -= 0.5 * kern1[0] * seg[0, 3]

        up = u[i - 1] + h * fu_prev
        vp = v[i - 1] + h * fv_prev
        half_h0 = 0.5 * h0k
        fu = fu_prev
        fv = fv_prev
        for _ in range(corrector_iters + 1):
            sa = h * (ya + half_h0 * vp)
            sb = h * (yb + half_h0 * vp * up)
            sc = h * (yc + half_h0 * (vp * vp.conjugate()).real)
            sd = h * (yd + half_h0 * up)
            fu = -(vp.conjugate() * sa - sc + sd).real
            fv = -(sa * (1.0 - up) + sb)
            up = u[i - 1] + 0.5 * h * (fu_prev + fu)
            vp = v[i - 1] + 0.5 * h * (fv_prev + fv)
        u[i] = up
        v[i] = vp
        cols[i] = (vp, vp * up, abs(vp) ** 2, up)
        fu_prev = fu
        fv_prev = fv

        purity = (1.0 - up) ** 2 + abs(vp) ** 2
        if not math.isfinite(purity) or purity > 1.0 + invariant_tol:
            raise SolverError(
                f"state invariant violated at t = {i * h:.6e} s: "
                f"r3^2 + |r+|^2 = {purity:.12f}"
            )

    times = h * np.arange(n + 1)
    r_plus = v * np.exp(2j * omega * times)
    return TrajectoryTrace(times=times, r3=1.0 - u, r_plus=r_plus,
                           regime=np.full(times.shape, "full-solver", dtype=object))


def crossing_time(
    params: DerivedParams,
    init: BlochState | None = None,
    mode: str = "exact",
    *,
    xi: float | None = None,
    root_tol: float = 1e-10,
    n_scan: int = 8192,
) -> float:
    """Stroke end: first time the mean spin projection on the work axis vanishes.

    mode="exact" finds the smallest positive root of
    cos(theta) Re r_plus(t) + sin(theta) r3(t) = 0 on the linearized
    trajectory by bracketing and bisection; mode="approx" returns the
    closed form arccos(-gamma^2) / (2 Omega), exact in the xi -> 0 limit.
    The probe-dominant initial state r_plus(0) = Delta cos(theta),
    r3(0) = Delta sin(theta) is assumed when `init` is omitted.
    """
    if mode == "approx":
        return math.acos(-params.gamma ** 2) / (2.0 * params.Omega)
    if mode != "exact":
        raise ValueError(f"unknown crossing mode {mode!r}")
    if init is None:
        init = engine_initial_state(params)
    if xi is None:
        xi = modes.decay_rate_xi(params)

    two_omega = 2.0 * params.Omega
    sin_t = params.sin_theta
    cos_t = params.cos_theta
    r_n0 = init.r_n
    rbar0 = init.rbar_plus(params.Omega, 0.0)

    def work_axis_projection(t: float) -> float:
        decay = math.exp(-xi * t)
        re_rp = (rbar0 * decay * np.exp(2j * params.Omega * t)).real
        # r3 = 1 - r_n0 exp(-xi t) without cancellation
        r3 = (1.0 - r_n0) + r_n0 * (-math.expm1(-xi * t))
        return cos_t * re_rp + sin_t * r3

    t_max = 4.0 * math.pi / params.Omega
    grid = np.linspace(0.0, t_max, n_scan)
    decay = np.exp(-xi * grid)
    re_rp = (rbar0 * decay * np.exp(2j * params.Omega * grid)).real
    vals = cos_t * re_rp + sin_t * ((1.0 - r_n0) + r_n0 * (-np.expm1(-xi * grid)))
    sign_change = np.nonzero((vals[:-1] > 0.0) & (vals[1:] <= 0.0))[0]
    if sign_change.size == 0:
        raise CrossingError(
            "no switch-off crossing in [0, 4 pi / Omega]; "
            "the stroke cannot complete for these parameters"
        )
    k = int(sign_change[0])
    return float(brentq(work_axis_projection, grid[k], grid[k + 1],
                        xtol=root_tol / two_omega, rtol=8.9e-16))
