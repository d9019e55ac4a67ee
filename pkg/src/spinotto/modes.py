"""Vacuum-mode reduction: spectral density, decay rate, and memory kernel.

The spin couples to the transverse magnetic vacuum through a mode amplitude
proportional to F(k) (k x eps_alpha) / sqrt(2k) projected on the plane
perpendicular to the total-field axis. Summing the two polarizations,
sum_a (k x eps_a)_i (k x eps_a)_j = k^2 (delta_ij - khat_i khat_j), and
projecting off the axis gives k^2 (1 + (khat . nhat)^2), whose solid-angle
integral is 16*pi/3. Collapsing the radial integral on shell leaves a single
scalar coupling density

    J(omega) = mu^2 omega^3 exp(-(omega sigma / c)^2) / (3 pi^2 hbar eps0 c^5)

with units 1/s^2 per rad/s. Everything the field does to the spin enters
through J: the flip-transition decay rate xi = pi J(2 Omega), the
principal-value frequency shift, and the complex memory kernel

    H(tau) = integral dw J(w) exp(-i (2 Omega - w) tau).

A deliberately brute-force evaluation of the 3-D mode integral (explicit
polarization vectors, explicit plane projection, numerical angular
quadrature) is retained as the oracle that pins the closed form and its
normalization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.integrate import quad

from .constants import C_LIGHT, EPS0, HBAR
from .errors import PoleIterationError, QuadratureError
from .params import DerivedParams
from .quadrature import gauss_panels, phase_resolved_panels

__all__ = [
    "SpectralDensity",
    "PoleData",
    "KernelTable",
    "structure_function",
    "spectral_density",
    "mode_integral_bruteforce",
    "decay_rate_xi",
    "decay_rate_xi_regularized",
    "frequency_shift_phi",
    "laplace_pole",
    "memory_kernel",
    "kernel_value",
]


def structure_function(k: float | np.ndarray, sigma: float) -> float | np.ndarray:
    """Gaussian form factor exp(-k^2 sigma^2 / 2) from the trapped-particle spread."""
    if sigma <= 0.0:
        raise ValueError("sigma must be > 0")
    k = np.asarray(k, dtype=float)
    if np.any(k < 0.0):
        raise ValueError("wavenumber must be >= 0")
    out = np.exp(-0.5 * (k * sigma) ** 2)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class SpectralDensity:
    """Closed-form polarization-summed coupling density J(omega).

    prefactor has units s^2 (so that prefactor * omega^3 is 1/s^2 per rad/s)
    and cutoff_time = sigma/c is the Gaussian cutoff timescale.
    """

    prefactor: float
    cutoff_time: float

    @classmethod
    def from_params(cls, p: DerivedParams) -> "SpectralDensity":
        pref = p.mu ** 2 / (3.0 * math.pi ** 2 * HBAR * EPS0 * C_LIGHT ** 5)
        return cls(prefactor=pref, cutoff_time=p.sigma / C_LIGHT)

    def scaled(self, factor: float) -> "SpectralDensity":
        """Coupling rescaled by `factor` (factor = 0 switches the field off)."""
        return replace(self, prefactor=self.prefactor * factor)

    def __call__(self, omega: float | np.ndarray) -> float | np.ndarray:
        w = np.asarray(omega, dtype=float)
        out = self.prefactor * w ** 3 * np.exp(-((w * self.cutoff_time) ** 2))
        out = np.where(w >= 0.0, out, 0.0)
        return float(out) if out.ndim == 0 else out

    def support(self, tail: float = 8.0) -> float:
        """Frequency beyond which J is suppressed below exp(-tail^2) of scale."""
        return tail / self.cutoff_time

    def total(self) -> float:
        """Closed form of integral J dw (the kernel value at tau = 0)."""
        return self.prefactor / (2.0 * self.cutoff_time ** 4)

    def first_moment(self) -> float:
        """Closed form of integral w J(w) dw."""
        return self.prefactor * (3.0 * math.sqrt(math.pi) / 8.0) / self.cutoff_time ** 5


def spectral_density(omega: float | np.ndarray, params: DerivedParams) -> float | np.ndarray:
    """J(omega) for the given engine parameters."""
    return SpectralDensity.from_params(params)(omega)


def mode_integral_bruteforce(
    omega: float,
    params: DerivedParams,
    n_polar: int = 24,
    n_azimuth: int = 48,
) -> float:
    """Direct shell evaluation of the 3-D mode integral defining J(omega).

    Builds explicit polarization vectors for each propagation direction,
    forms k x eps_a, projects it on the plane perpendicular to the
    total-field axis nhat, and integrates |projection|^2 over the sphere
    numerically. Kept independent of the closed form on purpose.
    """
    if omega < 0.0:
        raise ValueError("omega must be >= 0")
    if omega == 0.0:
        return 0.0
    k = omega / C_LIGHT
    theta = params.theta
    nhat = np.array([math.cos(theta), 0.0, math.sin(theta)])
    e1 = np.array([-math.sin(theta), 0.0, math.cos(theta)])   # in-plane axis 1
    e2 = np.array([0.0, 1.0, 0.0])                            # in-plane axis 2

    ct, wt = np.polynomial.legendre.leggauss(n_polar)
    st = np.sqrt(1.0 - ct ** 2)
    phi = 2.0 * math.pi * np.arange(n_azimuth) / n_azimuth
    wphi = 2.0 * math.pi / n_azimuth

    angular = 0.0
    for cth, sth, w in zip(ct, st, wt):
        khat = np.stack([sth * np.cos(phi), sth * np.sin(phi),
                         np.full_like(phi, cth)], axis=-1)
        # orthonormal transverse pair for each khat
        pol1 = np.stack([cth * np.cos(phi), cth * np.sin(phi),
                         np.full_like(phi, -sth)], axis=-1)
        pol2 = np.stack([-np.sin(phi), np.cos(phi), np.zeros_like(phi)], axis=-1)
        total = np.zeros_like(phi)
        for pol in (pol1, pol2):
            cross = np.cross(k * khat, pol)
            total += (cross @ e1) ** 2 + (cross @ e2) ** 2
        angular += w * wphi * float(total.sum())
    # checked orthonormality once per call keeps the oracle honest
    assert abs(nhat @ e1) < 1e-12 and abs(nhat @ e2) < 1e-12

    form = structure_function(k, params.sigma) ** 2
    shell = k ** 2 / C_LIGHT                      # k^2 dk/domega on shell
    coupling = params.mu ** 2 * (HBAR / (EPS0 * C_LIGHT)) * form / (2.0 * k)
    return shell * coupling * angular / ((2.0 * math.pi) ** 3) / HBAR ** 2


@dataclass(frozen=True)
class PoleData:
    """Approximate Laplace pole of the flip amplitude: s = -xi + i*phi."""

    xi: float
    phi: float
    converged: bool
    iterations: int
    phi_rel_change: float
    xi_quad_rel_err: float


def decay_rate_xi(params: DerivedParams, sd: SpectralDensity | None = None) -> float:
    """Decay rate xi = pi * J(2 Omega) via exact on-shell substitution."""
    sd = sd or SpectralDensity.from_params(params)
    xi = math.pi * float(sd(2.0 * params.Omega))
    assert xi >= 0.0
    return xi


def decay_rate_xi_regularized(
    params: DerivedParams,
    sd: SpectralDensity | None = None,
    rel_tol: float = 1e-8,
    max_halvings: int = 14,
) -> tuple[float, float, int]:
    """Oracle for the decay rate: Gaussian-regularized on-shell delta.

    The delta in pi * integral J(w) delta(w - 2 Omega) dw is replaced by a
    normalized Gaussian whose width is halved until the value is stable.
    Returns (value, last relative change, halvings used); raises
    QuadratureError if the sequence does not settle.
    """
    sd = sd or SpectralDensity.from_params(params)
    w0 = 2.0 * params.Omega
    # local log-slope and curvature of J set the safe starting width
    tc = sd.cutoff_time
    slope = abs(3.0 / w0 - 2.0 * tc ** 2 * w0)
    curv = 3.0 / w0 ** 2 + 2.0 * tc ** 2
    eps = 0.2 / max(slope, math.sqrt(curv), 1.0 / w0)

    def smeared(width: float) -> float:
        norm = 1.0 / (width * math.sqrt(2.0 * math.pi))

        def integrand(w):
            return sd(w) * norm * math.exp(-0.5 * ((w - w0) / width) ** 2)

        lo = max(0.0, w0 - 12.0 * width)
        hi = w0 + 12.0 * width
        val, _ = quad(integrand, lo, hi,
                      points=[w0 - width, w0, w0 + width],
                      limit=200, epsabs=0.0, epsrel=1e-12)
        return val

    prev = smeared(eps)
    for halving in range(1, max_halvings + 1):
        eps *= 0.5
        cur = smeared(eps)
        denom = max(abs(cur), abs(prev))
        change = abs(cur - prev) / denom if denom > 0.0 else 0.0
        if change <= rel_tol:
            return math.pi * cur, change, halving
        prev = cur
    raise QuadratureError(
        f"regularized decay-rate quadrature did not stabilize to {rel_tol}"
    )


def _pv_integral(sd: SpectralDensity, w0: float, n_panels: int, order: int = 16) -> float:
    """P.V. integral of J(w)/(w - w0) dw over w >= 0.

    Symmetric-interval subtraction around the singularity: on [0, 2*w0] the
    constant J(w0)/(w - w0) integrates to zero by symmetry, so only the
    smooth difference quotient is quadratured there; the rest is regular.
    """
    if w0 <= 0.0:
        raise ValueError("singularity must be at positive frequency")
    j0 = float(sd(w0))
    nodes, weights = gauss_panels(0.0, 2.0 * w0, n_panels, order=order)
    diff = (sd(nodes) - j0) / (nodes - w0)
    val = float(weights @ diff)
    hi = max(sd.support(8.0), 4.0 * w0)
    if hi > 2.0 * w0:
        nodes2, weights2 = gauss_panels(2.0 * w0, hi, n_panels, order=order)
        val += float(weights2 @ (sd(nodes2) / (nodes2 - w0)))
    return val


def frequency_shift_phi(
    params: DerivedParams,
    sd: SpectralDensity | None = None,
    rel_tol: float = 1e-10,
    max_iter: int = 60,
    n_panels: int = 200,
) -> PoleData:
    """Self-consistent principal-value frequency shift of the pole.

    Fixed-point iteration phi <- P.V. integral J(w)/(w - 2 Omega - phi) dw,
    started at phi = 0. The shift is a reported diagnostic only; it is not
    fed back into the dynamics. Non-convergence raises.
    """
    sd = sd or SpectralDensity.from_params(params)
    two_omega = 2.0 * params.Omega
    xi = decay_rate_xi(params, sd)
    if sd.prefactor == 0.0:
        return PoleData(xi=0.0, phi=0.0, converged=True, iterations=0,
                        phi_rel_change=0.0, xi_quad_rel_err=0.0)
    phi = 0.0
    change = math.inf
    for it in range(1, max_iter + 1):
        w0 = two_omega + phi
        if w0 <= 0.0:
            raise PoleIterationError(
                f"pole iteration left the physical domain (2*Omega + phi = {w0})"
            )
        new = _pv_integral(sd, w0, n_panels)
        scale = max(abs(new), abs(phi), xi, 1e-300)
        change = abs(new - phi) / scale
        phi = new
        if change <= rel_tol:
            # step-halving self-check on the quadrature
            fine = _pv_integral(sd, two_omega + phi, 2 * n_panels)
            quad_err = abs(fine - phi) / max(abs(phi), 1e-300)
            return PoleData(xi=xi, phi=phi, converged=True, iterations=it,
                            phi_rel_change=change, xi_quad_rel_err=quad_err)
    raise PoleIterationError(
        f"frequency-shift fixed point did not converge in {max_iter} iterations "
        f"(last relative change {change:.3e})"
    )


def laplace_pole(params: DerivedParams, sd: SpectralDensity | None = None) -> PoleData:
    """Decay rate and frequency shift bundled with their diagnostics."""
    return frequency_shift_phi(params, sd)


@dataclass(frozen=True)
class KernelTable:
    """Sampled memory kernel H on a uniform lag grid, plus Taylor data.

    h0 = H(0) = integral J dw is real and positive; h1 = H'(0). Immutable
    once built; linear interpolation answers solver queries.
    """

    tau: np.ndarray
    values: np.ndarray
    h0: float
    h1: complex
    two_omega: float

    @property
    def tau_step(self) -> float:
        return float(self.tau[1] - self.tau[0])

    @property
    def tau_max(self) -> float:
        return float(self.tau[-1])

    def interp(self, tau: np.ndarray) -> np.ndarray:
        tau = np.asarray(tau, dtype=float)
        if np.any(tau < -1e-300) or np.any(tau > self.tau_max * (1.0 + 1e-12)):
            raise ValueError("kernel interpolation outside the tabulated range")
        re = np.interp(tau, self.tau, self.values.real)
        im = np.interp(tau, self.tau, self.values.imag)
        return re + 1j * im

    def sample_lags(self, step: float, m: int) -> np.ndarray:
        """Kernel at lags step*(0..m) for the history quadrature."""
        return self.interp(step * np.arange(m + 1))


def _kernel_envelope(sd: SpectralDensity, tau: np.ndarray, max_phase: float = 3.0,
                     order: int = 12) -> np.ndarray:
    """integral J(w) exp(i w tau) dw on an arbitrary tau grid, panel rule."""
    hi = sd.support(8.0)
    t_max = float(np.max(np.abs(tau))) if tau.size else 0.0
    nodes, weights = phase_resolved_panels(0.0, hi, t_max, max_phase=max_phase,
                                           order=order)
    jw = weights * sd(nodes)
    out = np.empty(tau.shape, dtype=complex)
    chunk = max(1, int(2_000_000 // max(nodes.size, 1)))
    for start in range(0, tau.size, chunk):
        seg = tau[start:start + chunk]
        out[start:start + chunk] = jw @ np.exp(1j * np.outer(nodes, seg))
    return out


def memory_kernel(
    tau_max: float,
    n: int,
    params: DerivedParams,
    sd: SpectralDensity | None = None,
) -> KernelTable:
    """Tabulate H(tau) = integral J(w) exp(-i (2 Omega - w) tau) dw.

    Uniform grid of n points on [0, tau_max]. For envelope resolution keep
    the step below (sigma/c)/20 and below 1/(2 Omega)/20; the table is what
    the solver interpolates, so build it at least as fine as the solver
    step.
    """
    if tau_max <= 0.0:
        raise ValueError("tau_max must be > 0")
    if n < 2:
        raise ValueError("need at least 2 kernel samples")
    sd = sd or SpectralDensity.from_params(params)
    tau = np.linspace(0.0, tau_max, n)
    envelope = _kernel_envelope(sd, tau)
    two_omega = 2.0 * params.Omega
    values = np.exp(-1j * two_omega * tau) * envelope

    hi = sd.support(8.0)
    h0, h0_err = quad(lambda w: sd(w), 0.0, hi, limit=200)
    if h0 <= 0.0 and sd.prefactor > 0.0:
        raise QuadratureError("kernel normalization integral came out non-positive")
    if sd.prefactor > 0.0 and h0_err > 1e-8 * h0:
        raise QuadratureError("kernel normalization integral did not converge")
    m1, _ = quad(lambda w: w * sd(w), 0.0, hi, limit=200)
    h1 = 1j * (m1 - two_omega * h0)
    return KernelTable(tau=tau, values=values, h0=h0, h1=h1, two_omega=two_omega)


def kernel_value(
    tau: float,
    params: DerivedParams,
    sd: SpectralDensity | None = None,
) -> complex:
    """Single-point kernel evaluation by adaptive oscillatory quadrature.

    Independent of the table construction; handles negative lags through
    H(-tau) = conj(H(tau)).
    """
    sd = sd or SpectralDensity.from_params(params)
    if tau < 0.0:
        return complex(kernel_value(-tau, params, sd)).conjugate()
    hi = sd.support(8.0)
    if tau == 0.0:
        re, _ = quad(lambda w: sd(w), 0.0, hi, limit=200)
        im = 0.0
    else:
        re, _ = quad(lambda w: sd(w), 0.0, hi, weight="cos", wvar=tau, limit=400)
        im, _ = quad(lambda w: sd(w), 0.0, hi, weight="sin", wvar=tau, limit=400)
    return complex(np.exp(-1j * 2.0 * params.Omega * tau) * (re + 1j * im))
