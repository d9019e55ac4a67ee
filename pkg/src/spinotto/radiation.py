"""Radiated-field record: coherent amplitudes, energy, and distinguishability.

Starting from vacuum the field evolves into a product of coherent states
whose mode amplitudes factorize into the geometric coupling times a scalar
profile

    A(omega, t) = integral_0^t exp(-i omega (t - t')) r_minus(t') dt'.

All aggregates (radiated energy, record norm, overlap of the records left by
opposite initial spins) reduce to omega integrals weighted by the same
coupling density J(omega) used for the spin dynamics, keeping one source of
truth for the mode reduction:

    E_rad(t) = (hbar/4) integral dw  w J(w) |A(w,t)|^2
    N(t)     = (1/4)    integral dw    J(w) |A(w,t)|^2
    |<z|z'>| = exp( -(1/8) integral dw J(w) |A - A'|^2 )

The records never materialize individual modes; memory stays O(grid).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import HBAR
from .errors import RecordGridError
from .modes import SpectralDensity
from .params import DerivedParams
from .quadrature import phase_resolved_panels


def _phi1(z: np.ndarray) -> np.ndarray:
    """(exp(z) - 1)/z with the removable singularity handled."""
    z = np.asarray(z, dtype=complex)
    small = np.abs(z) < 1e-8
    safe = np.where(small, 1.0, z)
    return np.where(small, 1.0 + z / 2.0 + z * z / 6.0, (np.exp(safe) - 1.0) / safe)


@dataclass(frozen=True)
class LinearizedHistory:
    """Exponential-stage lab-frame history r_minus(t) = r0 exp(-(xi + 2i Omega) t)."""

    r_minus0: complex
    xi: float
    two_omega: float

    @classmethod
    def from_params(cls, params: DerivedParams, xi: float, sign: float = 1.0) -> "LinearizedHistory":
        """Record history for the thermal initial state; sign = -1 flips the
        initial polarization (spin initially down)."""
        return cls(r_minus0=complex(sign * params.Delta * params.cos_theta),
                   xi=xi, two_omega=2.0 * params.Omega)

    def __call__(self, t: np.ndarray | float) -> np.ndarray | complex:
        t = np.asarray(t, dtype=float)
        out = self.r_minus0 * np.exp(-(self.xi + 1j * self.two_omega) * t)
        return complex(out) if out.ndim == 0 else out

    def amplitude(self, omega: np.ndarray | float, t: float) -> np.ndarray | complex:
        """Closed-form A(omega, t) for the exponential history."""
        w = np.asarray(omega, dtype=float)
        z = (1j * (w - self.two_omega) - self.xi) * t
        out = self.r_minus0 * np.exp(-1j * w * t) * t * _phi1(z)
        return complex(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class SampledHistory:
    """History given as samples on a uniform-enough grid starting at t = 0."""

    times: np.ndarray
    values: np.ndarray

    def __call__(self, t: np.ndarray | float):
        re = np.interp(t, self.times, self.values.real)
        im = np.interp(t, self.times, self.values.imag)
        return re + 1j * im

    def amplitude(self, omega: np.ndarray | float, t: float) -> np.ndarray | complex:
        """A(omega, t) by trapezoidal quadrature over the sampled history."""
        if t < 0.0 or t > self.times[-1] * (1.0 + 1e-12):
            raise ValueError("history does not cover the requested time")
        w = np.atleast_1d(np.asarray(omega, dtype=float))
        mask = self.times <= t
        ts = self.times[mask]
        vs = self.values[mask]
        if ts.size == 0 or ts[-1] < t:
            ts = np.append(ts, t)
            vs = np.append(vs, self(t))
        phases = np.exp(-1j * np.outer(w, t - ts))
        integrand = phases * vs[None, :]
        out = np.trapezoid(integrand, ts, axis=1)
        return complex(out[0]) if np.ndim(omega) == 0 else out


def coherent_amplitude(omega, t: float, r_minus_history):
    """Scalar coherent-amplitude profile A(omega, t) for any history.

    Uses the closed form when the history carries one (linearized stage),
    numerical quadrature otherwise.
    """
    if t == 0.0:
        w = np.asarray(omega, dtype=float)
        zero = np.zeros_like(w, dtype=complex)
        return complex(0.0) if zero.ndim == 0 else zero
    return r_minus_history.amplitude(omega, t)


@dataclass(frozen=True)
class RadiationRecord:
    """Coherent record of one history on shared (omega, t) grids."""

    omega: np.ndarray
    weights: np.ndarray
    times: np.ndarray
    amplitudes: np.ndarray          # shape (n_times, n_omega)
    e_rad: np.ndarray               # J
    norm: np.ndarray                # dimensionless integral |z|^2
    sd: SpectralDensity
    two_omega: float
    history: object


def build_record(
    params: DerivedParams,
    history,
    times: np.ndarray,
    *,
    sd: SpectralDensity | None = None,
    max_phase: float = 3.0,
    order: int = 12,
) -> RadiationRecord:
    """Evaluate the record (amplitudes, energy, norm) on a time grid."""
    sd = sd or SpectralDensity.from_params(params)
    times = np.asarray(times, dtype=float)
    if times.size == 0 or times[0] < 0.0 or np.any(np.diff(times) <= 0.0):
        raise ValueError("times must be non-empty and strictly increasing from >= 0")
    two_omega = 2.0 * params.Omega
    w_hi = max(sd.support(8.0), 3.0 * two_omega)
    nodes, weights = phase_resolved_panels(0.0, w_hi, float(times[-1]),
                                           max_phase=max_phase, order=order)
    jw = sd(nodes)
    amps = np.empty((times.size, nodes.size), dtype=complex)
    for i, t in enumerate(times):
        amps[i] = coherent_amplitude(nodes, float(t), history)
    abs2 = np.abs(amps) ** 2
    e_rad = 0.25 * HBAR * abs2 @ (weights * nodes * jw)
    norm = 0.25 * abs2 @ (weights * jw)
    return RadiationRecord(omega=nodes, weights=weights, times=times,
                           amplitudes=amps, e_rad=e_rad, norm=norm,
                           sd=sd, two_omega=two_omega, history=history)


def radiated_energy(t: float, params: DerivedParams, record: RadiationRecord) -> float:
    """Field energy invested in the record at time t (J)."""
    a = coherent_amplitude(record.omega, t, record.history)
    return float(0.25 * HBAR * (np.abs(a) ** 2) @ (record.weights * record.omega
                                                   * record.sd(record.omega)))


def record_norm(t: float, params: DerivedParams, record: RadiationRecord) -> float:
    """Total coherent occupation integral |z|^2 at time t."""
    a = coherent_amplitude(record.omega, t, record.history)
    return float(0.25 * (np.abs(a) ** 2) @ (record.weights * record.sd(record.omega)))


def record_overlap(record_up: RadiationRecord, record_down: RadiationRecord) -> np.ndarray:
    """Fidelity |<z_up|z_down>| of the two records at each shared time.

    1 means the records are indistinguishable. The distinguishability
    metric is the standard coherent-state overlap; it is a reporting
    choice, not something the dynamics feeds back on.
    """
    if not (np.array_equal(record_up.omega, record_down.omega)
            and np.array_equal(record_up.times, record_down.times)):
        raise RecordGridError("records must share omega and time grids")
    jw = record_up.sd(record_up.omega)
    diff2 = np.abs(record_up.amplitudes - record_down.amplitudes) ** 2
    exponent = 0.125 * diff2 @ (record_up.weights * jw)
    return np.exp(-exponent)


def omega_eff(t: float, params: DerivedParams, record: RadiationRecord) -> complex:
    """Back-reaction frequency diagnostic -(i/2) integral dw J(w) conj(A).

    Reported only; its effect on the spin is already contained in the
    memory kernel.
    """
    a = coherent_amplitude(record.omega, t, record.history)
    jw = record.sd(record.omega)
    return complex(-0.5j * np.sum(record.weights * jw * np.conjugate(a)))
