"""Thermal Otto cycle reference values.

The ideal spin Otto cycle with instantaneous adiabatic strokes: work and
heats are set by the field ratio and the thermal polarization alone, and the
efficiency reduces to 1 - lambda. These numbers are the baseline the
measurement engine is compared against.
"""

from __future__ import annotations

from dataclasses import dataclass

from .constants import HBAR
from .params import DerivedParams


@dataclass(frozen=True)
class OttoMetrics:
    W01: float               # work extracted raising the field, J
    Q12: float               # heat absorbed equilibrating to the hot stage, J
    Q30: float               # heat released re-thermalizing, J
    eta_O: float | None      # W01/Q12, None when the cycle moves no energy
    meanE0: float            # initial mean spin energy, J
    meanE1: float            # mean energy after the work stroke, J


def otto_cycle(params: DerivedParams) -> OttoMetrics:
    """Ideal-cycle energy bookkeeping for the given derived parameters.

    When Delta = 0 (unpolarized start) all flows vanish and the efficiency
    is reported as None rather than NaN.
    """
    delta = params.Delta
    w01 = HBAR * (params.Omega1 - params.Omega0) * delta
    q12 = HBAR * params.Omega1 * delta
    q30 = HBAR * params.Omega0 * delta
    eta = w01 / q12 if q12 != 0.0 else None
    return OttoMetrics(
        W01=w01,
        Q12=q12,
        Q30=q30,
        eta_O=eta,
        meanE0=-HBAR * params.Omega0 * delta,
        meanE1=-HBAR * params.Omega1 * delta,
    )
