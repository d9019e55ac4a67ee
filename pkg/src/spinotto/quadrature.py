"""Composite Gauss-Legendre rules for oscillatory spectral integrals.

The mode-density integrands are smooth with a Gaussian cutoff, but they are
multiplied by phases exp(i*omega*t). Panel widths are therefore chosen so
that the phase advance per panel stays below a few radians, which keeps a
fixed-order Gauss rule at machine accuracy.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import QuadratureError


def gauss_panels(a: float, b: float, n_panels: int, order: int = 12):
    """Nodes and weights of a composite Gauss-Legendre rule on [a, b]."""
    if b <= a:
        raise ValueError(f"empty interval [{a}, {b}]")
    if n_panels < 1:
        raise ValueError("n_panels must be >= 1")
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, n_panels + 1)
    lo = edges[:-1][:, None]
    hi = edges[1:][:, None]
    nodes = (0.5 * (hi - lo) * x[None, :] + 0.5 * (hi + lo)).ravel()
    weights = (0.5 * (hi - lo) * w[None, :] * np.ones_like(lo)).ravel()
    return nodes, weights


def phase_resolved_panels(
    a: float,
    b: float,
    phase_rate: float,
    *,
    max_phase: float = 3.0,
    min_panels: int = 8,
    max_panels: int = 60000,
    order: int = 12,
):
    """Composite rule on [a, b] resolving a phase exp(i*phase_rate*omega).

    phase_rate is the largest |t| the nodes will be used with; the panel
    width is capped at max_phase / phase_rate radians of phase advance.
    """
    span = b - a
    n = min_panels
    if phase_rate > 0.0 and span > 0.0:
        n = max(n, math.ceil(span * phase_rate / max_phase))
    if n > max_panels:
        raise QuadratureError(
            f"phase-resolved rule needs {n} panels (> {max_panels}); "
            "reduce the time span or the frequency window"
        )
    return gauss_panels(a, b, n, order=order)
