"""Measurement-engine cycle: work extraction, switch-off cost, efficiency,
and parameter sweeps.

One cycle: extract work raising the z field (W1), switch on the probe field
(free, the initial state has no projection cost), let the spin precess and
radiate until its mean projection on the work axis vanishes at t_c, pay
E_off to switch the probe off, exchange W2 lowering the work field, release
heat Q re-thermalizing. Only the bare spin energy enters the books; the
radiated energy is reported alongside but not inserted into the efficiency.

The cycle metrics use the linearized trajectory (consistent with the t_c
closed form); a separate validation helper recomputes the state at t_c with
the full memory solver and reports the difference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from . import dynamics, modes, radiation
from .constants import HBAR
from .errors import ConfigError, NumericsError, QuadratureError
from .params import DerivedParams, EngineConfig, derive_params, sweep_point_config

SWEEP_COLUMNS = ("lambda", "gamma", "xi_per_s", "t_c_s", "xi_tc",
                 "eta_c", "W_dim", "P_dim", "status")


@dataclass(frozen=True)
class CycleMetrics:
    """Energy bookkeeping of one cycle. There is deliberately no probe
    switch-on term: turning the probe on costs nothing for the initial
    state."""

    W1: float                     # work from raising the field, J
    W2: float                     # work exchanged lowering the field, J
    E_off: float                  # cost of switching the probe off, J
    Q: float                      # heat released re-thermalizing, J
    W: float                      # W1 + W2, J
    eta: float | None             # W / E_off, None if E_off <= 0
    eta_c: float                  # closed-form efficiency at the crossing
    t_c: float                    # stroke time, s
    xi_tc: float                  # decay rate times stroke time
    W_dim: float                  # W / (mu B1)
    P_dim: float                  # W hbar / (t_c (mu B1)^2)
    Delta0_at_tc: float           # residual work-axis projection at t_c
    E_rad_at_tc: float | None     # radiated energy at t_c, J


def efficiency_c(xi: float, t_c: float, delta: float, theta: float, lam: float) -> float:
    """Crossing efficiency (1 - lambda) (1 - r_n0) / (1 - r_n0 exp(-xi t_c)).

    r_n0 = 1 - Delta sin(theta). Evaluated through expm1 so the deficit
    below the ideal 1 - lambda stays resolvable even when xi t_c is many
    orders below 1. xi = 0 recovers 1 - lambda exactly.
    """
    x = xi * t_c
    if x < 0.0:
        raise ValueError("xi * t_c must be >= 0")
    one_minus_lam = 1.0 - lam
    if x == 0.0:
        return one_minus_lam
    d = delta * math.sin(theta)        # = 1 - r_n0 = r3(0)
    if not 0.0 <= d <= 1.0:
        raise ValueError("Delta sin(theta) must lie in [0, 1]")
    if d == 0.0:
        return 0.0
    growth = -math.expm1(-x)           # 1 - exp(-x), exact for tiny x
    return one_minus_lam * d / (d + (1.0 - d) * growth)


def run_cycle(
    config: EngineConfig,
    crossing_mode: str = "exact",
    *,
    coupling: str = "on",
    with_radiation: bool = True,
    allow_degenerate: bool = False,
) -> CycleMetrics:
    """Evaluate one full cycle for the given configuration.

    coupling="off" zeroes the field coupling (xi = 0); this is the limiting
    check that recovers the ideal Otto efficiency. The up-dominant thermal
    initial state along z is assumed throughout.
    """
    if coupling not in ("on", "off"):
        raise ValueError("coupling must be 'on' or 'off'")
    p = derive_params(config, allow_degenerate=allow_degenerate)
    sd = modes.SpectralDensity.from_params(p)
    if coupling == "off":
        sd = sd.scaled(0.0)
    xi = modes.decay_rate_xi(p, sd)
    t_c = dynamics.crossing_time(p, mode=crossing_mode, xi=xi,
                                 root_tol=config.numerics.root_tol)
    return _metrics_at(p, sd, xi, t_c, with_radiation=with_radiation)


def _metrics_at(
    p: DerivedParams,
    sd: modes.SpectralDensity,
    xi: float,
    t_c: float,
    *,
    with_radiation: bool,
) -> CycleMetrics:
    sin_t = p.sin_theta
    cos_t = p.cos_theta
    decay = math.exp(-xi * t_c)
    d0 = p.Delta * sin_t
    # r3(t) = 1 - (1 - d0) exp(-xi t), evaluated without cancellation when
    # d0 is many orders below 1
    r3_tc = d0 + (1.0 - d0) * (-math.expm1(-xi * t_c))
    re_rp_tc = p.Delta * cos_t * decay * math.cos(2.0 * p.Omega * t_c)
    delta0 = cos_t * re_rp_tc + sin_t * r3_tc

    w1 = p.Delta * HBAR * (p.Omega1 - p.Omega0)
    e_off = HBAR * cos_t * (p.Omega2 * r3_tc - p.Omega1 * re_rp_tc)
    w2 = -HBAR * (p.Omega1 - p.Omega0) * delta0
    q = HBAR * p.Omega0 * (p.Delta - delta0)
    w = w1 + w2
    eta = w / e_off if e_off > 0.0 else None
    eta_c = efficiency_c(xi, t_c, p.Delta, p.theta, p.lam)
    mu_b1 = HBAR * p.Omega1
    e_rad = None
    if with_radiation:
        # The record integral resolves phases up to (support of J) * t_c.
        # In the weak-probe regime that product is astronomically large and
        # the diagnostic is reported as undefined instead of mis-quadratured.
        try:
            history = radiation.LinearizedHistory.from_params(p, xi)
            record = radiation.build_record(p, history, np.array([t_c]), sd=sd)
            e_rad = float(record.e_rad[0])
        except QuadratureError:
            e_rad = None
    return CycleMetrics(
        W1=w1, W2=w2, E_off=e_off, Q=q, W=w, eta=eta, eta_c=eta_c,
        t_c=t_c, xi_tc=xi * t_c,
        W_dim=w / mu_b1,
        P_dim=w * HBAR / (t_c * mu_b1 ** 2),
        Delta0_at_tc=delta0,
        E_rad_at_tc=e_rad,
    )


def full_solver_check(
    config: EngineConfig,
    crossing_mode: str = "exact",
    *,
    steps: int = 4000,
) -> dict:
    """Recompute the state at t_c with the memory solver and report the
    difference against the linearized values used by the cycle metrics."""
    p = derive_params(config)
    sd = modes.SpectralDensity.from_params(p)
    xi = modes.decay_rate_xi(p, sd)
    t_c = dynamics.crossing_time(p, mode=crossing_mode, xi=xi,
                                 root_tol=config.numerics.root_tol)
    h = t_c / steps
    table_step = h / 2.0
    tau_max = min(t_c, 120.0 * sd.cutoff_time)
    n_table = min(max(int(math.ceil(tau_max / table_step)) + 1, 16), 200001)
    kernel = modes.memory_kernel(tau_max, n_table, p, sd)
    init = dynamics.engine_initial_state(p)
    trace = dynamics.evolve_full(init, kernel, p.Omega, t_c, h)
    lin = dynamics.evolve_linearized(init, xi, p.Omega, t_c)
    r3_full = float(trace.r3[-1])
    rp_full = complex(trace.r_plus[-1])
    return {
        "t_c_s": t_c,
        "r3_full": r3_full,
        "r3_linearized": lin.r3,
        "r3_abs_diff": abs(r3_full - lin.r3),
        "re_r_plus_full": rp_full.real,
        "re_r_plus_linearized": lin.r_plus.real,
        "r_plus_abs_diff": abs(rp_full - lin.r_plus),
    }


@dataclass(frozen=True)
class SweepRow:
    lam: float
    gamma: float
    xi: float
    t_c: float
    xi_tc: float
    eta_c: float
    w_dim: float
    p_dim: float
    status: str


@dataclass(frozen=True)
class SweepTable:
    """Cycle metrics over a (lambda, gamma) grid in lambda-major order."""

    lambda_values: np.ndarray
    gamma_values: np.ndarray
    rows: tuple[SweepRow, ...]

    def column(self, name: str) -> np.ndarray:
        attr = {"lambda": "lam", "xi_per_s": "xi", "t_c_s": "t_c",
                "W_dim": "w_dim", "P_dim": "p_dim"}.get(name, name)
        return np.array([getattr(r, attr) for r in self.rows])


def _sweep_point(config: EngineConfig, lam: float, gamma: float,
                 crossing_mode: str, coupling: str) -> SweepRow:
    nan = float("nan")
    try:
        point = sweep_point_config(config, lam, gamma)
        metrics = run_cycle(point, crossing_mode, coupling=coupling,
                            with_radiation=False)
    except ConfigError:
        return SweepRow(lam, gamma, nan, nan, nan, nan, nan, nan, "config-error")
    except NumericsError as exc:
        tag = "no-crossing" if "crossing" in str(exc) else "numerics-error"
        return SweepRow(lam, gamma, nan, nan, nan, nan, nan, nan, tag)
    xi = metrics.xi_tc / metrics.t_c if metrics.t_c > 0.0 else 0.0
    return SweepRow(lam, gamma, xi, metrics.t_c, metrics.xi_tc,
                    metrics.eta_c, metrics.W_dim, metrics.P_dim, "ok")


def sweep(
    config: EngineConfig,
    lambda_grid: Iterable[float],
    gamma_grid: Iterable[float],
    *,
    crossing_mode: str = "exact",
    coupling: str = "on",
    threads: int = 1,
) -> SweepTable:
    """Run the cycle over a grid: B1 fixed, B0 = lambda B1, B2 = B1/gamma.

    Per-point failures land in the row's status column and never abort the
    sweep. Row order is deterministic (lambda-major) regardless of how the
    points are executed.
    """
    lam_values = np.asarray(list(lambda_grid), dtype=float)
    gam_values = np.asarray(list(gamma_grid), dtype=float)
    if np.any(lam_values <= 0.0) or np.any(lam_values > 1.0):
        raise ConfigError("lambda grid must lie in (0, 1]")
    if np.any(gam_values <= 0.0) or np.any(gam_values > 1.0):
        raise ConfigError("gamma grid must lie in (0, 1]")
    points = [(lam, gam) for lam in lam_values for gam in gam_values]

    def compute(point):
        lam, gam = point
        return _sweep_point(config, float(lam), float(gam), crossing_mode, coupling)

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = tuple(pool.map(compute, points))
    else:
        rows = tuple(map(compute, points))
    return SweepTable(lambda_values=lam_values, gamma_values=gam_values, rows=rows)
