"""Acceptance suite: one test per release criterion, one printed verdict each.

Criteria 1-4 and 6-9 run at the reported parameter set (criterion 4 and 7 on
the probe-dominant grid where the radiation correction is visible above
double-precision resolution). Criterion 5 exercises the regime chain at desk
scale: the engineered configuration preserves the dimensionless regime
(2 Omega sigma/c ~ 1, xi/Omega = 2e-3) while making 1/xi reachable by the
memory solver; at the literal reported scales the decay over any feasible
window sits ~19 orders below unity and therefore below double resolution.
"""

import math
import time

import numpy as np
import pytest

from spinotto.constants import C_LIGHT, HBAR
from spinotto.cycle import run_cycle, sweep
from spinotto.dynamics import (
    crossing_time,
    engine_initial_state,
    evolve_full,
    matching_point,
)
from spinotto.modes import (
    SpectralDensity,
    decay_rate_xi,
    decay_rate_xi_regularized,
    memory_kernel,
    mode_integral_bruteforce,
)
from spinotto.otto import otto_cycle
from spinotto.params import derive_params, load_config, sweep_point_config
from spinotto.radiation import LinearizedHistory, build_record, record_overlap
from spinotto.cli import main as cli_main

from conftest import B2_PEAK_TESLA, engineered_config


def verdict(name: str, ok: bool, detail: str) -> None:
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, f"{name}: {detail}"


def test_criterion_1_otto_baseline(rng):
    t0 = time.monotonic()
    from test_otto import random_configs

    worst_eta = 0.0
    worst_closure = 0.0
    checked = 0
    for cfg in random_configs(rng, 100):
        p = derive_params(cfg)
        m = otto_cycle(p)
        if m.eta_O is None:
            continue
        checked += 1
        worst_eta = max(worst_eta, abs(m.eta_O - (1.0 - p.lam)))
        worst_closure = max(worst_closure,
                            abs(m.W01 - (m.Q12 - m.Q30)) / max(abs(m.Q12), 1e-300))
    elapsed = time.monotonic() - t0
    ok = worst_eta <= 1e-15 and worst_closure <= 1e-15 and elapsed < 1.0 and checked >= 90
    verdict("criterion 1 (thermal-cycle identities)", ok,
            f"max |eta_O-(1-lambda)| = {worst_eta:.2e}, "
            f"max first-law residual = {worst_closure:.2e}, {elapsed:.2f} s")


def test_criterion_2_spectral_reduction_oracle(paper_peak_params):
    t0 = time.monotonic()
    sd = SpectralDensity.from_params(paper_peak_params)
    worst = 0.0
    for frac in np.linspace(0.05, 4.0, 20):
        w = frac / sd.cutoff_time
        closed = sd(w)
        brute = mode_integral_bruteforce(w, paper_peak_params)
        worst = max(worst, abs(closed - brute) / abs(brute))
    elapsed = time.monotonic() - t0
    ok = worst <= 1e-4 and elapsed < 60.0
    verdict("criterion 2 (closed form vs 3-D mode integral)", ok,
            f"max rel diff = {worst:.2e} over 20 frequencies, {elapsed:.1f} s")


def test_criterion_3_decay_rate_oracle(default_config):
    t0 = time.monotonic()
    worst = 0.0
    gammas = np.geomspace(3e-11, 3e-5, 13)   # six decades
    for g in gammas:
        p = derive_params(sweep_point_config(default_config, 0.5, float(g)))
        sd = SpectralDensity.from_params(p)
        xi = decay_rate_xi(p, sd)
        xi_reg, _, _ = decay_rate_xi_regularized(p, sd)
        worst = max(worst, abs(xi_reg - xi) / xi)
    elapsed = time.monotonic() - t0
    ok = worst <= 1e-6 and elapsed < 60.0
    verdict("criterion 3 (on-shell vs regularized-delta decay rate)", ok,
            f"max rel diff = {worst:.2e} over {gammas.size} gammas "
            f"spanning 6 decades, {elapsed:.1f} s")


@pytest.fixture(scope="module")
def figure_sweep(default_config):
    lam_grid = np.linspace(0.02, 0.98, 50)
    gam_grid = np.geomspace(1e-10, 1e-8, 50)
    t0 = time.monotonic()
    table = sweep(default_config, lam_grid, gam_grid, crossing_mode="exact")
    return table, lam_grid, gam_grid, time.monotonic() - t0


def test_criterion_4_limit_recovery(paper_peak_config, figure_sweep):
    metrics_off = run_cycle(paper_peak_config, "exact", coupling="off",
                            with_radiation=False)
    p = derive_params(paper_peak_config)
    exact_off = metrics_off.eta_c == 1.0 - p.lam

    table, _, _, _ = figure_sweep
    rows = [r for r in table.rows if r.status == "ok"]
    with_decay = [r for r in rows if r.xi_tc > 0.0]
    strict = all(r.eta_c < 1.0 - r.lam for r in with_decay)
    ok = exact_off and strict and len(with_decay) == len(rows) == 2500
    verdict("criterion 4 (ideal-limit recovery and strict deficit)", ok,
            f"coupling off: eta_c == 1-lambda exactly ({exact_off}); "
            f"strict eta_c < 1-lambda on {len(with_decay)}/2500 rows ({strict})")


def test_criterion_5_regime_matching():
    t0 = time.monotonic()
    config = engineered_config()     # 2 Omega sigma/c = 1, xi/Omega = 2e-3
    p = derive_params(config)
    sd = SpectralDensity.from_params(p)
    xi = decay_rate_xi(p, sd)
    h0 = sd.total()
    t_star = xi / h0
    init = engine_initial_state(p)

    # (a) Gaussian stage vs full solver on -ln(r_n / r_n0), t <= t*/10
    t_end_a = t_star / 8.0
    kernel_a = memory_kernel(t_end_a * 1.0001, 20001, p, sd)
    trace_a = evolve_full(init, kernel_a, p.Omega, t_end_a, t_end_a / 4000.0)
    mask = (trace_a.times >= t_star / 500.0) & (trace_a.times <= t_star / 10.0)
    f_solver = -np.log(trace_a.r_n[mask] / init.r_n)
    f_gauss = 0.5 * kernel_a.h0 * trace_a.times[mask] ** 2
    gauss_err = float(np.max(np.abs(f_solver - f_gauss) / f_gauss))

    # (b) exponential stage vs full solver on r_n over [5 t*, 3/xi]
    # (the span cap 10 t_c binds only at the literal reported scales; here
    # 3/xi is reachable and the stronger window is used)
    t_end_b = 3.0 / xi
    h = 0.05 / (2.0 * p.Omega)
    tau_max = 80.0 * sd.cutoff_time
    kernel_b = memory_kernel(tau_max, int(tau_max / (h / 2.0)) + 1, p, sd)
    assert len(kernel_b.tau) <= 100000
    trace_b = evolve_full(init, kernel_b, p.Omega, t_end_b, h)
    mask_b = trace_b.times >= 5.0 * t_star
    expected = init.r_n * np.exp(-xi * trace_b.times[mask_b])
    exp_err = float(np.max(np.abs(trace_b.r_n[mask_b] - expected) / expected))

    # (c) branch continuity at t*
    mp = matching_point(xi, h0, init.r_n)
    gauss_val = init.r_n * math.exp(-0.5 * h0 * mp.t_star ** 2)
    exp_val = mp.exp_amplitude * math.exp(-xi * mp.t_star)
    cont_val = abs(gauss_val - exp_val) / abs(gauss_val)
    cont_slope = abs(-h0 * mp.t_star * gauss_val - (-xi * exp_val)) / abs(xi * exp_val)

    elapsed = time.monotonic() - t0
    ok = (gauss_err <= 0.05 and exp_err <= 0.02
          and cont_val <= 1e-10 and cont_slope <= 1e-10 and elapsed < 300.0)
    verdict("criterion 5 (regime matching)", ok,
            f"gaussian stage {gauss_err:.2%} (tol 5%), exponential stage "
            f"{exp_err:.2%} (tol 2%), continuity {max(cont_val, cont_slope):.1e}, "
            f"{elapsed:.1f} s")


def test_criterion_6_crossing_time(paper_peak_params, default_config):
    xi = decay_rate_xi(paper_peak_params)
    exact = crossing_time(paper_peak_params, mode="exact", xi=xi)
    approx = crossing_time(paper_peak_params, mode="approx")
    rel = abs(exact - approx) / approx

    p_small = derive_params(sweep_point_config(default_config, 0.5, 1e-15))
    lim_small = abs(crossing_time(p_small, mode="approx")
                    - math.pi / (4.0 * p_small.Omega)) / (math.pi / (4.0 * p_small.Omega))
    p_one = derive_params(sweep_point_config(default_config, 0.5, 1.0))
    lim_one = abs(crossing_time(p_one, mode="approx")
                  - math.pi / (2.0 * p_one.Omega)) / (math.pi / (2.0 * p_one.Omega))

    ok = rel <= 0.01 and lim_small <= 1e-9 and lim_one <= 1e-9
    verdict("criterion 6 (switch-off crossing time)", ok,
            f"root vs closed form rel diff = {rel:.2e}; limit errors "
            f"{lim_small:.1e} (gamma->0), {lim_one:.1e} (gamma=1)")


def test_criterion_7_figure_shapes(figure_sweep, default_config):
    table, lam_grid, gam_grid, elapsed = figure_sweep
    rows = {(r.lam, r.gamma): r for r in table.rows}

    # (a) xi*t_c vs gamma: single interior maximum near 2 Omega sigma/c = 1
    lam_mid = lam_grid[len(lam_grid) // 2]
    curve = np.array([rows[(lam_mid, g)].xi_tc for g in gam_grid])
    peak = int(np.argmax(curve))
    interior = 0 < peak < gam_grid.size - 1
    local_maxima = sum(
        1 for i in range(1, gam_grid.size - 1)
        if curve[i] > curve[i - 1] and curve[i] > curve[i + 1]
    )
    p_at_peak = derive_params(sweep_point_config(default_config, float(lam_mid),
                                                 float(gam_grid[peak])))
    x_at_peak = 2.0 * p_at_peak.Omega * p_at_peak.sigma / C_LIGHT
    shape_a = interior and local_maxima == 1 and 0.5 <= x_at_peak <= 2.0

    # (b) W_dim(lambda): small at both ends, one interior maximum
    gam_mid = gam_grid[len(gam_grid) // 2]
    wd = np.array([rows[(l, gam_mid)].w_dim for l in lam_grid])
    wd_peak = int(np.argmax(wd))
    wd_maxima = sum(
        1 for i in range(1, lam_grid.size - 1)
        if wd[i] > wd[i - 1] and wd[i] > wd[i + 1]
    )
    shape_b = (0 < wd_peak < lam_grid.size - 1 and wd_maxima == 1
               and wd[0] < 0.15 * wd[wd_peak] and wd[-1] < 0.15 * wd[wd_peak])

    # (c) P_dim strictly decreasing in gamma at every lambda
    shape_c = all(
        np.all(np.diff([rows[(l, g)].p_dim for g in gam_grid]) < 0.0)
        for l in lam_grid
    )

    ok = shape_a and shape_b and shape_c and elapsed < 120.0
    verdict("criterion 7 (figure shapes on 50x50 grid)", ok,
            f"(a) single max at 2 Omega sigma/c = {x_at_peak:.2f} ({shape_a}); "
            f"(b) work trade-off in lambda ({shape_b}); "
            f"(c) power decreasing in gamma ({shape_c}); sweep {elapsed:.1f} s")


def test_criterion_8_record_sanity(paper_peak_params):
    p = paper_peak_params
    sd = SpectralDensity.from_params(p)
    xi = decay_rate_xi(p, sd)
    t_c = crossing_time(p, mode="exact", xi=xi)
    times = np.linspace(0.0, 2.0 * t_c, 81)
    up = build_record(p, LinearizedHistory.from_params(p, xi), times, sd=sd)
    down = build_record(p, LinearizedHistory.from_params(p, xi, sign=-1.0),
                        times, sd=sd)
    fid = record_overlap(up, down)
    i_tc = int(np.searchsorted(times, t_c))

    zero_start = up.e_rad[0] == 0.0
    e_tc = float(np.interp(t_c, times, up.e_rad))
    small = 0.0 < e_tc < 1e-6 * HBAR * p.Omega1
    identity = float(np.max(np.abs(fid - np.exp(-2.0 * up.norm)))) <= 1e-10
    monotone = bool(np.all(np.diff(fid) <= 1e-15))
    ok = zero_start and small and identity and monotone
    verdict("criterion 8 (radiation record sanity)", ok,
            f"E_rad(0) = 0 ({zero_start}); E_rad(t_c) = {e_tc:.2e} J vs "
            f"mu B1 = {HBAR * p.Omega1:.2e} J ({small}); overlap identity "
            f"({identity}); fidelity non-increasing ({monotone})")


def test_criterion_9_determinism(tmp_path):
    args = ["sweep", "--set", "lambda_count=4", "--set", "gamma_count=4"]
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    assert cli_main(args + ["--out", str(a)]) == 0
    assert cli_main(args + ["--out", str(b)]) == 0
    identical = a.read_bytes() == b.read_bytes()
    manifests = ((tmp_path / "a.csv.manifest").is_file()
                 and (tmp_path / "b.csv.manifest").is_file())
    ok = identical and manifests
    verdict("criterion 9 (byte-identical reruns)", ok,
            f"identical CSV bytes ({identical}); manifests emitted ({manifests})")
