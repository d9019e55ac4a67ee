"""Coherent radiation record: amplitudes, energy, norm, and overlap."""

import math

import numpy as np
import pytest

from spinotto.constants import HBAR
from spinotto.errors import RecordGridError
from spinotto.modes import SpectralDensity, decay_rate_xi
from spinotto.radiation import (
    LinearizedHistory,
    SampledHistory,
    build_record,
    coherent_amplitude,
    omega_eff,
    radiated_energy,
    record_norm,
    record_overlap,
)


@pytest.fixture(scope="module")
def peak(paper_peak_params):
    p = paper_peak_params
    sd = SpectralDensity.from_params(p)
    xi = decay_rate_xi(p, sd)
    t_c = math.acos(-p.gamma ** 2) / (2.0 * p.Omega)
    return dict(p=p, sd=sd, xi=xi, t_c=t_c)


@pytest.fixture(scope="module")
def records(peak):
    p = peak["p"]
    times = np.linspace(0.0, 2.0 * peak["t_c"], 61)
    up = build_record(p, LinearizedHistory.from_params(p, peak["xi"]), times, sd=peak["sd"])
    down = build_record(p, LinearizedHistory.from_params(p, peak["xi"], sign=-1.0),
                        times, sd=peak["sd"])
    return up, down


def test_amplitude_zero_at_start(peak):
    hist = LinearizedHistory.from_params(peak["p"], peak["xi"])
    w = np.geomspace(1e14, 1e17, 7)
    assert np.all(coherent_amplitude(w, 0.0, hist) == 0.0)


def test_amplitude_constant_history_closed_form(peak):
    # constant r_minus = c0 gives A = c0 (1 - exp(-i w t)) / (i w)
    c0 = 0.37 - 0.11j
    t = 3.3e-17
    ts = np.linspace(0.0, t, 20001)
    hist = SampledHistory(times=ts, values=np.full(ts.shape, c0))
    for w in (2e15, 3e16, 1.7e17):
        expected = c0 * (1.0 - np.exp(-1j * w * t)) / (1j * w)
        got = coherent_amplitude(w, t, hist)
        assert got == pytest.approx(complex(expected), rel=1e-6)


def test_linearized_closed_form_vs_quadrature(peak):
    # the closed form must agree with direct quadrature of the same history
    hist = LinearizedHistory.from_params(peak["p"], peak["xi"])
    t = peak["t_c"]
    ts = np.linspace(0.0, t, 40001)
    sampled = SampledHistory(times=ts, values=np.asarray(hist(ts)))
    for w in (0.5 * peak["p"].Omega, 2.0 * peak["p"].Omega, 10.0 * peak["p"].Omega):
        closed = coherent_amplitude(w, t, hist)
        quadr = coherent_amplitude(w, t, sampled)
        assert closed == pytest.approx(quadr, rel=1e-8)


def test_energy_zero_cases(peak, records):
    up, _ = records
    assert up.e_rad[0] == 0.0
    assert up.norm[0] == 0.0
    off = build_record(peak["p"], up.history, up.times, sd=peak["sd"].scaled(0.0))
    assert np.all(off.e_rad == 0.0)
    assert np.all(off.norm == 0.0)


def test_energy_small_and_monotone(peak, records):
    up, _ = records
    mu_b1 = HBAR * peak["p"].Omega1
    e_tc = radiated_energy(peak["t_c"], peak["p"], up)
    assert 0.0 < e_tc < 1e-6 * mu_b1
    assert np.all(np.diff(up.e_rad) >= -1e-60)


def test_record_point_queries_match_grid(peak, records):
    up, _ = records
    i = 30
    t = float(up.times[i])
    assert radiated_energy(t, peak["p"], up) == pytest.approx(float(up.e_rad[i]), rel=1e-12)
    assert record_norm(t, peak["p"], up) == pytest.approx(float(up.norm[i]), rel=1e-12)


def test_overlap_identity_and_range(records):
    up, down = records
    fid = record_overlap(up, down)
    assert np.all((0.0 <= fid) & (fid <= 1.0))
    assert fid[0] == 1.0
    # opposite-sign histories: fidelity = exp(-2 N) exactly
    assert np.max(np.abs(fid - np.exp(-2.0 * up.norm))) < 1e-10
    assert np.all(np.diff(fid) <= 1e-15)


def test_overlap_identical_records(records):
    up, _ = records
    assert np.all(record_overlap(up, up) == 1.0)


def test_overlap_grid_mismatch(peak, records):
    up, _ = records
    other = build_record(peak["p"], up.history, up.times[:-1], sd=peak["sd"])
    with pytest.raises(RecordGridError):
        record_overlap(up, other)


def test_energy_norm_ratio_order_one(records, peak):
    # E_rad and N share the mode reduction; their ratio is an effective
    # photon frequency near the emission line
    up, _ = records
    ratio = up.e_rad[1:] / (HBAR * 2.0 * peak["p"].Omega * up.norm[1:])
    assert np.all((0.1 < ratio) & (ratio < 10.0))


def test_omega_eff_diagnostic(peak, records):
    up, _ = records
    assert omega_eff(0.0, peak["p"], up) == 0.0
    off = build_record(peak["p"], up.history, up.times, sd=peak["sd"].scaled(0.0))
    assert omega_eff(peak["t_c"], peak["p"], off) == 0.0
    w_eff = omega_eff(peak["t_c"], peak["p"], up)
    assert abs(w_eff) < 1e-6 * peak["p"].Omega


def test_build_record_validates_times(peak):
    hist = LinearizedHistory.from_params(peak["p"], peak["xi"])
    with pytest.raises(ValueError):
        build_record(peak["p"], hist, np.array([0.0, 0.0, 1.0]), sd=peak["sd"])
    with pytest.raises(ValueError):
        build_record(peak["p"], hist, np.array([-1.0, 1.0]), sd=peak["sd"])
