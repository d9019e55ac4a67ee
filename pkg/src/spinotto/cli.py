"""Command-line interface and bit-stable output emission.

Subcommands: otto | xi | dynamics | cycle | sweep | record. Each reads an
optional `key = value` config file, applies `--set key=value` overrides, and
writes either a key=value report or a CSV, to --out or stdout. Every output
file is accompanied by a `.manifest` companion recording the resolved
configuration; rerunning with the same resolved configuration reproduces
byte-identical data files.

Exit codes: 0 success, 1 configuration error, 2 numerical failure.

Numeric formatting is pinned to lowercase scientific notation with 17
significant digits and '\n' line endings so output is byte-stable across
platforms. Files are written to a temporary name and atomically renamed, so
no partial file survives a failure.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import tempfile
import time
from pathlib import Path

import numpy as np

from . import __version__, cycle, dynamics, modes, otto, radiation
from .constants import CONSTANTS_VERSION, HBAR
from .errors import ConfigError, NumericsError
from .params import derive_params, load_config

ENV_THREADS = "SPINOTTO_THREADS"


def fnum(x) -> str:
    """17-significant-digit lowercase scientific form, stable across runs."""
    if x is None:
        return "undefined"
    x = float(x)
    if math.isnan(x):
        return "nan"
    return f"{x:.16e}"


def atomic_write(path: Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=str(path.parent), prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def render_csv(header: list[str], rows: list[list[str]]) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(row) for row in rows)
    return "\n".join(lines) + "\n"


def render_report(items: list[tuple[str, str]]) -> str:
    return "".join(f"{key} = {value}\n" for key, value in items)


def write_output(out: str | None, text: str, manifest: dict) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    path = Path(out)
    atomic_write(path, text)
    lines = [("manifest_version", "1"),
             ("constants", CONSTANTS_VERSION),
             ("package_version", __version__),
             ("output", path.name)]
    lines.extend((k, str(v)) for k, v in manifest.items())
    atomic_write(Path(str(path) + ".manifest"), render_report(lines))


def resolve_threads() -> int:
    raw = os.environ.get(ENV_THREADS, "0")
    try:
        n = int(raw)
    except ValueError as exc:
        raise ConfigError(f"{ENV_THREADS} must be an integer, got {raw!r}") from exc
    if n <= 0:
        return min(8, os.cpu_count() or 1)
    return n


def _parse_overrides(pairs: list[str]) -> dict[str, str]:
    overrides: dict[str, str] = {}
    for pair in pairs or []:
        if "=" not in pair:
            raise ConfigError(f"--set expects key=value, got {pair!r}")
        key, _, value = pair.partition("=")
        overrides[key.strip()] = value.strip()
    return overrides


def _manifest_base(args, values: dict, subcommand: str, t0: float) -> dict:
    manifest = {"subcommand": subcommand,
                "duration_s": f"{time.monotonic() - t0:.3e}"}
    for key in sorted(values):
        manifest[f"config.{key}"] = values[key]
    return manifest


def _solver_step(p, numerics, t_end: float) -> float:
    """Auto step: resolve both the kernel envelope and the precession phase,
    capped by the history budget."""
    from .constants import C_LIGHT

    fine = min(p.sigma / C_LIGHT, 1.0 / (2.0 * p.Omega)) / 20.0
    if numerics.ode_step > 0.0:
        return numerics.ode_step
    budget = t_end / numerics.history_grid
    step = max(fine, budget)
    if step > 5.0 * fine:
        raise NumericsError(
            "history_grid too small to resolve the kernel over this time span; "
            "increase history_grid, shorten --t-end, set ode_step_s, or use "
            "--solver linearized"
        )
    return step


# ---------------------------------------------------------------------------
# subcommand handlers
# ---------------------------------------------------------------------------

def cmd_otto(args, config, values) -> tuple[str, str]:
    p = derive_params(config)
    metrics = otto.otto_cycle(p)
    items = [
        ("lambda", fnum(p.lam)),
        ("Delta", fnum(p.Delta)),
        ("W01_J", fnum(metrics.W01)),
        ("Q12_J", fnum(metrics.Q12)),
        ("Q30_J", fnum(metrics.Q30)),
        ("eta_O", fnum(metrics.eta_O)),
        ("mean_E0_J", fnum(metrics.meanE0)),
        ("mean_E1_J", fnum(metrics.meanE1)),
    ]
    return render_report(items), "report"


def cmd_xi(args, config, values) -> tuple[str, str]:
    p = derive_params(config)
    sd = modes.SpectralDensity.from_params(p)
    pole = modes.frequency_shift_phi(p, sd)
    xi_reg, xi_reg_change, halvings = modes.decay_rate_xi_regularized(p, sd)
    kernel = modes.memory_kernel(
        min(100.0 * sd.cutoff_time, 1.0),
        min(config.numerics.history_grid, 20000),
        p, sd)
    items = [
        ("two_omega_rad_s", fnum(2.0 * p.Omega)),
        ("sigma_m", fnum(p.sigma)),
        ("j_at_two_omega", fnum(sd(2.0 * p.Omega))),
        ("xi_per_s", fnum(pole.xi)),
        ("xi_regularized_per_s", fnum(xi_reg)),
        ("xi_reg_rel_change", fnum(xi_reg_change)),
        ("xi_reg_halvings", str(halvings)),
        ("phi_per_s", fnum(pole.phi)),
        ("phi_iterations", str(pole.iterations)),
        ("phi_rel_change", fnum(pole.phi_rel_change)),
        ("phi_quad_rel_err", fnum(pole.xi_quad_rel_err)),
        ("phi_converged", str(pole.converged).lower()),
        ("abs_phi_over_xi", fnum(abs(pole.phi) / pole.xi if pole.xi > 0 else 0.0)),
        ("abs_phi_over_omega", fnum(abs(pole.phi) / p.Omega)),
        ("H0_per_s2", fnum(kernel.h0)),
        ("H1_re_per_s3", fnum(kernel.h1.real)),
        ("H1_im_per_s3", fnum(kernel.h1.imag)),
    ]
    if args.j_out:
        w = np.linspace(0.0, sd.support(6.0), 2001)
        rows = [[fnum(wi), fnum(ji)] for wi, ji in zip(w, sd(w))]
        write_output(args.j_out, render_csv(["omega_rad_s", "J_per_s2_per_rad_s"], rows),
                     {"subcommand": "xi.j"})
    if args.kernel_out:
        rows = [[fnum(t), fnum(v.real), fnum(v.imag)]
                for t, v in zip(kernel.tau, kernel.values)]
        write_output(args.kernel_out,
                     render_csv(["tau_s", "re_H_per_s2", "im_H_per_s2"], rows),
                     {"subcommand": "xi.kernel"})
    return render_report(items), "report"


def _trace_rows(trace) -> list[list[str]]:
    rows = []
    for t, r3, rp, tag in zip(trace.times, trace.r3, trace.r_plus, trace.regime):
        rows.append([fnum(t), fnum(r3), fnum(rp.real), fnum(rp.imag),
                     fnum(1.0 - r3), str(tag)])
    return rows


def cmd_dynamics(args, config, values) -> tuple[str, str]:
    p = derive_params(config)
    sd = modes.SpectralDensity.from_params(p)
    xi = modes.decay_rate_xi(p, sd)
    t_c = dynamics.crossing_time(p, mode="approx")
    t_end = args.t_end if args.t_end is not None else 3.0 * t_c
    init = dynamics.engine_initial_state(p)
    if args.solver == "full":
        h = _solver_step(p, config.numerics, t_end)
        tau_max = min(t_end, 120.0 * sd.cutoff_time)
        n_table = min(max(int(math.ceil(2.0 * tau_max / h)) + 1, 16), 200001)
        kernel = modes.memory_kernel(tau_max, n_table, p, sd)
        trace = dynamics.evolve_full(init, kernel, p.Omega, t_end, h)
    else:
        n = args.steps or 2000
        times = np.linspace(0.0, t_end, n + 1)
        if args.solver == "linearized":
            trace = dynamics.linearized_trace(init, xi, p.Omega, times)
        else:
            kernel = modes.memory_kernel(100.0 * sd.cutoff_time, 4001, p, sd)
            coeffs = dynamics.early_time_coeffs(init, kernel.h0, kernel.h1,
                                                p.Omega, xi=xi)
            trace = dynamics.early_time_trace(coeffs, p.Omega, times)
    stride = max(1, args.stride)
    sub = dynamics.TrajectoryTrace(times=trace.times[::stride], r3=trace.r3[::stride],
                                   r_plus=trace.r_plus[::stride],
                                   regime=trace.regime[::stride])
    header = ["t", "r3", "re_r_plus", "im_r_plus", "r_n", "regime"]
    return render_csv(header, _trace_rows(sub)), "csv"


def cmd_cycle(args, config, values) -> tuple[str, str]:
    metrics = cycle.run_cycle(config, args.crossing, coupling=args.coupling)
    p = derive_params(config)
    residual = metrics.E_off - metrics.W2 - metrics.Q - (metrics.E_rad_at_tc or 0.0)
    items = [
        ("lambda", fnum(p.lam)),
        ("gamma", fnum(p.gamma)),
        ("Delta", fnum(p.Delta)),
        ("W1_J", fnum(metrics.W1)),
        ("W2_J", fnum(metrics.W2)),
        ("E_off_J", fnum(metrics.E_off)),
        ("Q_J", fnum(metrics.Q)),
        ("W_J", fnum(metrics.W)),
        ("eta", fnum(metrics.eta)),
        ("eta_c", fnum(metrics.eta_c)),
        ("t_c_s", fnum(metrics.t_c)),
        ("xi_tc", fnum(metrics.xi_tc)),
        ("W_dim", fnum(metrics.W_dim)),
        ("P_dim", fnum(metrics.P_dim)),
        ("Delta0_at_tc", fnum(metrics.Delta0_at_tc)),
        ("E_rad_at_tc_J", fnum(metrics.E_rad_at_tc)),
        ("bookkeeping_residual_J", fnum(residual)),
    ]
    if args.validate_full:
        check = cycle.full_solver_check(config, args.crossing)
        items.extend((f"full_check.{k}", fnum(v)) for k, v in check.items())
    return render_report(items), "report"


def cmd_sweep(args, config, values) -> tuple[str, str]:
    table = cycle.sweep(
        config,
        config.numerics.lambda_grid.values(),
        config.numerics.gamma_grid.values(),
        crossing_mode=args.crossing,
        coupling=args.coupling,
        threads=resolve_threads(),
    )
    rows = []
    for r in table.rows:
        rows.append([fnum(r.lam), fnum(r.gamma), fnum(r.xi), fnum(r.t_c),
                     fnum(r.xi_tc), fnum(r.eta_c), fnum(r.w_dim), fnum(r.p_dim),
                     r.status])
    return render_csv(list(cycle.SWEEP_COLUMNS), rows), "csv"


def cmd_record(args, config, values) -> tuple[str, str]:
    p = derive_params(config)
    sd = modes.SpectralDensity.from_params(p)
    xi = modes.decay_rate_xi(p, sd)
    t_c = dynamics.crossing_time(p, mode="approx")
    t_end = args.t_end if args.t_end is not None else 2.0 * t_c
    n = args.steps or 200
    times = np.linspace(0.0, t_end, n + 1)
    up = radiation.build_record(p, radiation.LinearizedHistory.from_params(p, xi),
                                times, sd=sd)
    down = radiation.build_record(p, radiation.LinearizedHistory.from_params(p, xi, sign=-1.0),
                                  times, sd=sd)
    fidelity = radiation.record_overlap(up, down)
    rows = [[fnum(t), fnum(e), fnum(nn), fnum(f)]
            for t, e, nn, f in zip(times, up.e_rad, up.norm, fidelity)]
    return render_csv(["t", "E_rad_J", "norm", "fidelity_up_down"], rows), "csv"


HANDLERS = {
    "otto": cmd_otto,
    "xi": cmd_xi,
    "dynamics": cmd_dynamics,
    "cycle": cmd_cycle,
    "sweep": cmd_sweep,
    "record": cmd_record,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinotto",
        description="Spin-1/2 measurement engine simulator",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=None, help="key = value config file")
    common.add_argument("--set", dest="overrides", action="append", default=[],
                        metavar="KEY=VALUE", help="override one config key")
    common.add_argument("--out", default=None, help="output path (default: stdout)")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    sub.add_parser("otto", parents=[common], help="ideal thermal-cycle reference numbers")

    p_xi = sub.add_parser("xi", parents=[common],
                          help="decay rate, frequency shift, kernel Taylor data")
    p_xi.add_argument("--j-out", default=None, help="also write J(omega) CSV here")
    p_xi.add_argument("--kernel-out", default=None, help="also write H(tau) CSV here")

    p_dyn = sub.add_parser("dynamics", parents=[common], help="spin trajectory CSV")
    p_dyn.add_argument("--solver", choices=["full", "linearized", "early"],
                       default="full")
    p_dyn.add_argument("--t-end", type=float, default=None, help="seconds")
    p_dyn.add_argument("--steps", type=int, default=None)
    p_dyn.add_argument("--stride", type=int, default=1, help="emit every k-th sample")

    p_cyc = sub.add_parser("cycle", parents=[common], help="one-cycle energy report")
    p_cyc.add_argument("--crossing", choices=["exact", "approx"], default="exact")
    p_cyc.add_argument("--coupling", choices=["on", "off"], default="on")
    p_cyc.add_argument("--validate-full", action="store_true",
                       help="recompute the state at t_c with the memory solver")

    p_sw = sub.add_parser("sweep", parents=[common],
                          help="cycle metrics over the (lambda, gamma) grid")
    p_sw.add_argument("--crossing", choices=["exact", "approx"], default="exact")
    p_sw.add_argument("--coupling", choices=["on", "off"], default="on")

    p_rec = sub.add_parser("record", parents=[common],
                           help="radiated record energy / fidelity CSV")
    p_rec.add_argument("--t-end", type=float, default=None, help="seconds")
    p_rec.add_argument("--steps", type=int, default=None)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    t0 = time.monotonic()
    try:
        overrides = _parse_overrides(args.overrides)
        config, values = load_config(args.config, overrides)
        text, _ = HANDLERS[args.subcommand](args, config, values)
        write_output(args.out, text, _manifest_base(args, values, args.subcommand, t0))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except NumericsError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
