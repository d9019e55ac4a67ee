"""Headless rendering of the three sweep figures.

Figure 1: decay-rate-times-stroke-time against the probe ratio gamma (log x).
Figure 2: dimensionless work against the work ratio lambda.
Figure 3: dimensionless power heatmap over (lambda, gamma).

The renderer performs no physics: plotted arrays are the CSV columns,
optionally re-emitted verbatim through --dump-plotted for diffing. Output is
deterministic: fixed backend, size, dpi, and stripped writer metadata.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .io import EmptySelectionError, SweepData, read_sweep_csv

DPI = 150
FIGSIZE = (6.4, 4.2)


@dataclass(frozen=True)
class FigureSpec:
    figure_id: int                 # 1, 2, or 3
    input_csv: Path
    output_path: Path
    dump_path: Path | None = None


def _fmt(x: float) -> str:
    return f"{x:.16e}"


def _dump(path: Path, header: list[str], columns: list[np.ndarray]) -> None:
    lines = [",".join(header)]
    for values in zip(*columns):
        lines.append(",".join(_fmt(v) for v in values))
    path.write_text("\n".join(lines) + "\n", newline="")


def _figure_1(data: SweepData):
    rows = data.ok_rows
    if not rows:
        raise EmptySelectionError("no usable rows for figure 1")
    lam0 = rows[0].lam                       # first work-ratio slice in file order
    sel = [r for r in rows if r.lam == lam0]
    gamma = np.array([r.gamma for r in sel])
    xi_tc = np.array([r.xi_tc for r in sel])
    fig, ax = plt.subplots(figsize=FIGSIZE, dpi=DPI)
    ax.plot(gamma, xi_tc, marker="o", markersize=3, linewidth=1.2)
    ax.set_xscale("log")
    ax.set_xlabel(r"$\gamma = \Omega_1/\Omega_2$ (probe ratio)")
    ax.set_ylabel(r"$\xi\,t_c$ (decay rate $\times$ stroke time)")
    ax.set_title(rf"Radiative correction vs probe strength ($\lambda$ = {lam0:g})")
    return fig, ["gamma", "xi_tc"], [gamma, xi_tc]


def _figure_2(data: SweepData):
    rows = data.ok_rows
    if not rows:
        raise EmptySelectionError("no usable rows for figure 2")
    gamma0 = rows[0].gamma                   # first probe-ratio slice in file order
    sel = [r for r in rows if r.gamma == gamma0]
    lam = np.array([r.lam for r in sel])
    w_dim = np.array([r.w_dim for r in sel])
    fig, ax = plt.subplots(figsize=FIGSIZE, dpi=DPI)
    ax.plot(lam, w_dim, marker="o", markersize=3, linewidth=1.2)
    ax.set_xlabel(r"$\lambda = \Omega_0/\Omega_1$ (work ratio)")
    ax.set_ylabel(r"$W / (\mu B_1)$ (dimensionless work)")
    ax.set_title(rf"Work trade-off vs work ratio ($\gamma$ = {gamma0:g})")
    return fig, ["lambda", "W_dim"], [lam, w_dim]


def _figure_3(data: SweepData):
    rows = data.ok_rows
    if not rows:
        raise EmptySelectionError("no usable rows for figure 3")
    lam_values = list(dict.fromkeys(r.lam for r in rows))
    gam_values = list(dict.fromkeys(r.gamma for r in rows))
    table = {(r.lam, r.gamma): r.p_dim for r in rows}
    if len(table) != len(lam_values) * len(gam_values):
        raise EmptySelectionError(
            "figure 3 needs a complete (lambda, gamma) grid; "
            f"got {len(table)} points for a "
            f"{len(lam_values)}x{len(gam_values)} grid"
        )
    lam = np.array(lam_values)
    gam = np.array(gam_values)
    p_dim = np.array([[table[(l, g)] for g in gam_values] for l in lam_values])
    fig, ax = plt.subplots(figsize=FIGSIZE, dpi=DPI)
    mesh = ax.pcolormesh(lam, gam, p_dim.T, shading="nearest", cmap="viridis")
    ax.set_yscale("log")
    ax.set_xlabel(r"$\lambda = \Omega_0/\Omega_1$ (work ratio)")
    ax.set_ylabel(r"$\gamma = \Omega_1/\Omega_2$ (probe ratio)")
    fig.colorbar(mesh, ax=ax, label=r"$P\,\hbar / (\mu B_1)^2$ (dimensionless power)")
    ax.set_title("Dimensionless power over the sweep grid")
    # dump in the row order of the input (lambda-major)
    lam_col = np.array([r.lam for r in rows])
    gam_col = np.array([r.gamma for r in rows])
    p_col = np.array([r.p_dim for r in rows])
    return fig, ["lambda", "gamma", "P_dim"], [lam_col, gam_col, p_col]


_BUILDERS = {1: _figure_1, 2: _figure_2, 3: _figure_3}


def render(spec: FigureSpec) -> Path:
    """Render one figure to spec.output_path; returns the written path."""
    if spec.figure_id not in _BUILDERS:
        raise ValueError(f"figure id must be 1, 2, or 3, got {spec.figure_id}")
    data = read_sweep_csv(spec.input_csv)
    fig, header, columns = _BUILDERS[spec.figure_id](data)
    try:
        fig.tight_layout()
        fig.savefig(spec.output_path, dpi=DPI, metadata={"Software": None})
    finally:
        plt.close(fig)
    if spec.dump_path is not None:
        _dump(spec.dump_path, header, columns)
    return spec.output_path
