"""Renderer unit tests: schema, slices, dumps, determinism, edge cases."""

import csv
import hashlib
from pathlib import Path

import pytest

from spinotto_figures.cli import main
from spinotto_figures.io import (
    SWEEP_COLUMNS,
    EmptySelectionError,
    SchemaError,
    read_sweep_csv,
)
from spinotto_figures.render import FigureSpec, render

GOLDEN = Path(__file__).parent / "data" / "golden_sweep.csv"


def sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def read_csv_columns(path: Path) -> dict:
    with path.open(newline="") as handle:
        reader = csv.DictReader(handle)
        rows = list(reader)
    return {name: [row[name] for row in rows] for name in reader.fieldnames}


def test_reader_parses_golden():
    data = read_sweep_csv(GOLDEN)
    assert len(data.rows) == 144
    assert all(r.status == "ok" for r in data.rows)
    assert data.rows[0].lam == 0.02


def test_reader_rejects_missing_column(tmp_path):
    bad = tmp_path / "bad.csv"
    header = ",".join(c for c in SWEEP_COLUMNS if c != "W_dim")
    bad.write_text(header + "\n")
    with pytest.raises(SchemaError, match="W_dim"):
        read_sweep_csv(bad)


def test_reader_rejects_missing_file(tmp_path):
    with pytest.raises(SchemaError, match="not found"):
        read_sweep_csv(tmp_path / "nope.csv")


def test_reader_rejects_malformed_number(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text(",".join(SWEEP_COLUMNS) + "\n"
                   + "a,1,1,1,1,1,1,1,ok\n")
    with pytest.raises(SchemaError, match=":2"):
        read_sweep_csv(bad)


@pytest.mark.parametrize("fig_id", [1, 2, 3])
def test_render_each_figure(tmp_path, fig_id):
    out = tmp_path / f"fig{fig_id}.png"
    render(FigureSpec(figure_id=fig_id, input_csv=GOLDEN, output_path=out))
    assert out.is_file() and out.stat().st_size > 2000
    assert out.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_dump_plotted_equals_input_slice(tmp_path):
    data = read_sweep_csv(GOLDEN)
    lam0 = data.rows[0].lam
    expected_gamma = [r.gamma for r in data.ok_rows if r.lam == lam0]
    expected_xi_tc = [r.xi_tc for r in data.ok_rows if r.lam == lam0]

    dump = tmp_path / "fig1_arrays.csv"
    render(FigureSpec(1, GOLDEN, tmp_path / "fig1.png", dump))
    cols = read_csv_columns(dump)
    assert [float(v) for v in cols["gamma"]] == expected_gamma
    assert [float(v) for v in cols["xi_tc"]] == expected_xi_tc


def test_dump_plotted_fig3_full_grid(tmp_path):
    data = read_sweep_csv(GOLDEN)
    dump = tmp_path / "fig3_arrays.csv"
    render(FigureSpec(3, GOLDEN, tmp_path / "fig3.png", dump))
    cols = read_csv_columns(dump)
    assert [float(v) for v in cols["P_dim"]] == [r.p_dim for r in data.ok_rows]
    assert [float(v) for v in cols["lambda"]] == [r.lam for r in data.ok_rows]


def test_rerender_checksum_stable(tmp_path):
    a = tmp_path / "a.png"
    b = tmp_path / "b.png"
    render(FigureSpec(2, GOLDEN, a))
    render(FigureSpec(2, GOLDEN, b))
    assert sha256(a) == sha256(b)


def test_two_row_minimal_csv(tmp_path):
    minimal = tmp_path / "mini.csv"
    rows = [
        ",".join(SWEEP_COLUMNS),
        "0.5,1e-10,1e-5,1e-17,1e-21,0.49,0.2,1e8,ok",
        "0.5,1e-9,1e-4,1e-16,1e-20,0.48,0.2,1e7,ok",
    ]
    minimal.write_text("\n".join(rows) + "\n")
    out = tmp_path / "mini.png"
    render(FigureSpec(1, minimal, out))
    assert out.is_file()


def test_empty_selection_errors(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text(",".join(SWEEP_COLUMNS) + "\n"
                     + "0.5,1e-10,nan,nan,nan,nan,nan,nan,no-crossing\n")
    with pytest.raises(EmptySelectionError):
        render(FigureSpec(1, empty, tmp_path / "x.png"))


def test_incomplete_grid_errors_for_heatmap(tmp_path):
    partial = tmp_path / "partial.csv"
    rows = [
        ",".join(SWEEP_COLUMNS),
        "0.2,1e-10,1e-5,1e-17,1e-21,0.7,0.1,1e8,ok",
        "0.2,1e-9,1e-5,1e-17,1e-21,0.7,0.1,1e7,ok",
        "0.8,1e-10,1e-5,1e-17,1e-21,0.1,0.1,1e8,ok",
    ]
    partial.write_text("\n".join(rows) + "\n")
    with pytest.raises(EmptySelectionError, match="complete"):
        render(FigureSpec(3, partial, tmp_path / "x.png"))


def test_cli_exit_codes(tmp_path):
    out = tmp_path / "fig.png"
    assert main(["--fig", "1", "--in", str(GOLDEN), "--out", str(out)]) == 0
    assert out.is_file()

    bad = tmp_path / "bad.csv"
    bad.write_text("nope\n")
    assert main(["--fig", "1", "--in", str(bad), "--out", str(out)]) == 1

    empty = tmp_path / "empty.csv"
    empty.write_text(",".join(SWEEP_COLUMNS) + "\n")
    assert main(["--fig", "2", "--in", str(empty), "--out", str(out)]) == 2
