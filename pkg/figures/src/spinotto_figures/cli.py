"""Command-line front end: spinotto-plot --fig {1,2,3} --in sweep.csv --out fig.png."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .io import EmptySelectionError, SchemaError
from .render import FigureSpec, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinotto-plot",
        description="Render measurement-engine sweep CSVs into summary figures",
    )
    parser.add_argument("--fig", type=int, choices=(1, 2, 3), required=True,
                        help="1: xi*t_c vs gamma, 2: W_dim vs lambda, "
                             "3: P_dim heatmap over (lambda, gamma)")
    parser.add_argument("--in", dest="input_csv", required=True,
                        help="sweep CSV produced by the engine CLI")
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--dump-plotted", default=None, metavar="CSV",
                        help="also write the exact plotted arrays here")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    spec = FigureSpec(
        figure_id=args.fig,
        input_csv=Path(args.input_csv),
        output_path=Path(args.out),
        dump_path=Path(args.dump_plotted) if args.dump_plotted else None,
    )
    try:
        render(spec)
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 1
    except EmptySelectionError as exc:
        print(f"empty selection: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
