"""Figure generation for the measurement-engine sweep outputs."""

__version__ = "0.1.0"

from .io import SWEEP_COLUMNS, EmptySelectionError, SchemaError, read_sweep_csv
from .render import DPI, FigureSpec, render

__all__ = [
    "DPI",
    "SWEEP_COLUMNS",
    "EmptySelectionError",
    "FigureSpec",
    "SchemaError",
    "__version__",
    "read_sweep_csv",
    "render",
]
