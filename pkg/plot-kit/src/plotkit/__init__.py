"""Figures from the entropy simulator's CSV output.

Reads the fixed result schema written by qnn-entropy and draws the five
sweep figures: re-uploading contrast, bond profiles, depth scaling,
normalized-entropy collapse, expressibility decay. Pure consumer; the
simulator package is never imported and nothing is recomputed.
"""

from .csvio import (
    COLUMNS,
    HEADER,
    NoDataError,
    PlotDataError,
    Row,
    SchemaError,
    read_rows,
)
from .figures import FLAG_DISCARDED, KINDS, FigureSpec, Series, prepare, render

__version__ = "0.1.0"

__all__ = [
    "COLUMNS", "HEADER", "NoDataError", "PlotDataError", "Row",
    "SchemaError", "read_rows", "FLAG_DISCARDED", "KINDS", "FigureSpec",
    "Series", "prepare", "render",
]
