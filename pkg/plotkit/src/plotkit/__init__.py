"""plotkit: deterministic figures from erlab result CSVs."""

from .figures import (
    FIGURE_KINDS,
    REQUIRED_COLUMNS,
    FigureSpec,
    MissingColumnError,
    PlotError,
    read_columns,
    render,
)

__version__ = "0.1.0"

__all__ = [
    "FIGURE_KINDS",
    "REQUIRED_COLUMNS",
    "FigureSpec",
    "MissingColumnError",
    "PlotError",
    "read_columns",
    "render",
]
