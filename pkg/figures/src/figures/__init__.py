"""Figure generation for sweep result CSVs: 3D surfaces and heatmaps."""

__version__ = "0.1.0"

from figures.core import (
    KINDS,
    METRICS,
    FigureError,
    FigureSpec,
    GridData,
    load_grid,
    render,
)

__all__ = [
    "FigureError",
    "FigureSpec",
    "GridData",
    "KINDS",
    "METRICS",
    "load_grid",
    "render",
    "__version__",
]
