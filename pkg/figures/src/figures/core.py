"""Render score surfaces and heatmaps from sweep result CSVs.

The input is the sweep harness's published CSV schema (one row per cell per
model, columns ``model,p,q,...,metric...``); this tool never imports the
simulator.  Rendering is deterministic: fixed figure size, view angle, and a
perceptually uniform color map, so regenerated images are stable for a given
input.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

METRICS = ("mean_score", "win_rate", "max_score")
KINDS = ("surface", "heatmap")

_VIEW = {"elev": 28, "azim": -135}
_CMAP = "viridis"
_DPI = 150


class FigureError(ValueError):
    """Anything wrong with the input data or the requested figure."""


@dataclass(frozen=True)
class FigureSpec:
    """What to render: which model and metric from which CSV, to which file."""

    input_csv: str
    model: str
    metric: str = "mean_score"
    kind: str = "surface"
    output: str = "figure.png"

    def __post_init__(self) -> None:
        if self.metric not in METRICS:
            raise FigureError(f"unknown metric {self.metric!r}; choose from {METRICS}")
        if self.kind not in KINDS:
            raise FigureError(f"unknown plot kind {self.kind!r}; choose from {KINDS}")


@dataclass(frozen=True)
class GridData:
    """One model's metric pivoted onto the (p, q) grid."""

    model: str
    metric: str
    p_values: tuple[float, ...]
    q_values: tuple[float, ...]
    z: np.ndarray  # shape (len(p_values), len(q_values))

    @property
    def peak_cell(self) -> tuple[float, float]:
        """(p, q) of the cell where the metric attains its maximum."""
        i, j = np.unravel_index(int(np.argmax(self.z)), self.z.shape)
        return self.p_values[i], self.q_values[j]


def load_grid(path: str, model: str, metric: str) -> GridData:
    """Read one model's metric off a sweep CSV and pivot it into a grid.

    Raises :class:`FigureError` with row/column context when the metric
    column is missing, the model has no rows, a cell value is empty or
    malformed, or the rows do not form a complete p x q grid.
    """
    if metric not in METRICS:
        raise FigureError(f"unknown metric {metric!r}; choose from {METRICS}")
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for column in ("model", "p", "q", metric):
            if column not in header:
                raise FigureError(f"input CSV has no {column!r} column (header: {header})")
        cells: dict[tuple[float, float], float] = {}
        models_seen = set()
        for line_no, row in enumerate(reader, start=2):
            models_seen.add(row["model"])
            if row["model"] != model:
                continue
            try:
                p, q = float(row["p"]), float(row["q"])
            except (TypeError, ValueError) as exc:
                raise FigureError(f"line {line_no}: bad p/q values") from exc
            raw = row[metric]
            if raw is None or raw == "":
                raise FigureError(f"line {line_no}: empty {metric!r} for model {model!r}")
            try:
                value = float(raw)
            except ValueError as exc:
                raise FigureError(f"line {line_no}: {metric}={raw!r} is not a number") from exc
            if (p, q) in cells:
                raise FigureError(f"line {line_no}: duplicate cell (p={p}, q={q})")
            cells[(p, q)] = value
    if not cells:
        raise FigureError(
            f"no rows for model {model!r} (models present: {sorted(models_seen)})"
        )
    p_values = tuple(sorted({p for p, _ in cells}))
    q_values = tuple(sorted({q for _, q in cells}))
    if len(cells) != len(p_values) * len(q_values):
        raise FigureError(
            f"incomplete grid for model {model!r}: {len(cells)} cells but "
            f"{len(p_values)} p-values x {len(q_values)} q-values"
        )
    z = np.empty((len(p_values), len(q_values)))
    for i, p in enumerate(p_values):
        for j, q in enumerate(q_values):
            if (p, q) not in cells:
                raise FigureError(f"missing cell (p={p}, q={q}) for model {model!r}")
            z[i, j] = cells[(p, q)]
    return GridData(model=model, metric=metric, p_values=p_values, q_values=q_values, z=z)


def render(spec: FigureSpec) -> GridData:
    """Render the figure described by ``spec`` and write the image file.

    Surfaces put p on X, q on Y, and the metric on Z with the Z-range pinned
    to the data range (nothing is silently clipped); heatmaps use the color
    scale instead.  Returns the pivoted grid for further inspection.
    """
    grid = load_grid(spec.input_csv, spec.model, spec.metric)
    fig = plt.figure(figsize=(8, 6))
    try:
        if spec.kind == "surface":
            ax = fig.add_subplot(projection="3d")
            q_mesh, p_mesh = np.meshgrid(grid.q_values, grid.p_values)
            ax.plot_surface(p_mesh, q_mesh, grid.z, cmap=_CMAP, linewidth=0, antialiased=True)
            ax.set_zlabel(spec.metric)
            z_min, z_max = float(grid.z.min()), float(grid.z.max())
            if z_min == z_max:  # constant surface still needs a nonempty axis
                z_max = z_min + 1.0
            ax.set_zlim(z_min, z_max)
            ax.view_init(**_VIEW)
        else:
            ax = fig.add_subplot()
            extent = (
                min(grid.q_values), max(grid.q_values),
                min(grid.p_values), max(grid.p_values),
            )
            image = ax.imshow(
                grid.z, origin="lower", aspect="auto", cmap=_CMAP, extent=extent
            )
            fig.colorbar(image, ax=ax, label=spec.metric)
        # Heatmaps show q along X and p along Y; surfaces label all three axes.
        if spec.kind == "surface":
            ax.set_xlabel("p")
            ax.set_ylabel("q")
        else:
            ax.set_xlabel("q")
            ax.set_ylabel("p")
        ax.set_title(f"{spec.model}: {spec.metric}")
        fig.savefig(spec.output, dpi=_DPI)
    finally:
        plt.close(fig)
    return grid
