"""SVG figures for reports (rasters with certificate balls, measure curves, patches)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from matplotlib.patches import Circle  # noqa: E402

# fixed ids and no timestamp keep the SVG bytes reproducible
plt.rcParams["svg.hashsalt"] = "steinhaus"
plt.rcParams["svg.fonttype"] = "none"
_META = {"Date": None, "Creator": None}


def _save(fig, path):
    fig.savefig(path, format="svg", metadata=_META)
    plt.close(fig)


def plot_grid(grid, path, balls=(), title: str = "") -> None:
    """2D raster as an image, with optional ``(center, radius)`` circles."""
    fig, ax = plt.subplots(figsize=(5, 5))
    if grid.count:
        x0, y0 = grid.origin
        nx, ny = grid.dims
        ext = (x0, x0 + nx * grid.h, y0, y0 + ny * grid.h)
        ax.imshow(grid.occ.T, origin="lower", extent=ext, cmap="Greys", interpolation="nearest", vmin=0, vmax=1)
    for center, radius in balls:
        ax.add_patch(Circle(center, radius, fill=False, color="tab:red", lw=1.2))
        ax.plot(*center, "+", color="tab:red")
    ax.set_aspect("equal")
    ax.set_title(title)
    _save(fig, path)


def plot_measures(series, path, title: str = "") -> None:
    """Measure against stage depth; ``series`` maps a label to ``(depths, values)``."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for label, (depths, values) in sorted(series.items()):
        ax.semilogy(depths, values, marker="o", label=label)
    ax.set_xlabel("stage depth")
    ax.set_ylabel("measure")
    ax.set_title(title)
    if series:
        ax.legend()
    _save(fig, path)


def plot_points(groups, path, title: str = "") -> None:
    """Scatter of 2D point groups; ``groups`` maps a label to an ``(N, 2)`` array."""
    fig, ax = plt.subplots(figsize=(5, 5))
    for label, pts in sorted(groups.items()):
        pts = np.asarray(pts)
        ax.plot(pts[:, 0], pts[:, 1], ".", ms=2, label=label)
    ax.set_aspect("equal")
    ax.set_title(title)
    if groups:
        ax.legend()
    _save(fig, path)
