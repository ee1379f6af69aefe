"""SVG figures: labelled embeddings, depth heatmaps and depth contours.

Output is byte-stable across runs: the SVG id salt is fixed, the date
stamp is omitted and text stays text.
"""

from __future__ import annotations

import io

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .depth import DepthGrid  # noqa: E402
from .embedding import Embedding  # noqa: E402

_RC = {
    "svg.hashsalt": "lexidepth",
    "svg.fonttype": "none",
    "font.size": 8,
    "path.simplify": False,
}


def _save(fig) -> str:
    buf = io.StringIO()
    fig.savefig(buf, format="svg", metadata={"Date": None}, bbox_inches=None)
    plt.close(fig)
    return buf.getvalue()


def _annotate(ax, e: Embedding, highlight=()):
    for lab, (x, y) in zip(e.labels, e.coords[:, :2]):
        ax.annotate(
            lab,
            (x, y),
            xytext=(3, 3),
            textcoords="offset points",
            color="crimson" if lab in highlight else "black",
        )


def _planar(e: Embedding) -> np.ndarray:
    if e.dimension >= 2:
        return e.coords[:, :2]
    return np.column_stack([e.coords[:, 0], np.zeros(len(e))])


def scatter_svg(e: Embedding, title: str = "", groups=None, highlight=()) -> str:
    """Labelled 2-D scatter. ``groups`` maps label -> group for colouring."""
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(7, 6))
        xy = _planar(e)
        if groups:
            names = list(dict.fromkeys(str(groups.get(lab, "")) for lab in e.labels))
            cmap = plt.get_cmap("tab10")
            for gi, name in enumerate(names):
                idx = [i for i, lab in enumerate(e.labels) if str(groups.get(lab, "")) == name]
                ax.scatter(xy[idx, 0], xy[idx, 1], s=18, color=cmap(gi % 10), label=name)
            ax.legend(loc="best", frameon=False)
        else:
            ax.scatter(xy[:, 0], xy[:, 1], s=18, color="steelblue")
        if highlight:
            idx = [i for i, lab in enumerate(e.labels) if lab in highlight]
            ax.scatter(xy[idx, 0], xy[idx, 1], s=60, facecolors="none", edgecolors="crimson")
        _annotate(ax, Embedding(e.labels, xy), highlight)
        ax.set_title(title)
        ax.set_xlabel("dimension 1")
        ax.set_ylabel("dimension 2")
        return _save(fig)


def heatmap_svg(grid: DepthGrid, e: Embedding | None = None, title: str = "") -> str:
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(7, 6))
        im = ax.imshow(
            grid.values,
            origin="lower",
            extent=(*grid.x_range, *grid.y_range),
            aspect="auto",
            cmap="viridis",
            vmin=0.0,
            vmax=1.0,
            interpolation="nearest",
        )
        fig.colorbar(im, ax=ax, label=f"{grid.method} depth")
        if e is not None:
            ax.scatter(e.coords[:, 0], e.coords[:, 1], s=10, color="white", edgecolors="black")
            _annotate(ax, e)
        ax.set_title(title)
        return _save(fig)


def contour_svg(grid: DepthGrid, e: Embedding | None = None, title: str = "", levels: int = 12) -> str:
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(7, 6))
        xs, ys = np.meshgrid(grid.xs, grid.ys)
        cs = ax.contourf(xs, ys, grid.values, levels=np.linspace(0, 1, levels + 1), cmap="viridis")
        ax.contour(xs, ys, grid.values, levels=np.linspace(0, 1, levels + 1), colors="k", linewidths=0.3)
        fig.colorbar(cs, ax=ax, label=f"{grid.method} depth")
        if e is not None:
            ax.scatter(e.coords[:, 0], e.coords[:, 1], s=10, color="white", edgecolors="black")
            _annotate(ax, e)
        ax.set_title(title)
        return _save(fig)
