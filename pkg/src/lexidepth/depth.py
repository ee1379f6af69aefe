"""Spatial and L1 data depth, outlier flagging, and depth surfaces.

Spatial depth of ``x`` with respect to a point cloud is one minus the length
of the average unit vector pointing from the cloud to ``x``::

    D(x) = 1 - || (1/n) * sum_{y != x} (x - y) / ||x - y|| ||

Points of the cloud that coincide with ``x`` contribute a zero vector but
still count in ``n``. The L1 depth of Vardi and Zhang additionally credits
that coincident mass ``f(x)``: ``1 - max(0, ||e(x)|| - f(x))``. Both are
invariant under joint rotation, reflection, translation and uniform scaling,
but not under general affine maps.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

import numpy as np

from .embedding import Embedding
from .errors import DataError, DimensionMismatch, DimensionUnsupported, EmptyReference, InvalidLevel

METHODS = ("spatial", "l1")

# grid points evaluated per batch; bounds the (batch, n, d) temporary
_BATCH = 4096


def _as_ref(ref) -> np.ndarray:
    arr = np.asarray(ref, dtype=float)
    return arr[:, None] if arr.ndim == 1 else arr


def _as_queries(points, dim: int) -> np.ndarray:
    arr = np.asarray(points, dtype=float)
    if arr.ndim == 0:
        return arr.reshape(1, 1)
    if arr.ndim == 1:
        return arr[None, :] if arr.size == dim else arr[:, None]
    return arr


def _depths(points: np.ndarray, ref: np.ndarray, method: str) -> np.ndarray:
    if method not in METHODS:
        raise ValueError(f"depth method must be one of {METHODS}, got {method!r}")
    if len(ref) == 0:
        raise EmptyReference("reference set is empty")
    if points.shape[1] != ref.shape[1]:
        raise DimensionMismatch(
            f"points have dimension {points.shape[1]}, reference {ref.shape[1]}"
        )
    n = len(ref)
    out = np.empty(len(points))
    for start in range(0, len(points), _BATCH):
        block = points[start:start + _BATCH]
        diff = block[:, None, :] - ref[None, :, :]
        norms = np.sqrt((diff**2).sum(axis=-1))
        coincident = norms == 0
        safe = np.where(coincident, 1.0, norms)
        units = np.where(coincident[..., None], 0.0, diff / safe[..., None])
        mean_len = np.sqrt((units.sum(axis=1) ** 2).sum(axis=-1)) / n
        if method == "spatial":
            depth = 1.0 - mean_len
        else:
            depth = 1.0 - np.maximum(0.0, mean_len - coincident.sum(axis=1) / n)
        out[start:start + _BATCH] = depth
    return np.clip(out, 0.0, 1.0)


def depths(points, ref, method: str = "spatial") -> np.ndarray:
    """Depth of each row of ``points`` with respect to the rows of ``ref``."""
    ref = _as_ref(ref)
    return _depths(_as_queries(points, ref.shape[1]), ref, method)


def spatial_depths(points, ref) -> np.ndarray:
    return depths(points, ref, "spatial")


def l1_depths(points, ref) -> np.ndarray:
    return depths(points, ref, "l1")


def _single(x, ref, method):
    ref = _as_ref(ref)
    x = np.atleast_1d(np.asarray(x, dtype=float)).reshape(1, -1)
    return float(_depths(x, ref, method)[0])


def spatial_depth(x, ref) -> float:
    """Spatial depth of a single point ``x`` with respect to ``ref``."""
    return _single(x, ref, "spatial")


def l1_depth(x, ref) -> float:
    """Vardi-Zhang L1 depth of ``x``; equals spatial depth unless ``x`` is in ``ref``."""
    return _single(x, ref, "l1")


def leave_one_out_depths(points, method: str = "spatial") -> np.ndarray:
    """Depth of each point with respect to all the others."""
    pts = _as_ref(points)
    n = len(pts)
    if n < 2:
        raise EmptyReference("leave-one-out depth needs at least two points")
    keep = ~np.eye(n, dtype=bool)
    return np.array([_depths(pts[i:i + 1], pts[keep[i]], method)[0] for i in range(n)])


@dataclass(frozen=True)
class DepthReport:
    labels: tuple[str, ...]
    depths: np.ndarray
    method: str
    reference: str
    outlier_flags: np.ndarray | None = None
    level: float | None = None
    threshold: float | None = None
    n_resamples: int | None = None
    seed: int | None = None

    @property
    def outliers(self) -> list[str]:
        if self.outlier_flags is None:
            return []
        return [lab for lab, f in zip(self.labels, self.outlier_flags) if f]

    def to_csv(self, precision: int = 9) -> str:
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["label", "depth", "outlier"])
        flags = self.outlier_flags if self.outlier_flags is not None else [False] * len(self.labels)
        for lab, dep, flag in zip(self.labels, self.depths, flags):
            writer.writerow([lab, f"{dep:.{precision}f}", "1" if flag else "0"])
        return out.getvalue()

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "reference": self.reference,
            "level": self.level,
            "threshold": self.threshold,
            "n_resamples": self.n_resamples,
            "seed": self.seed,
            "depths": {lab: float(v) for lab, v in zip(self.labels, self.depths)},
            "outliers": self.outliers,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def depth_report(e: Embedding, method: str = "spatial") -> DepthReport:
    """Leave-one-out depth of every embedded point."""
    return DepthReport(
        e.labels, leave_one_out_depths(e.coords, method), method, "leave-one-out over the embedding"
    )


def detect_outliers(
    e: Embedding,
    level: float = 0.05,
    n_resamples: int = 1000,
    seed: int = 0,
    method: str = "spatial",
) -> DepthReport:
    """Flag points whose leave-one-out depth is unusually low.

    The reference distribution is the bootstrap distribution of the
    leave-one-out depths: ``n_resamples`` draws of ``n`` points with
    replacement, each drawn point contributing its own leave-one-out depth.
    The cutoff is the lower ``level``-quantile (inverse CDF) of that pooled
    sample, and a point is flagged iff its depth lies strictly below it. The
    rule behaves like a rank test: in a clean cloud roughly a ``level``
    fraction of points fall below the cutoff, and a few isolated points
    absorb that tail before any inlier does.
    """
    if not 0 < level < 1:
        raise InvalidLevel(f"level must lie in (0, 1), got {level}")
    if n_resamples < 1:
        raise ValueError("n_resamples must be at least 1")
    n = len(e)
    if n < 3:
        raise DataError(f"outlier detection needs at least 3 points, got {n}")
    loo = leave_one_out_depths(e.coords, method)
    rng = np.random.default_rng(seed)
    pooled = loo[rng.integers(0, n, size=(n_resamples, n))].ravel()
    threshold = float(np.quantile(pooled, level, method="inverted_cdf"))
    return DepthReport(
        e.labels,
        loo,
        method,
        "leave-one-out over the embedding",
        outlier_flags=loo < threshold,
        level=level,
        threshold=threshold,
        n_resamples=n_resamples,
        seed=seed,
    )


@dataclass(frozen=True)
class DepthGrid:
    """Depth evaluated on a regular ``ny x nx`` grid (rows follow y)."""

    x_range: tuple[float, float]
    y_range: tuple[float, float]
    resolution: tuple[int, int]
    values: np.ndarray
    method: str = "spatial"

    @property
    def xs(self) -> np.ndarray:
        return np.linspace(*self.x_range, self.resolution[0])

    @property
    def ys(self) -> np.ndarray:
        return np.linspace(*self.y_range, self.resolution[1])

    def to_csv(self, precision: int = 6) -> str:
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["y\\x", *(f"{x:.{precision}f}" for x in self.xs)])
        for y, row in zip(self.ys, self.values):
            writer.writerow([f"{y:.{precision}f}", *(f"{v:.{precision}f}" for v in row)])
        return out.getvalue()


def _expand(lo, hi, margin):
    width = hi - lo
    if width == 0:
        width = 1.0
    return float(lo - margin * width), float(hi + margin * width)


def depth_grid(
    e: Embedding,
    method: str = "spatial",
    resolution: tuple[int, int] = (200, 200),
    margin: float = 0.2,
) -> DepthGrid:
    """Depth surface over the embedding's bounding box, widened by ``margin`` per side."""
    if e.dimension != 2:
        raise DimensionUnsupported(f"depth grids need a 2-D embedding, got {e.dimension}-D")
    nx, ny = resolution
    if nx < 1 or ny < 1:
        raise ValueError("resolution must be positive")
    lo, hi = e.coords.min(axis=0), e.coords.max(axis=0)
    x_range = _expand(lo[0], hi[0], margin)
    y_range = _expand(lo[1], hi[1], margin)
    gx, gy = np.meshgrid(np.linspace(*x_range, nx), np.linspace(*y_range, ny))
    pts = np.column_stack([gx.ravel(), gy.ravel()])
    values = _depths(pts, e.coords, method).reshape(ny, nx)
    return DepthGrid(x_range, y_range, (nx, ny), values, method)
