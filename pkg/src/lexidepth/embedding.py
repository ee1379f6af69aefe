"""Embedding distance matrices in Euclidean space.

Two variants are provided:

* :func:`classical_mds`: Torgerson scaling. Double-centre the squared
  distances and keep the leading eigenvectors.
* :func:`nonmetric_mds`: Kruskal's rank-based scaling. Alternate a monotone
  (pool-adjacent-violators) fit of the disparities with a SMACOF Guttman
  transform of the configuration, minimizing stress-1.
"""

from __future__ import annotations

import csv
import io
import warnings
from dataclasses import dataclass, field

import numpy as np

from .distance import DistanceMatrix
from .errors import (
    DegenerateRanksWarning,
    DimensionMismatch,
    DimensionTooLarge,
    LabelMismatch,
    NonEuclideanWarning,
)
from .isotonic import pava


@dataclass(frozen=True)
class Embedding:
    """Coordinates of labelled points, one row per label.

    ``stress`` and ``stress_history`` are set by the non-metric fit,
    ``eigenvalues`` (all of them, descending) by classical scaling.
    """

    labels: tuple[str, ...]
    coords: np.ndarray
    method: str = "classical"
    stress: float | None = None
    stress_history: tuple[float, ...] = ()
    eigenvalues: np.ndarray | None = None
    notes: tuple[str, ...] = field(default=())

    def __post_init__(self):
        coords = np.atleast_2d(np.array(self.coords, dtype=float))
        if coords.shape[0] != len(self.labels):
            raise ValueError(f"{len(self.labels)} labels but {coords.shape[0]} rows")
        coords.setflags(write=False)
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "coords", coords)

    @property
    def dimension(self) -> int:
        return self.coords.shape[1]

    def __len__(self):
        return len(self.labels)

    def point(self, label: str) -> np.ndarray:
        return self.coords[self.labels.index(label)]

    def subset(self, labels) -> "Embedding":
        idx = [self.labels.index(lab) for lab in labels]
        return Embedding(tuple(labels), self.coords[idx], self.method)


def _check_dim(n, dim):
    if dim < 1:
        raise DimensionTooLarge(f"dimension must be positive, got {dim}")
    if dim > n - 1:
        raise DimensionTooLarge(f"cannot embed {n} points in {dim} dimensions (max {n - 1})")


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    # eigenvectors are defined up to sign; make the largest entry positive
    idx = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def double_centre(values: np.ndarray) -> np.ndarray:
    d2 = np.asarray(values, dtype=float) ** 2
    row = d2.mean(axis=1, keepdims=True)
    col = d2.mean(axis=0, keepdims=True)
    b = -0.5 * (d2 - row - col + d2.mean())
    return (b + b.T) / 2


def classical_mds(d: DistanceMatrix, dim: int = 2) -> Embedding:
    """Torgerson scaling into ``dim`` dimensions.

    Retained axes with negative eigenvalues get zero coordinates and raise
    :class:`NonEuclideanWarning`.
    """
    d.require_complete()
    n = len(d)
    _check_dim(n, dim)
    b = double_centre(d.values)
    # drop the trivial null axis along the constant vector: work in an
    # orthonormal basis of its complement, leaving n - 1 eigenpairs
    basis = np.linalg.eigh(np.eye(n) - 1.0 / n)[1][:, 1:]
    evals, evecs = np.linalg.eigh(basis.T @ b @ basis)
    evecs = basis @ evecs
    order = np.argsort(-evals, kind="stable")
    evals, evecs = evals[order], evecs[:, order]
    top = evals[:dim]
    tol = 1e-10 * max(np.abs(evals).max(), 1e-300)
    notes = ()
    if (top < -tol).any():
        bad = ", ".join(f"{v:.4g}" for v in top[top < -tol])
        msg = f"negative eigenvalue(s) {bad} among the {dim} retained axes"
        warnings.warn(msg, NonEuclideanWarning, stacklevel=2)
        notes = (msg,)
    vecs = _fix_signs(evecs[:, :dim])
    coords = vecs * np.sqrt(np.clip(top, 0.0, None))
    coords = coords - coords.mean(axis=0)
    return Embedding(d.labels, coords, "classical", eigenvalues=evals, notes=notes)


def _pdist(x: np.ndarray, iu) -> np.ndarray:
    diff = x[:, None, :] - x[None, :, :]
    return np.sqrt((diff**2).sum(axis=-1))[iu]


def _disparities(dist, delta):
    # Kruskal's primary treatment of ties: tied dissimilarities are ordered
    # by the current distances, so they may receive unequal fitted values
    order = np.lexsort((dist, delta))
    fitted = np.empty_like(dist)
    fitted[order] = pava(dist[order])
    return fitted


def _stress1(dist, fitted):
    denom = (dist**2).sum()
    if denom == 0:
        return 1.0
    return float(np.sqrt(((dist - fitted) ** 2).sum() / denom))


def _guttman(x, dist, target, iu):
    n = len(x)
    ratio = np.zeros_like(dist)
    ok = dist > 0
    ratio[ok] = target[ok] / dist[ok]
    bmat = np.zeros((n, n))
    bmat[iu] = -ratio
    bmat = bmat + bmat.T
    bmat[np.diag_indices(n)] = -bmat.sum(axis=1)
    return bmat @ x / n


def nonmetric_mds(
    d: DistanceMatrix,
    dim: int = 2,
    seed: int = 0,
    max_iter: int = 300,
    tol: float = 1e-10,
    init: str | np.ndarray = "classical",
) -> Embedding:
    """Kruskal non-metric scaling by SMACOF with monotone regression.

    Parameters
    ----------
    d : DistanceMatrix
        Complete dissimilarities; only their rank order matters.
    dim : int
        Target dimension.
    seed : int
        Seeds the random start (``init="random"``, or when the classical
        start collapses to a point).
    max_iter, tol : int, float
        Stop after ``max_iter`` Guttman updates or once stress-1 drops by
        less than ``tol`` in an iteration.
    init : {"classical", "random"} or array
        Starting configuration.

    Notes
    -----
    Disparities are rescaled to a fixed norm and the configuration to its
    optimal size after every update, so each step decreases raw stress and
    stress-1 is non-increasing. An update that would raise stress (rounding
    at convergence) is rejected and the fit stops.
    """
    if max_iter < 1:
        raise ValueError("max_iter must be at least 1")
    if tol <= 0:
        raise ValueError("tol must be positive")
    d.require_complete()
    n = len(d)
    _check_dim(n, dim)
    iu = np.triu_indices(n, k=1)
    delta = d.values[iu]
    if len(delta) < 2 or np.ptp(delta) == 0:
        warnings.warn(
            "all dissimilarities are equal; returning the classical solution",
            DegenerateRanksWarning,
            stacklevel=2,
        )
        return classical_mds(d, dim)

    rng = np.random.default_rng(seed)
    if isinstance(init, str) and init == "classical":
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", NonEuclideanWarning)
            x = np.array(classical_mds(d, dim).coords)
    elif isinstance(init, str) and init == "random":
        x = rng.standard_normal((n, dim))
    elif isinstance(init, str):
        raise ValueError(f"unknown init {init!r}")
    else:
        x = np.array(init, dtype=float)
        if x.shape != (n, dim):
            raise DimensionMismatch(f"initial configuration must be {(n, dim)}")
    x = x - x.mean(axis=0)
    if not _pdist(x, iu).any():
        x = rng.standard_normal((n, dim))

    norm_target = np.sqrt(len(delta))

    def rescaled(config):
        dist = _pdist(config, iu)
        fitted = _disparities(dist, delta)
        # size minimizing raw stress against the normalized disparities
        scale = norm_target * np.linalg.norm(fitted) / (dist**2).sum()
        return config * scale, dist * scale, fitted * scale

    x, dist, fitted = rescaled(x)
    stress = _stress1(dist, fitted)
    history = [stress]
    for _ in range(max_iter):
        norm = np.linalg.norm(fitted)
        if norm == 0 or stress == 0:
            break
        target = fitted * (norm_target / norm)
        x_new = _guttman(x, dist, target, iu)
        if not _pdist(x_new, iu).any():
            break
        x_new, dist_new, fitted_new = rescaled(x_new)
        stress_new = _stress1(dist_new, fitted_new)
        if stress_new > stress:
            break
        x, dist, fitted = x_new, dist_new, fitted_new
        history.append(stress_new)
        improvement = stress - stress_new
        stress = stress_new
        if improvement < tol:
            break
    x = x - x.mean(axis=0)
    return Embedding(d.labels, x, "nonmetric", stress=stress, stress_history=tuple(history))


def embed(d: DistanceMatrix, method: str = "classical", dim: int = 2, **kwargs) -> Embedding:
    if method == "classical":
        return classical_mds(d, dim)
    if method == "nonmetric":
        return nonmetric_mds(d, dim, **kwargs)
    raise ValueError(f"unknown MDS variant {method!r}")


def stress_by_dimension(d: DistanceMatrix, dims=(1, 2, 3), **kwargs) -> list[tuple[int, float]]:
    """Final non-metric stress for each candidate dimension (skips infeasible ones)."""
    out = []
    for k in dims:
        if 1 <= k <= len(d) - 1:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", DegenerateRanksWarning)
                e = nonmetric_mds(d, k, **kwargs)
            out.append((k, e.stress if e.stress is not None else float("nan")))
    return out


def procrustes_distance(a: Embedding, b: Embedding) -> float:
    """RMS point discrepancy after the best rotation, reflection and translation."""
    if a.labels != b.labels:
        raise LabelMismatch("embeddings have different labels")
    if a.dimension != b.dimension:
        raise DimensionMismatch(f"dimensions {a.dimension} and {b.dimension} differ")
    x = a.coords - a.coords.mean(axis=0)
    y = b.coords - b.coords.mean(axis=0)
    u, _, vt = np.linalg.svd(x.T @ y)
    diff = x @ (u @ vt) - y
    return float(np.sqrt((diff**2).sum() / len(x)))


def embedding_distances(e: Embedding) -> DistanceMatrix:
    diff = e.coords[:, None, :] - e.coords[None, :, :]
    return DistanceMatrix.from_array(e.labels, np.sqrt((diff**2).sum(axis=-1)))


def format_embedding(e: Embedding, precision: int = 9) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["label", *(f"x{i}" for i in range(1, e.dimension + 1))])
    fmt = f"{{:.{precision}f}}"
    for lab, row in zip(e.labels, e.coords):
        writer.writerow([lab, *(fmt.format(v + 0.0) for v in row)])
    return out.getvalue()


def parse_embedding(source) -> Embedding:
    if isinstance(source, str):
        source = io.StringIO(source)
    rows = [r for r in csv.reader(source) if r]
    labels = tuple(r[0] for r in rows[1:])
    coords = np.array([[float(v) for v in r[1:]] for r in rows[1:]]).reshape(len(labels), -1)
    return Embedding(labels, coords, "loaded")
