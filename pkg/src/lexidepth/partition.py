"""Unsupervised grouping: k-medoids (PAM), trimmed L1-depth clustering, kNN.

The depth clustering is a relocation scheme. Start from PAM, then move
points whose *relative depth* is negative, i.e. points that are deeper in
some other cluster than in their own. Moving one point per pass keeps the
iteration deterministic and stops it from cycling. Finally drop the
least-deep points of each cluster as trimmed.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .depth import l1_depths
from .distance import DistanceMatrix
from .embedding import Embedding, embedding_distances
from .errors import InfeasibleClustering, InvalidK, LabelMismatch

TRIMMED = -1


@dataclass(frozen=True)
class Partition:
    """Cluster assignment over labels.

    ``assignment`` holds cluster ids ``1..k``, or :data:`TRIMMED` for points
    removed by trimming. ``centers`` lists one representative label per
    cluster (medoid or deepest point).
    """

    labels: tuple[str, ...]
    assignment: np.ndarray
    k: int
    within_depths: np.ndarray | None = None
    centers: tuple[str, ...] = ()
    objective: float | None = None
    method: str = ""
    objective_history: tuple[float, ...] = ()

    def __post_init__(self):
        assignment = np.asarray(self.assignment, dtype=int).copy()
        labels = tuple(self.labels)
        if assignment.shape != (len(labels),):
            raise ValueError("one cluster id per label required")
        kept = assignment[assignment != TRIMMED]
        if ((kept < 1) | (kept > self.k)).any():
            raise ValueError(f"cluster ids must lie in 1..{self.k}")
        if len(labels) and set(kept.tolist()) != set(range(1, self.k + 1)):
            raise ValueError("every cluster must be non-empty")
        assignment.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "assignment", assignment)

    @classmethod
    def from_mapping(cls, mapping, method: str = "given") -> "Partition":
        """Build from ``label -> cluster name``; ids follow first appearance."""
        ids: dict = {}
        assignment = [ids.setdefault(c, len(ids) + 1) for c in mapping.values()]
        return cls(tuple(mapping), np.array(assignment), len(ids), method=method)

    @property
    def trimmed(self) -> list[str]:
        return [lab for lab, a in zip(self.labels, self.assignment) if a == TRIMMED]

    def clusters(self) -> dict[int, list[str]]:
        out: dict[int, list[str]] = {c: [] for c in range(1, self.k + 1)}
        for lab, a in zip(self.labels, self.assignment):
            if a != TRIMMED:
                out[int(a)].append(lab)
        return out

    def to_csv(self, precision: int = 9) -> str:
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["label", "cluster", "within_depth", "trimmed"])
        for i, (lab, a) in enumerate(zip(self.labels, self.assignment)):
            dep = "" if self.within_depths is None else f"{self.within_depths[i]:.{precision}f}"
            writer.writerow([lab, "TRIMMED" if a == TRIMMED else int(a), dep, int(a == TRIMMED)])
        return out.getvalue()

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "k": self.k,
            "objective": self.objective,
            "centers": list(self.centers),
            "clusters": {str(c): labs for c, labs in self.clusters().items()},
            "trimmed": self.trimmed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------- k-medoids


def _pick(scores, best, rng):
    # deterministic given the seed; exact ties are the only randomness
    tied = np.flatnonzero(scores == best)
    return int(tied[0]) if len(tied) == 1 else int(rng.choice(tied))


def pam(d: DistanceMatrix, k: int, seed: int = 0) -> Partition:
    """Partitioning Around Medoids (BUILD then steepest-descent SWAP).

    Points go to their nearest medoid, ties to the medoid with the lower
    index. Clusters are numbered by medoid index. The objective is the total
    distance to the assigned medoids.
    """
    d.require_complete()
    n = len(d)
    if not 1 <= k <= n:
        raise InvalidK(f"k must lie in [1, {n}], got {k}")
    dist = np.asarray(d.values, dtype=float)
    rng = np.random.default_rng(seed)

    totals = dist.sum(axis=1)
    medoids = [_pick(totals, totals.min(), rng)]
    nearest = dist[:, medoids[0]].copy()
    for _ in range(1, k):
        gains = np.maximum(nearest[:, None] - dist, 0.0).sum(axis=0)
        gains[medoids] = -np.inf
        c = _pick(gains, gains.max(), rng)
        medoids.append(c)
        nearest = np.minimum(nearest, dist[:, c])

    cost = nearest.sum()
    history = [float(cost)]
    while True:
        is_medoid = np.zeros(n, dtype=bool)
        is_medoid[medoids] = True
        candidates = np.flatnonzero(~is_medoid)
        best = (cost, None, None)
        for pos in range(k):
            rest = [m for q, m in enumerate(medoids) if q != pos]
            base = dist[:, rest].min(axis=1) if rest else np.full(n, np.inf)
            costs = np.minimum(base[:, None], dist[:, candidates]).sum(axis=0)
            if len(costs) and costs.min() < best[0]:
                j = int(np.argmin(costs))
                best = (costs[j], pos, candidates[j])
        new_cost, pos, cand = best
        if pos is None or not new_cost < cost - 1e-12 * max(1.0, abs(cost)):
            break
        medoids[pos] = int(cand)
        cost = new_cost
        history.append(float(cost))

    medoids = sorted(medoids)
    assign = np.argmin(dist[:, medoids], axis=1)
    assign[medoids] = np.arange(k)
    objective = float(dist[np.arange(n), np.asarray(medoids)[assign]].sum())
    return Partition(
        d.labels,
        assign + 1,
        k,
        centers=tuple(d.labels[m] for m in medoids),
        objective=objective,
        method="pam",
        objective_history=tuple(history),
    )


# ------------------------------------------------------ trimmed depth clusters


def _depth_table(points, members, k):
    """L1 depth of every point with respect to every cluster's members."""
    table = np.zeros((len(points), k))
    for c in range(k):
        ref = points[members == c]
        if len(ref):
            table[:, c] = l1_depths(points, ref)
    return table


def _relative_depth(table, assign):
    own = table[np.arange(len(assign)), assign]
    if table.shape[1] == 1:
        return own
    others = table.copy()
    others[np.arange(len(assign)), assign] = -np.inf
    return own - others.max(axis=1)


def tdd_cluster(
    e: Embedding,
    k: int,
    trim_fraction: float = 0.1,
    seed: int = 0,
    max_iter: int = 100,
) -> Partition:
    """Trimmed clustering driven by L1 depth.

    Parameters
    ----------
    e : Embedding
        Points to cluster.
    k : int
        Number of clusters.
    trim_fraction : float
        Fraction of points (rounded down) removed as trimmed at the end.
    seed : int
        Seed for the PAM start.
    max_iter : int
        Maximum number of relocation passes.

    Returns
    -------
    Partition
        ``within_depths`` is each point's L1 depth in its own cluster after
        trimming (trimmed points: in the cluster they left), ``centers`` the
        deepest member of each cluster, ``objective`` the mean relative depth
        of the kept points and ``objective_history`` its value per pass.

    Notes
    -----
    A pass tries the points with negative relative depth, most negative
    first, and applies the first move that raises the mean relative depth.
    The history is therefore strictly increasing and the loop terminates.
    """
    n = len(e)
    if not 0 <= trim_fraction < 1:
        raise InfeasibleClustering(f"trim_fraction must lie in [0, 1), got {trim_fraction}")
    if max_iter < 1:
        raise ValueError("max_iter must be at least 1")
    n_trim = math.floor(trim_fraction * n + 1e-9)
    if k < 1 or k > n * (1 - trim_fraction) + 1e-9:
        raise InfeasibleClustering(
            f"cannot form {k} clusters from {n} points trimming {trim_fraction:.0%}"
        )
    points = np.asarray(e.coords, dtype=float)
    assign = pam(embedding_distances(e), k, seed).assignment - 1

    def objective_of(a):
        return float(_relative_depth(_depth_table(points, a, k), a).mean())

    objective = objective_of(assign)
    history = [objective]
    for _ in range(max_iter):
        table = _depth_table(points, assign, k)
        red = _relative_depth(table, assign)
        sizes = np.bincount(assign, minlength=k)
        moved = False
        for i in sorted(np.flatnonzero(red < 0), key=lambda i: (red[i], i)):
            if sizes[assign[i]] == 1:
                continue
            row = table[i].copy()
            row[assign[i]] = -np.inf
            trial = assign.copy()
            trial[i] = int(np.argmax(row))
            value = objective_of(trial)
            if value > objective:
                assign, objective, moved = trial, value, True
                history.append(objective)
                break
        if not moved:
            break

    table = _depth_table(points, assign, k)
    own = table[np.arange(n), assign]
    sizes = np.bincount(assign, minlength=k)
    trimmed = []
    for i in sorted(range(n), key=lambda i: (own[i], i)):
        if len(trimmed) == n_trim:
            break
        if sizes[assign[i]] > 1:
            trimmed.append(i)
            sizes[assign[i]] -= 1
    kept = np.ones(n, dtype=bool)
    kept[trimmed] = False

    members = np.where(kept, assign, -1)
    table = _depth_table(points, members, k)
    within = table[np.arange(n), assign]
    red = _relative_depth(table, assign)
    centers = []
    for c in range(k):
        idx = np.flatnonzero(kept & (assign == c))
        centers.append(e.labels[idx[np.argmax(within[idx])]])
    final = np.where(kept, assign + 1, TRIMMED)
    return Partition(
        e.labels,
        final,
        k,
        within_depths=within,
        centers=tuple(centers),
        objective=float(red[kept].mean()),
        method="tdd",
        objective_history=tuple(history),
    )


# ---------------------------------------------------------------- utilities


def knn_query(d: DistanceMatrix, target: str, k: int) -> list[str]:
    """The ``k`` labels closest to ``target``, nearest first, ties in label order."""
    i = d.index(target)
    n = len(d)
    if not 1 <= k <= n - 1:
        raise InvalidK(f"k must lie in [1, {n - 1}], got {k}")
    others = np.array([j for j in range(n) if j != i])
    order = np.argsort(d.values[i, others], kind="stable")
    return [d.labels[j] for j in others[order[:k]]]


class RandScores(NamedTuple):
    rand: float
    adjusted: float


def rand_index(a: Partition, b: Partition) -> RandScores:
    """Rand index and Hubert-Arabie adjusted Rand index.

    Labels trimmed in either partition are left out of both.
    """
    if set(a.labels) != set(b.labels) or len(a.labels) != len(b.labels):
        raise LabelMismatch("partitions cover different labels")
    pos = {lab: i for i, lab in enumerate(b.labels)}
    xa = np.asarray(a.assignment)
    xb = np.asarray(b.assignment)[[pos[lab] for lab in a.labels]]
    keep = (xa != TRIMMED) & (xb != TRIMMED)
    xa, xb = xa[keep], xb[keep]
    n = len(xa)
    total = n * (n - 1) / 2
    if total == 0:
        return RandScores(1.0, 1.0)

    def pairs(counts):
        counts = np.asarray(counts, dtype=float)
        return float((counts * (counts - 1) / 2).sum())

    _, joint = np.unique(np.column_stack([xa, xb]), axis=0, return_counts=True)
    both = pairs(joint)
    sum_a = pairs(np.unique(xa, return_counts=True)[1])
    sum_b = pairs(np.unique(xb, return_counts=True)[1])
    rand = (total + 2 * both - sum_a - sum_b) / total
    expected = sum_a * sum_b / total
    maximum = (sum_a + sum_b) / 2
    if maximum == expected:
        return RandScores(rand, 1.0)
    return RandScores(rand, (both - expected) / (maximum - expected))
