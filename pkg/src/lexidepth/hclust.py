"""Agglomerative hierarchical clustering with single, complete and average linkage.

Nodes are numbered like scipy's linkage output: leaves are ``0..n-1`` and the
merge at step ``s`` creates node ``n + s``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .distance import DistanceMatrix
from .errors import InvalidK
from .partition import Partition

LINKAGES = ("single", "complete", "average")


class Merge(NamedTuple):
    left: int
    right: int
    height: float
    size: int


@dataclass(frozen=True)
class Dendrogram:
    leaves: tuple[str, ...]
    merges: tuple[Merge, ...]
    linkage: str = "average"

    @property
    def n(self) -> int:
        return len(self.leaves)

    def members(self, node: int) -> list[int]:
        """Leaf indices below ``node`` in left-to-right order."""
        stack, out = [node], []
        while stack:
            v = stack.pop()
            if v < self.n:
                out.append(v)
            else:
                m = self.merges[v - self.n]
                stack.append(m.right)
                stack.append(m.left)
        return out


def agglomerate(d: DistanceMatrix, linkage: str = "average") -> Dendrogram:
    """Merge the closest pair of clusters until one remains.

    Inter-cluster distances are updated with the Lance-Williams recurrence.
    Each cluster lives in the row of its smallest leaf index; among pairs at
    the minimal distance the lowest (row, column) pair wins.
    """
    if linkage not in LINKAGES:
        raise ValueError(f"linkage must be one of {LINKAGES}, got {linkage!r}")
    d.require_complete()
    n = len(d)
    dist = np.array(d.values, dtype=float)
    active = np.ones(n, dtype=bool)
    node = list(range(n))
    size = [1] * n
    upper = np.triu(np.ones((n, n), dtype=bool), k=1)
    merges = []
    for step in range(n - 1):
        mask = upper & active[:, None] & active[None, :]
        flat = np.where(mask, dist, np.inf)
        # the Lance-Williams update can split exact ties by an ulp, so values
        # within a relative 1e-12 of the minimum count as tied
        low = flat.min()
        tied = flat <= low + 1e-12 * max(1.0, abs(low))
        i, j = divmod(int(np.argmax(tied)), n)
        height = float(dist[i, j])
        ni, nj = size[i], size[j]
        others = active.copy()
        others[[i, j]] = False
        if linkage == "single":
            new = np.minimum(dist[i], dist[j])
        elif linkage == "complete":
            new = np.maximum(dist[i], dist[j])
        else:
            new = (ni * dist[i] + nj * dist[j]) / (ni + nj)
        dist[i, others] = new[others]
        dist[others, i] = new[others]
        active[j] = False
        merges.append(Merge(node[i], node[j], height, ni + nj))
        node[i] = n + step
        size[i] = ni + nj
    return Dendrogram(d.labels, tuple(merges), linkage)


def cut(t: Dendrogram, k: int) -> Partition:
    """Flat clustering obtained by undoing the ``k - 1`` last merges.

    Clusters are numbered 1..k in order of their first leaf.
    """
    n = t.n
    if not 1 <= k <= max(n, 1):
        raise InvalidK(f"k must lie in [1, {n}], got {k}")
    parent = list(range(2 * n))

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for s, m in enumerate(t.merges[: n - k]):
        parent[find(m.left)] = n + s
        parent[find(m.right)] = n + s
    ids: dict[int, int] = {}
    assignment = []
    for leaf in range(n):
        root = find(leaf)
        ids.setdefault(root, len(ids) + 1)
        assignment.append(ids[root])
    return Partition(t.leaves, np.array(assignment), k, method=f"cut-{t.linkage}")


def cophenetic(t: Dendrogram) -> DistanceMatrix:
    """Height of the lowest merge joining each pair of leaves."""
    n = t.n
    out = np.zeros((n, n))
    for s, m in enumerate(t.merges):
        left = t.members(m.left)
        right = t.members(m.right)
        out[np.ix_(left, right)] = m.height
        out[np.ix_(right, left)] = m.height
    return DistanceMatrix.from_array(t.leaves, out)


def cophenetic_correlation(d: DistanceMatrix, t: Dendrogram) -> float:
    """Pearson correlation between input distances and cophenetic distances."""
    c = cophenetic(t).submatrix(d.labels).values
    iu = np.triu_indices(len(d), k=1)
    a, b = d.values[iu], c[iu]
    if len(a) < 2 or a.std() == 0 or b.std() == 0:
        return float("nan")
    return float(np.corrcoef(a, b)[0, 1])


_SPECIAL = re.compile(r"[\s()\[\]':;,_]")


def _quote(label: str) -> str:
    # underscores are quoted too: unquoted they read back as blanks
    if label and not _SPECIAL.search(label):
        return label
    return "'" + label.replace("'", "''") + "'"


def to_newick(t: Dendrogram, precision: int = 6) -> str:
    """Newick string (labels quoted where needed); branch lengths are height differences."""
    n = t.n
    if n == 0:
        return ";"
    if n == 1:
        return _quote(t.leaves[0]) + ";"
    heights = [0.0] * n + [m.height for m in t.merges]
    fmt = f"{{:.{precision}f}}"

    def render(v, parent_height):
        length = fmt.format(max(parent_height - heights[v], 0.0))
        if v < n:
            return f"{_quote(t.leaves[v])}:{length}"
        m = t.merges[v - n]
        return f"({render(m.left, heights[v])},{render(m.right, heights[v])}):{length}"

    root = 2 * n - 2
    m = t.merges[-1]
    return f"({render(m.left, heights[root])},{render(m.right, heights[root])});"


_TOKEN = re.compile(r"\s*('(?:[^']|'')*'|[(),:;]|[^(),:;'\s]+)")


def parse_newick(text: str):
    """Parse Newick text into nested tuples.

    Leaves become ``(label, length)``; internal nodes ``(children, length)``
    where ``children`` is a list. Raises ValueError on malformed input.
    """
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ValueError(f"bad newick near position {pos}")
        tokens.append(m.group(1))
        pos = m.end()
    tokens.reverse()

    def take():
        if not tokens:
            raise ValueError("unexpected end of newick")
        return tokens.pop()

    def peek():
        return tokens[-1] if tokens else None

    def length():
        if peek() == ":":
            take()
            return float(take())
        return None

    def node():
        if peek() == "(":
            take()
            children = [node()]
            while peek() == ",":
                take()
                children.append(node())
            if take() != ")":
                raise ValueError("expected ')'")
            if peek() not in (":", ",", ")", ";", None):
                take()  # internal node name, ignored
            return (children, length())
        tok = take()
        if tok in "(),:;":
            raise ValueError(f"unexpected {tok!r}")
        if tok.startswith("'"):
            tok = tok[1:-1].replace("''", "'")
        return (tok, length())

    tree = node()
    if take() != ";" or tokens:
        raise ValueError("trailing content after newick tree")
    return tree


def newick_leaves(tree) -> list[str]:
    body, _ = tree
    if isinstance(body, str):
        return [body]
    return [leaf for child in body for leaf in newick_leaves(child)]
