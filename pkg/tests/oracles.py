"""Slow, obviously-correct reference implementations used only by the tests."""

from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np


@lru_cache(maxsize=None)
def levenshtein_recursive(p: str, q: str) -> int:
    """Head/tail recursion on the first symbols, memoized across calls."""
    if not p:
        return len(q)
    if not q:
        return len(p)
    if p[0] == q[0]:
        return levenshtein_recursive(p[1:], q[1:])
    return 1 + min(
        levenshtein_recursive(p[1:], q),
        levenshtein_recursive(p, q[1:]),
        levenshtein_recursive(p[1:], q[1:]),
    )


def hclust_reference(dist: np.ndarray, linkage: str):
    """Agglomeration recomputing every cluster distance from the leaves.

    Returns a list of ``(left members, right members, height)`` where the
    left cluster is the one with the smaller minimal leaf. Ties go to the
    lowest (row, column) pair, a cluster's row being its smallest leaf.
    """
    n = len(dist)
    clusters = [[i] for i in range(n)]
    out = []
    while len(clusters) > 1:
        best = None
        ordered = sorted(clusters, key=min)
        for a, b in itertools.combinations(ordered, 2):
            block = dist[np.ix_(a, b)]
            if linkage == "single":
                h = block.min()
            elif linkage == "complete":
                h = block.max()
            else:
                h = block.mean()
            key = (h, min(a), min(b))
            if best is None or key < best[0]:
                best = (key, a, b)
        (h, _, _), a, b = best
        out.append((sorted(a), sorted(b), float(h)))
        clusters = [c for c in clusters if c is not a and c is not b] + [a + b]
    return out


def pam_exhaustive_cost(dist: np.ndarray, k: int) -> float:
    """Globally optimal k-medoids cost by enumerating every medoid set."""
    n = len(dist)
    return min(dist[:, list(m)].min(axis=1).sum() for m in itertools.combinations(range(n), k))


def rand_pairs(a, b) -> tuple[float, float]:
    """Rand index and ARI by explicit pair counting and the contingency formula."""
    a, b = list(a), list(b)
    n = len(a)
    agree = 0
    total = 0
    for i, j in itertools.combinations(range(n), 2):
        total += 1
        agree += (a[i] == a[j]) == (b[i] == b[j])
    rand = agree / total if total else 1.0
    ua, ub = sorted(set(a)), sorted(set(b))
    table = np.array([[sum(1 for x, y in zip(a, b) if x == p and y == q) for q in ub] for p in ua])

    def c2(x):
        return x * (x - 1) / 2

    index = c2(table).sum()
    sa, sb = c2(table.sum(axis=1)).sum(), c2(table.sum(axis=0)).sum()
    expected = sa * sb / c2(n) if n > 1 else 0.0
    maximum = (sa + sb) / 2
    ari = 1.0 if maximum == expected else (index - expected) / (maximum - expected)
    return rand, float(ari)


def l1_depth_by_optimisation(y, ref, tol: float = 1e-5) -> float:
    """L1 depth as one minus the smallest extra weight at ``y`` that makes
    ``y`` the weighted L1 median, found by bisection with a numerical
    minimiser as the membership test.
    """
    from scipy.optimize import minimize

    y = np.asarray(y, dtype=float)
    ref = np.asarray(ref, dtype=float)
    n = len(ref)

    def is_median(w):
        def f(z):
            return np.linalg.norm(ref - z, axis=1).sum() / n + w * np.linalg.norm(z - y)

        base = f(y)
        scale = np.linalg.norm(ref - y, axis=1).max() + 1.0
        for direction in np.vstack([np.eye(len(y)), -np.eye(len(y))]):
            start = y + 1e-3 * scale * direction
            res = minimize(f, start, method="Nelder-Mead", options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 4000})
            if res.fun < base - 1e-9 * scale:
                return False
        return True

    lo, hi = 0.0, 1.0
    if is_median(0.0):
        return 1.0
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if is_median(mid):
            hi = mid
        else:
            lo = mid
    return 1.0 - hi
