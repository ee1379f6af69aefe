"""Least-squares isotonic regression by pool adjacent violators."""

from __future__ import annotations

import numpy as np


def pava(y, weights=None) -> np.ndarray:
    """Non-decreasing sequence closest to ``y`` in weighted least squares.

    Runs in linear time with a stack of pooled blocks.

    >>> pava([1.0, 3.0, 2.0, 4.0]).tolist()
    [1.0, 2.5, 2.5, 4.0]
    """
    y = np.asarray(y, dtype=float)
    n = len(y)
    if n <= 1:
        return y.copy()
    w = np.ones(n) if weights is None else np.asarray(weights, dtype=float)
    if w.shape != y.shape or (w <= 0).any():
        raise ValueError("weights must be positive and match y")

    means = np.empty(n)
    wsum = np.empty(n)
    count = np.empty(n, dtype=int)
    top = -1
    for i in range(n):
        top += 1
        means[top], wsum[top], count[top] = y[i], w[i], 1
        while top > 0 and means[top - 1] > means[top]:
            total = wsum[top - 1] + wsum[top]
            means[top - 1] = (wsum[top - 1] * means[top - 1] + wsum[top] * means[top]) / total
            wsum[top - 1] = total
            count[top - 1] += count[top]
            top -= 1
    return np.repeat(means[: top + 1], count[: top + 1])
