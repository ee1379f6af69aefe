"""Levenshtein distances and averaged inter-language distance matrices."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .corpus import WordList
from .errors import DataError, IncompleteMatrix, InsufficientSupport, UnknownLabel, UnknownMeaning

NORMALIZATIONS = (None, "length")


def levenshtein(p: Sequence, q: Sequence) -> int:
    """Minimum number of insertions, deletions and substitutions turning p into q.

    Works on any pair of sequences of hashable symbols; for strings that means
    Unicode scalar values. Uses a single rolling row of length
    ``min(len(p), len(q)) + 1``.

    >>> levenshtein("tsanusa", "cenusa")
    3
    """
    if len(p) < len(q):
        p, q = q, p
    # common prefix and suffix never cost anything
    start = 0
    limit = len(q)
    while start < limit and p[start] == q[start]:
        start += 1
    end_p, end_q = len(p), len(q)
    while end_q > start and p[end_p - 1] == q[end_q - 1]:
        end_p -= 1
        end_q -= 1
    p = p[start:end_p]
    q = q[start:end_q]
    if not q:
        return len(p)

    row = list(range(len(q) + 1))
    for i, a in enumerate(p, 1):
        diag, row[0] = row[0], i
        for j, b in enumerate(q, 1):
            best = diag if a == b else diag + 1
            if row[j] + 1 < best:
                best = row[j] + 1
            if row[j - 1] + 1 < best:
                best = row[j - 1] + 1
            diag, row[j] = row[j], best
    return row[-1]


def form_distance(p: str, q: str, normalize: str | None = None) -> float:
    """Edit distance, optionally divided by the longer length."""
    d = levenshtein(p, q)
    if normalize is None:
        return float(d)
    if normalize == "length":
        longest = max(len(p), len(q))
        return d / longest if longest else 0.0
    raise ValueError(f"unknown normalization {normalize!r}")


@dataclass(frozen=True)
class DistanceMatrix:
    """Symmetric, zero-diagonal matrix over a label set.

    ``values`` holds NaN where a pair has no support. ``support`` counts the
    meanings that contributed to each entry.
    """

    labels: tuple[str, ...]
    values: np.ndarray
    support: np.ndarray

    def __post_init__(self):
        labels = tuple(self.labels)
        values = np.array(self.values, dtype=float)
        n = len(labels)
        if values.shape != (n, n):
            raise DataError(f"matrix shape {values.shape} does not match {n} labels")
        if self.support is None:
            support = np.where(np.isnan(values), 0, 1).astype(int)
        else:
            support = np.array(self.support, dtype=int)
        if len(set(labels)) != n:
            raise DataError("duplicate labels in distance matrix")
        if not np.array_equal(values, values.T, equal_nan=True):
            raise DataError("distance matrix is not symmetric")
        if np.any(np.diag(values) != 0) or np.any(values < 0):
            raise DataError("distances must be non-negative with a zero diagonal")
        values.setflags(write=False)
        support.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "support", support)

    @classmethod
    def from_array(cls, labels, values) -> "DistanceMatrix":
        return cls(tuple(labels), values, None)

    def __len__(self):
        return len(self.labels)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise UnknownLabel(label) from None

    def __getitem__(self, pair) -> float:
        a, b = pair
        return float(self.values[self.index(a), self.index(b)])

    @property
    def is_complete(self) -> bool:
        return not np.isnan(self.values).any()

    def require_complete(self):
        if not self.is_complete:
            i, j = np.argwhere(np.isnan(self.values))[0]
            raise IncompleteMatrix(
                f"undefined distance between {self.labels[i]!r} and {self.labels[j]!r}"
            )
        return self

    def submatrix(self, labels: Sequence[str]) -> "DistanceMatrix":
        idx = [self.index(lab) for lab in labels]
        sub = np.ix_(idx, idx)
        return DistanceMatrix(tuple(labels), self.values[sub], self.support[sub])


def per_meaning_matrix(
    wl: WordList, meaning: str, normalize: str | None = None
) -> DistanceMatrix:
    """Distances between the languages' forms for a single meaning."""
    if meaning not in wl.meanings:
        raise UnknownMeaning(meaning)
    n = len(wl.languages)
    values = np.full((n, n), np.nan)
    support = np.zeros((n, n), dtype=int)
    np.fill_diagonal(values, 0.0)
    forms = [wl.form(meaning, lang) for lang in wl.languages]
    for i in range(n):
        if forms[i] is None:
            continue
        for j in range(i + 1, n):
            if forms[j] is None:
                continue
            values[i, j] = values[j, i] = form_distance(forms[i], forms[j], normalize)
            support[i, j] = support[j, i] = 1
    return DistanceMatrix(wl.languages, values, support)


def averaged_matrix(
    wl: WordList, min_support: int = 1, normalize: str | None = None
) -> DistanceMatrix:
    """Mean per-meaning distance for every language pair.

    Each pair is averaged over the meanings for which both languages have a
    form. Sums are accumulated in meaning order so results are reproducible
    to the bit. Pairs with fewer than ``min_support`` shared meanings raise
    :class:`InsufficientSupport`; ``min_support=0`` leaves them as NaN.
    """
    n = len(wl.languages)
    sums = np.zeros((n, n))
    support = np.zeros((n, n), dtype=int)
    for meaning in wl.meanings:
        forms = [wl.form(meaning, lang) for lang in wl.languages]
        present = [i for i, f in enumerate(forms) if f is not None]
        for a, i in enumerate(present):
            for j in present[a + 1:]:
                sums[i, j] += form_distance(forms[i], forms[j], normalize)
                support[i, j] += 1
    sums = sums + sums.T
    support = support + support.T
    for i in range(n):
        for j in range(i + 1, n):
            if support[i, j] < min_support:
                raise InsufficientSupport(
                    (wl.languages[i], wl.languages[j]), int(support[i, j]), min_support
                )
    with np.errstate(invalid="ignore", divide="ignore"):
        values = np.where(support > 0, sums / np.maximum(support, 1), np.nan)
    np.fill_diagonal(values, 0.0)
    return DistanceMatrix(wl.languages, values, support)


def format_matrix(
    dm: DistanceMatrix,
    precision: int = 6,
    delimiter: str = ",",
    which: str = "values",
) -> str:
    """Render as delimited text with a label header row and label column."""
    out = io.StringIO()
    writer = csv.writer(out, delimiter=delimiter, lineterminator="\n")
    writer.writerow(["", *dm.labels])
    if which == "values":
        fmt = f"{{:.{precision}f}}"
        for lab, row in zip(dm.labels, dm.values):
            writer.writerow([lab, *("NA" if np.isnan(v) else fmt.format(v) for v in row)])
    elif which == "support":
        for lab, row in zip(dm.labels, dm.support):
            writer.writerow([lab, *(str(int(v)) for v in row)])
    else:
        raise ValueError(which)
    return out.getvalue()


def parse_matrix(source, delimiter: str = ",") -> DistanceMatrix:
    """Read a matrix written by :func:`format_matrix`."""
    if isinstance(source, str):
        source = io.StringIO(source)
    rows = [r for r in csv.reader(source, delimiter=delimiter) if r]
    if not rows:
        raise DataError("empty matrix file")
    labels = tuple(rows[0][1:])
    body = rows[1:]
    if len(body) != len(labels):
        raise DataError(f"{len(labels)} column labels but {len(body)} rows")
    values = np.empty((len(labels), len(labels)))
    for i, row in enumerate(body):
        if row[0] != labels[i] or len(row) != len(labels) + 1:
            raise DataError(f"row {i + 2}: label or width does not match header")
        values[i] = [np.nan if c == "NA" else float(c) for c in row[1:]]
    if not np.allclose(values, values.T, equal_nan=True):
        raise DataError("matrix is not symmetric")
    return DistanceMatrix.from_array(labels, values)
