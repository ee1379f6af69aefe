"""Maximum-depth classification of embedded languages.

A query point goes to the class in which it is deepest. Far outside every
class all depths approach zero and the argmax is noise. Those points (and
exact depth ties) are decided by a majority vote of the nearest training
points instead.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .depth import METHODS, depths
from .embedding import Embedding
from .errors import DegenerateClasses, DimensionMismatch, MissingClassLabel, SplitTooSmall


@dataclass(frozen=True)
class ClassifierModel:
    classes: tuple[str, ...]
    training: Mapping[str, np.ndarray]
    depth_method: str = "spatial"
    fallback_k: int = 5
    outsider_threshold: float = 1e-6
    tie_tolerance: float = 1e-12

    @property
    def dimension(self) -> int:
        return next(iter(self.training.values())).shape[1]


def fit(
    e: Embedding,
    class_labels: Mapping[str, str],
    depth: str = "spatial",
    fallback_k: int = 5,
    outsider_threshold: float = 1e-6,
) -> ClassifierModel:
    """Store the training coordinates of each class (nothing is optimized)."""
    if depth not in METHODS:
        raise ValueError(f"depth method must be one of {METHODS}, got {depth!r}")
    if fallback_k < 1:
        raise ValueError("fallback_k must be positive")
    missing = [lab for lab in e.labels if lab not in class_labels]
    if missing:
        raise MissingClassLabel(f"no class for: {', '.join(missing)}")
    classes: list[str] = []
    for lab in e.labels:
        if class_labels[lab] not in classes:
            classes.append(class_labels[lab])
    if len(classes) < 2:
        raise DegenerateClasses(f"need at least two classes, got {classes}")
    training = {
        c: np.array([e.coords[i] for i, lab in enumerate(e.labels) if class_labels[lab] == c])
        for c in classes
    }
    return ClassifierModel(tuple(classes), training, depth, fallback_k, outsider_threshold)


def class_depths(m: ClassifierModel, x) -> np.ndarray:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.shape != (m.dimension,):
        raise DimensionMismatch(f"query has shape {x.shape}, model dimension is {m.dimension}")
    return np.array([depths(x[None, :], m.training[c], m.depth_method)[0] for c in m.classes])


def _nearest_vote(m: ClassifierModel, x: np.ndarray) -> str:
    pts = np.vstack([m.training[c] for c in m.classes])
    owner = [c for c in m.classes for _ in range(len(m.training[c]))]
    dist = np.sqrt(((pts - x) ** 2).sum(axis=1))
    order = np.argsort(dist, kind="stable")[: m.fallback_k]
    votes = {c: 0 for c in m.classes}
    for i in order:
        votes[owner[i]] += 1
    top = max(votes.values())
    leaders = {c for c, v in votes.items() if v == top}
    # among tied classes, the one holding the nearest neighbour wins
    return next(owner[i] for i in order if owner[i] in leaders)


def predict(m: ClassifierModel, x) -> str:
    """Class in which ``x`` is deepest, with a nearest-neighbour fallback."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    dep = class_depths(m, x)
    best = dep.max()
    leaders = np.flatnonzero(dep >= best - m.tie_tolerance)
    if best < m.outsider_threshold or len(leaders) > 1:
        return _nearest_vote(m, x)
    return m.classes[int(leaders[0])]


def predict_many(m: ClassifierModel, points) -> list[str]:
    return [predict(m, x) for x in np.atleast_2d(np.asarray(points, dtype=float))]


@dataclass(frozen=True)
class EvaluationReport:
    classes: tuple[str, ...]
    accuracies: tuple[float, ...]
    confusion: np.ndarray
    split_fraction: float
    seed: int
    depth_method: str
    test_sizes: tuple[int, ...] = field(default=())

    @property
    def mean(self) -> float:
        return float(np.mean(self.accuracies))

    @property
    def std(self) -> float:
        if len(self.accuracies) < 2:
            return 0.0
        return float(np.std(self.accuracies, ddof=1))

    def to_dict(self) -> dict:
        return {
            "classes": list(self.classes),
            "accuracies": list(self.accuracies),
            "mean": self.mean,
            "std": self.std,
            "confusion_first_repeat": self.confusion.tolist(),
            "split_fraction": self.split_fraction,
            "seed": self.seed,
            "repeats": len(self.accuracies),
            "depth_method": self.depth_method,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_text(self) -> str:
        width = max(len(c) for c in self.classes)
        lines = [
            f"max-depth classification ({self.depth_method} depth)",
            f"split {self.split_fraction:.2f} train, {len(self.accuracies)} repeat(s), seed {self.seed}",
            f"accuracy: mean {self.mean:.4f}, sd {self.std:.4f}",
            "",
            "confusion matrix of the first repeat (rows = true class):",
            " " * width + "  " + "  ".join(c.rjust(width) for c in self.classes),
        ]
        for c, row in zip(self.classes, self.confusion):
            lines.append(c.ljust(width) + "  " + "  ".join(str(v).rjust(width) for v in row))
        return "\n".join(lines) + "\n"


def stratified_split(labels, class_labels, split_fraction, rng):
    """Per-class random split; returns (train indices, test indices)."""
    train, test = [], []
    classes = list(dict.fromkeys(class_labels[lab] for lab in labels))
    for c in classes:
        idx = np.array([i for i, lab in enumerate(labels) if class_labels[lab] == c])
        idx = rng.permutation(idx)
        n_train = int(np.floor(split_fraction * len(idx) + 0.5))
        n_train = min(n_train, len(idx))
        if n_train == 0:
            raise SplitTooSmall(f"class {c!r} gets no training points")
        train.extend(idx[:n_train].tolist())
        test.extend(idx[n_train:].tolist())
    if not test:
        raise SplitTooSmall("the split leaves no test points")
    return sorted(train), sorted(test)


def evaluate(
    e: Embedding,
    class_labels: Mapping[str, str],
    split_fraction: float = 0.8,
    seed: int = 0,
    repeats: int = 1,
    depth: str = "spatial",
    fallback_k: int = 5,
) -> EvaluationReport:
    """Repeated stratified holdout accuracy of the max-depth classifier."""
    if not 0 < split_fraction < 1:
        raise ValueError(f"split_fraction must lie in (0, 1), got {split_fraction}")
    if repeats < 1:
        raise ValueError("repeats must be at least 1")
    missing = [lab for lab in e.labels if lab not in class_labels]
    if missing:
        raise MissingClassLabel(f"no class for: {', '.join(missing)}")
    classes = tuple(dict.fromkeys(class_labels[lab] for lab in e.labels))
    if len(classes) < 2:
        raise DegenerateClasses(f"need at least two classes, got {list(classes)}")
    rng = np.random.default_rng(seed)
    accuracies = []
    confusion = None
    sizes = []
    for _ in range(repeats):
        train, test = stratified_split(e.labels, class_labels, split_fraction, rng)
        model = fit(e.subset([e.labels[i] for i in train]), class_labels, depth, fallback_k)
        truth = [class_labels[e.labels[i]] for i in test]
        guess = predict_many(model, e.coords[test])
        accuracies.append(float(np.mean([t == g for t, g in zip(truth, guess)])))
        sizes.append(len(test))
        if confusion is None:
            confusion = np.zeros((len(classes), len(classes)), dtype=int)
            for t, g in zip(truth, guess):
                confusion[classes.index(t), classes.index(g)] += 1
    return EvaluationReport(
        classes, tuple(accuracies), confusion, split_fraction, seed, depth, tuple(sizes)
    )
