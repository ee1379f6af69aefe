import json

import numpy as np
import pytest

from lexidepth.classify import class_depths, evaluate, fit, predict, predict_many, stratified_split
from lexidepth.embedding import Embedding
from lexidepth.errors import DegenerateClasses, DimensionMismatch, MissingClassLabel, SplitTooSmall


def two_classes(seed, per=30, gap=8.0):
    rng = np.random.default_rng(seed)
    pts = np.vstack([rng.normal(size=(per, 2)), rng.normal(size=(per, 2)) + [gap, 0]])
    labels = [f"p{i}" for i in range(2 * per)]
    classes = {lab: ("west" if i < per else "east") for i, lab in enumerate(labels)}
    return Embedding(labels, pts), classes


def test_predicts_deepest_class():
    e, classes = two_classes(0)
    m = fit(e, classes)
    assert m.classes == ("west", "east")
    assert predict(m, [0.0, 0.0]) == "west"
    assert predict(m, [8.0, 0.0]) == "east"
    dep = class_depths(m, [7.5, 0.3])
    assert m.classes[int(np.argmax(dep))] == predict(m, [7.5, 0.3])


def test_far_outsider_uses_nearest_neighbours():
    e, classes = two_classes(1)
    m = fit(e, classes, depth="l1")
    assert predict(m, [1e7, 1.0]) == "east"
    assert predict(m, [-1e7, 1.0]) == "west"


def test_invariant_under_similarity_transform():
    e, classes = two_classes(2, gap=3.0)
    rot = np.array([[0.0, -1.0], [1.0, 0.0]])
    moved = Embedding(e.labels, 2.5 * e.coords @ rot + 4)
    queries = np.random.default_rng(3).normal(size=(20, 2)) * 3
    a = predict_many(fit(e, classes), queries)
    b = predict_many(fit(moved, classes), 2.5 * queries @ rot + 4)
    assert a == b


def test_fit_errors():
    e, classes = two_classes(4)
    with pytest.raises(MissingClassLabel):
        fit(e, {k: v for k, v in list(classes.items())[:-1]})
    with pytest.raises(DegenerateClasses):
        fit(e, {k: "one" for k in classes})
    with pytest.raises(DimensionMismatch):
        class_depths(fit(e, classes), [1.0, 2.0, 3.0])


def test_stratified_split_sizes():
    e, classes = two_classes(5, per=10)
    rng = np.random.default_rng(0)
    train, test = stratified_split(e.labels, classes, 0.8, rng)
    assert len(train) == 16 and len(test) == 4
    assert sum(classes[e.labels[i]] == "west" for i in test) == 2
    with pytest.raises(SplitTooSmall):
        stratified_split(e.labels[:2], {"p0": "a", "p1": "b"}, 0.8, rng)


def test_evaluate_separated_and_deterministic():
    e, classes = two_classes(6)
    r = evaluate(e, classes, 0.8, seed=1, repeats=10)
    assert r.mean >= 0.95
    again = evaluate(e, classes, 0.8, seed=1, repeats=10)
    assert r.accuracies == again.accuracies
    assert r.confusion.sum() == r.test_sizes[0]
    doc = json.loads(r.to_json())
    assert doc["repeats"] == 10 and len(doc["accuracies"]) == 10
    assert "accuracy: mean" in r.to_text()


def test_evaluate_shuffled_labels_near_chance():
    e, classes = two_classes(7, per=40, gap=0.0)
    r = evaluate(e, classes, 0.8, seed=2, repeats=30)
    assert 0.3 <= r.mean <= 0.7
