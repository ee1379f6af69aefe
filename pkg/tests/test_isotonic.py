import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from sklearn.isotonic import IsotonicRegression

from lexidepth.isotonic import pava

values = st.lists(st.floats(-100, 100, allow_nan=False), min_size=1, max_size=40)


def test_simple_pooling():
    assert pava([1, 3, 2, 4]).tolist() == [1, 2.5, 2.5, 4]
    assert pava([3, 2, 1]).tolist() == [2, 2, 2]


@settings(max_examples=100, deadline=None)
@given(values)
def test_matches_sklearn(y):
    y = np.array(y)
    ref = IsotonicRegression().fit_transform(np.arange(len(y)), y)
    out = pava(y)
    assert np.all(np.diff(out) >= -1e-9)
    assert np.allclose(out, ref, atol=1e-8)


@settings(max_examples=50, deadline=None)
@given(values, st.data())
def test_weighted_matches_sklearn(y, data):
    w = np.array(data.draw(st.lists(st.floats(0.1, 10), min_size=len(y), max_size=len(y))))
    ref = IsotonicRegression().fit_transform(np.arange(len(y)), y, sample_weight=w)
    assert np.allclose(pava(y, w), ref, atol=1e-7)
