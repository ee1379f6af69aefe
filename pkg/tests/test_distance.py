import itertools
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lexidepth.cli import sample_path
from lexidepth.corpus import WordList, parse_wordlist, read_wordlist
from lexidepth.distance import (
    DistanceMatrix,
    averaged_matrix,
    form_distance,
    format_matrix,
    levenshtein,
    parse_matrix,
    per_meaning_matrix,
)
from lexidepth.errors import IncompleteMatrix, InsufficientSupport, UnknownLabel
from oracles import levenshtein_recursive

GOLDEN = Path(__file__).parent / "golden" / "sample_distances_4x4.csv"


@pytest.mark.parametrize(
    "p, q, expected",
    [
        ("", "", 0),
        ("", "abc", 3),
        ("kitten", "sitting", 3),
        ("flaw", "lawn", 2),
        ("omnis", "tot", 5),
        ("mare", "mari", 1),
        ("abc", "abc", 0),
    ],
)
def test_levenshtein_known_values(p, q, expected):
    assert levenshtein(p, q) == expected
    assert levenshtein(q, p) == expected


def test_levenshtein_accepts_sequences():
    assert levenshtein(("t", "s", "a"), ("t", "a")) == 1


def test_levenshtein_matches_recursion_on_small_alphabet():
    words = ["".join(w) for n in range(4) for w in itertools.product("ab", repeat=n)]
    for p, q in itertools.product(words, repeat=2):
        assert levenshtein(p, q) == levenshtein_recursive(p, q)


@settings(max_examples=200, deadline=None)
@given(st.text("abcd", max_size=8), st.text("abcd", max_size=8), st.text("abcd", max_size=8))
def test_levenshtein_metric_properties(p, q, r):
    d = levenshtein
    assert d(p, q) == d(q, p)
    assert (d(p, q) == 0) == (p == q)
    assert d(p, r) <= d(p, q) + d(q, r)
    assert abs(len(p) - len(q)) <= d(p, q) <= max(len(p), len(q))


def test_length_normalisation():
    assert form_distance("ab", "abcd", "length") == pytest.approx(0.5)
    assert form_distance("", "", "length") == 0.0
    with pytest.raises(ValueError):
        form_distance("a", "b", "bogus")


def test_averaged_matrix_uses_shared_meanings_only():
    wl = parse_wordlist("m\tA\tB\tC\nx\taa\tab\t?\ny\tb\tbbb\tc\n")
    dm = averaged_matrix(wl)
    assert dm["A", "B"] == pytest.approx((1 + 2) / 2)
    assert dm["A", "C"] == pytest.approx(1.0)
    assert dm.support[0, 1] == 2 and dm.support[0, 2] == 1
    assert np.all(np.diag(dm.values) == 0)


def test_min_support_enforced_or_nan():
    wl = parse_wordlist("m\tA\tB\nx\ta\t?\n")
    with pytest.raises(InsufficientSupport) as info:
        averaged_matrix(wl)
    assert info.value.support == 0
    dm = averaged_matrix(wl, min_support=0)
    assert np.isnan(dm["A", "B"]) and not dm.is_complete
    with pytest.raises(IncompleteMatrix):
        dm.require_complete()
    assert "NA" in format_matrix(dm)


def test_average_equals_mean_of_per_meaning_matrices():
    wl = read_wordlist(sample_path())
    stack = np.stack([per_meaning_matrix(wl, m).values for m in wl.meanings])
    assert np.allclose(averaged_matrix(wl).values, stack.mean(axis=0), atol=1e-12)


def test_sample_matches_golden_submatrix():
    golden = parse_matrix(GOLDEN.read_text())
    dm = averaged_matrix(read_wordlist(sample_path())).submatrix(golden.labels)
    assert parse_matrix(format_matrix(dm)).values.tolist() == golden.values.tolist()


def test_format_parse_roundtrip_and_support():
    dm = averaged_matrix(read_wordlist(sample_path()))
    back = parse_matrix(format_matrix(dm, precision=12))
    assert back.labels == dm.labels
    assert np.allclose(back.values, dm.values, atol=1e-12)
    assert format_matrix(dm, which="support").splitlines()[1].endswith(",7,7,7,7")


def test_matrix_indexing_and_errors():
    dm = DistanceMatrix.from_array(["a", "b"], [[0, 1], [1, 0]])
    assert dm["a", "b"] == 1.0
    with pytest.raises(UnknownLabel):
        dm.index("z")
    with pytest.raises(ValueError):
        dm.values[0, 1] = 5
    with pytest.raises(ValueError):
        DistanceMatrix.from_array(["a", "b"], [[0, 1], [2, 0]])


def test_labels_permute_with_matrix():
    dm = averaged_matrix(read_wordlist(sample_path()))
    order = list(reversed(dm.labels))
    sub = dm.submatrix(order)
    for a, b in itertools.product(order, repeat=2):
        assert sub[a, b] == dm[a, b]


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 6), st.integers(1, 6), st.data())
def test_averaged_matrix_is_a_metric(n_lang, n_mean, data):
    words = st.text("xyz", min_size=1, max_size=5)
    langs = tuple(f"L{i}" for i in range(n_lang))
    means = tuple(f"m{i}" for i in range(n_mean))
    forms = {(m, lang): data.draw(words) for m in means for lang in langs}
    v = averaged_matrix(WordList(means, langs, forms)).values
    assert np.array_equal(v, v.T)
    assert np.all(np.diag(v) == 0)
    for i, j, k in itertools.product(range(n_lang), repeat=3):
        assert v[i, k] <= v[i, j] + v[j, k] + 1e-12
