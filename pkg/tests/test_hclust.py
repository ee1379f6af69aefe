import numpy as np
import pytest
from scipy.cluster.hierarchy import cophenet, fcluster, linkage
from scipy.spatial.distance import squareform

from lexidepth.distance import DistanceMatrix
from lexidepth.errors import IncompleteMatrix, InvalidK
from lexidepth.hclust import (
    agglomerate,
    cophenetic,
    cophenetic_correlation,
    cut,
    newick_leaves,
    parse_newick,
    to_newick,
)
from oracles import hclust_reference


def random_matrix(rng, n, integer=False):
    x = rng.integers(0, 4, (n, n)).astype(float) if integer else rng.random((n, n))
    x = np.triu(x, 1)
    return x + x.T


def merges_as_sets(t):
    return [(sorted(t.members(m.left)), sorted(t.members(m.right)), m.height) for m in t.merges]


def dm(x):
    return DistanceMatrix.from_array([f"L{i}" for i in range(len(x))], x)


@pytest.mark.parametrize("method", ["single", "complete", "average"])
def test_matches_reference_on_continuous_input(method):
    rng = np.random.default_rng(7)
    for _ in range(60):
        x = random_matrix(rng, int(rng.integers(2, 9)))
        ours = merges_as_sets(agglomerate(dm(x), method))
        ref = hclust_reference(x, method)
        assert [m[:2] for m in ours] == [m[:2] for m in ref]
        assert np.allclose([m[2] for m in ours], [m[2] for m in ref], rtol=0, atol=1e-12)


@pytest.mark.parametrize("method", ["single", "complete", "average"])
def test_tie_rule_matches_reference(method):
    rng = np.random.default_rng(8)
    for _ in range(100):
        x = random_matrix(rng, int(rng.integers(2, 9)), integer=True)
        ours = merges_as_sets(agglomerate(dm(x), method))
        ref = hclust_reference(x, method)
        assert [m[:2] for m in ours] == [m[:2] for m in ref]
        assert np.allclose([m[2] for m in ours], [m[2] for m in ref], rtol=1e-12)


@pytest.mark.parametrize("method", ["single", "complete", "average"])
def test_heights_and_cophenetic_agree_with_scipy(method):
    rng = np.random.default_rng(9)
    x = random_matrix(rng, 9)
    t = agglomerate(dm(x), method)
    z = linkage(squareform(x), method)
    assert np.allclose(sorted(m.height for m in t.merges), z[:, 2])
    assert np.allclose(squareform(cophenetic(t).values), cophenet(z))
    for k in range(1, 10):
        ours = cut(t, k).assignment
        theirs = fcluster(z, k, "maxclust")
        # same partition up to relabelling
        assert len({(a, b) for a, b in zip(ours, theirs)}) == k


def test_heights_monotone_and_cophenetic_ultrametric():
    rng = np.random.default_rng(10)
    x = random_matrix(rng, 8)
    for method in ("single", "complete", "average"):
        t = agglomerate(dm(x), method)
        h = [m.height for m in t.merges]
        assert all(a <= b + 1e-12 for a, b in zip(h, h[1:]))
        c = cophenetic(t).values
        for i in range(8):
            for j in range(8):
                for k in range(8):
                    assert c[i, k] <= max(c[i, j], c[j, k]) + 1e-12
    assert 0 < cophenetic_correlation(dm(x), agglomerate(dm(x), "average")) <= 1


def test_node_numbering_and_sizes():
    x = np.array([[0, 1, 5, 6], [1, 0, 5, 6], [5, 5, 0, 2], [6, 6, 2, 0]], dtype=float)
    t = agglomerate(dm(x), "single")
    assert [(m.left, m.right, m.size) for m in t.merges] == [(0, 1, 2), (2, 3, 2), (4, 5, 4)]
    assert t.members(6) == [0, 1, 2, 3]


def test_cut_levels():
    x = np.array([[0, 1, 5, 6], [1, 0, 5, 6], [5, 5, 0, 2], [6, 6, 2, 0]], dtype=float)
    t = agglomerate(dm(x), "average")
    assert cut(t, 1).assignment.tolist() == [1, 1, 1, 1]
    assert cut(t, 2).assignment.tolist() == [1, 1, 2, 2]
    assert cut(t, 4).assignment.tolist() == [1, 2, 3, 4]
    with pytest.raises(InvalidK):
        cut(t, 5)


def test_newick_roundtrip_and_quoting():
    x = np.array([[0, 1, 4], [1, 0, 4], [4, 4, 0]], dtype=float)
    t = agglomerate(DistanceMatrix.from_array(["a b", "it's", "c"], x), "average")
    text = to_newick(t)
    assert text.endswith(";")
    assert sorted(newick_leaves(parse_newick(text))) == sorted(["a b", "it's", "c"])
    plain = agglomerate(dm(x), "average")
    assert to_newick(plain) == "((L0:1.000000,L1:1.000000):3.000000,L2:4.000000);"


def test_incomplete_matrix_rejected():
    x = np.array([[0, np.nan], [np.nan, 0]])
    with pytest.raises(IncompleteMatrix):
        agglomerate(dm(x))
    with pytest.raises(ValueError):
        agglomerate(dm(np.zeros((2, 2))), "ward")
