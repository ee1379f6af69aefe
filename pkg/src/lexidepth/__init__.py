"""Lexicostatistical distances, trees, embeddings and data-depth analysis."""

__version__ = "0.1.0"

from .corpus import WordList, merge, parse_wordlist, read_wordlist, restrict  # noqa: E402
from .distance import DistanceMatrix, averaged_matrix, levenshtein  # noqa: E402
from .hclust import Dendrogram, agglomerate, cophenetic, cut, to_newick  # noqa: E402
from .embedding import Embedding, classical_mds, embed, nonmetric_mds  # noqa: E402
from .depth import depths, detect_outliers, l1_depth, spatial_depth  # noqa: E402
from .partition import Partition, pam, rand_index, tdd_cluster  # noqa: E402
from .classify import evaluate, fit, predict  # noqa: E402

__all__ = [
    "WordList", "merge", "parse_wordlist", "read_wordlist", "restrict",
    "DistanceMatrix", "averaged_matrix", "levenshtein",
    "Dendrogram", "agglomerate", "cophenetic", "cut", "to_newick",
    "Embedding", "classical_mds", "embed", "nonmetric_mds",
    "depths", "detect_outliers", "l1_depth", "spatial_depth",
    "Partition", "pam", "rand_index", "tdd_cluster",
    "evaluate", "fit", "predict",
]
