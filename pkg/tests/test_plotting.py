import xml.etree.ElementTree as ET

import numpy as np

from lexidepth.depth import depth_grid
from lexidepth.embedding import Embedding
from lexidepth.plotting import contour_svg, heatmap_svg, scatter_svg


def embedding():
    rng = np.random.default_rng(0)
    return Embedding([f"lang{i}" for i in range(8)], rng.normal(size=(8, 2)))


def test_svgs_are_valid_and_reproducible():
    e = embedding()
    grid = depth_grid(e, resolution=(12, 12))
    for make in (
        lambda: scatter_svg(e, "t", groups={"lang0": "a"}, highlight={"lang1"}),
        lambda: heatmap_svg(grid, e, "h"),
        lambda: contour_svg(grid, e, "c"),
    ):
        first, second = make(), make()
        assert first == second
        root = ET.fromstring(first)
        assert root.tag.endswith("svg")
    assert "lang3" in scatter_svg(e)


def test_one_dimensional_embedding_is_drawn_on_a_line():
    e = Embedding(["a", "b", "c"], np.array([[0.0], [1.0], [3.0]]))
    assert "<svg" in scatter_svg(e)
