"""Shared hypothesis strategies and fixtures for the test modules."""

import itertools

from hypothesis import strategies as st

from erld.graph import Graph


@st.composite
def graphs(draw, min_n=1, max_n=8):
    n = draw(st.integers(min_n, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True) if pairs else st.just([]))
    return Graph(n, chosen)


def k4_plus_edge() -> Graph:
    """K_4 on 0..3 with a pendant edge 3-4."""
    return Graph(5, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (3, 4)])


def twelve_vertex_fixture() -> Graph:
    return Graph(12, [(0, 1), (0, 2), (0, 3), (0, 4), (0, 5), (1, 2), (5, 6), (6, 7), (6, 8), (4, 9), (9, 10), (10, 11)])
