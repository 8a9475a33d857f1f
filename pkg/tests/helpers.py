"""Small graph builders shared by the test modules."""

import numpy as np

from fvsbp.graph import Graph


def cycle(n: int) -> Graph:
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def path(n: int) -> Graph:
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def complete(n: int) -> Graph:
    return Graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def star(n_leaves: int) -> Graph:
    return Graph(n_leaves + 1, [(0, i + 1) for i in range(n_leaves)])


def random_tree(n: int, rng: np.random.Generator) -> Graph:
    edges = [(int(rng.integers(0, i)), i) for i in range(1, n)]
    return Graph(n, edges)


def random_er_gnp(n: int, p: float, rng: np.random.Generator,
                  weights=None) -> Graph:
    edges = [(i, j) for i in range(n) for j in range(i + 1, n)
             if rng.random() < p]
    return Graph(n, edges, weights)


def fig_like_solution():
    """A 15-vertex graph with a hand-built solution: two occupied trees,
    one occupied c-tree, three unoccupied vertices (3, 4, 10)."""
    parent_edges = [(0, 5), (1, 2), (5, 6), (6, 9), (7, 9), (8, 9),
                    (11, 12), (12, 13), (13, 11), (14, 13)]
    extra_edges = [(3, 1), (3, 5), (4, 8), (10, 13), (3, 4)]
    g = Graph(15, parent_edges + extra_edges)
    states = np.array([5, 2, 2, -1, -1, 6, 9, 9, 9, 9, -1, 12, 13, 11, 13],
                      dtype=np.int64)
    return g, states
