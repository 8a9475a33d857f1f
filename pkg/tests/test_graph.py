import numpy as np
import pytest
from helpers import complete, cycle, path, random_tree

from fvsbp.errors import GenerationError
from fvsbp.graph import (CTREE, MULTI_CYCLE, TREE, Graph, classify_components,
                         gen_er, gen_lattice, gen_rr, induced_subgraph,
                         is_acyclic, prune_low_degree)


def edge_set(g):
    return {(min(u, v), max(u, v)) for u, v in g.edges}


def assert_simple(g):
    assert not any(u == v for u, v in g.edges)
    assert len(edge_set(g)) == g.m
    deg = np.zeros(g.n, dtype=int)
    for u, v in g.edges:
        deg[u] += 1
        deg[v] += 1
    assert (deg == g.degrees).all()


class TestGraphType:
    def test_rejects_self_loop(self):
        with pytest.raises(ValueError):
            Graph(3, [(0, 0)])

    def test_rejects_duplicate(self):
        with pytest.raises(ValueError):
            Graph(3, [(0, 1), (1, 0)])

    def test_rejects_bad_weights(self):
        with pytest.raises(ValueError):
            Graph(2, [(0, 1)], weights=[1.0, -0.5])
        with pytest.raises(ValueError):
            Graph(2, [(0, 1)], weights=[1.0])

    def test_default_weights(self):
        g = Graph(3, [(0, 1)])
        assert (g.weights == 1.0).all()

    def test_immutable(self):
        g = cycle(4)
        with pytest.raises(ValueError):
            g.edges[0, 0] = 9

    def test_reciprocal_slots(self):
        g = gen_er(30, 3.0, seed=5)
        for p in range(2 * g.m):
            assert g.rec[g.rec[p]] == p
        # eslots orientation matches the edge rows
        src = np.concatenate([g.edges[:, 0], g.edges[:, 1]])
        order = np.lexsort((np.concatenate([g.edges[:, 1], g.edges[:, 0]]), src))
        src_of_slot = src[order]
        for e in range(g.m):
            assert src_of_slot[g.eslots[e, 0]] == g.edges[e, 0]
            assert src_of_slot[g.eslots[e, 1]] == g.edges[e, 1]


class TestGenerators:
    def test_er_forced_k4(self):
        g = gen_er(4, 3.0, seed=1)
        assert g.m == 6 and edge_set(g) == edge_set(complete(4))

    def test_er_edge_count_scaling(self):
        g = gen_er(100_000, 10.0, seed=3)
        assert g.m == 500_000
        assert_simple(g)

    def test_er_edgeless(self):
        g = gen_er(100, 0.0, seed=1)
        assert g.m == 0 and is_acyclic(g)

    def test_er_too_dense(self):
        with pytest.raises(ValueError):
            gen_er(4, 5.0, seed=1)

    def test_er_deterministic(self):
        a, b = gen_er(200, 4.0, seed=9), gen_er(200, 4.0, seed=9)
        assert (a.edges == b.edges).all()
        c = gen_er(200, 4.0, seed=10)
        assert not np.array_equal(a.edges, c.edges)

    def test_er_degrees_poisson(self):
        # chi-squared sanity vs Poisson(c), tails pooled to keep bins full
        from scipy import stats
        c = 5.0
        degs = np.concatenate([gen_er(10_000, c, seed=s).degrees
                               for s in range(3)])
        kmax = 14
        counts = np.bincount(np.minimum(degs, kmax), minlength=kmax + 1)
        pk = stats.poisson.pmf(np.arange(kmax + 1), c)
        pk[kmax] = 1.0 - pk[:kmax].sum()
        expected = pk * degs.size
        _, pval = stats.chisquare(counts, expected)
        assert pval > 1e-4

    def test_rr_k4(self):
        g = gen_rr(4, 3, seed=0)
        assert edge_set(g) == edge_set(complete(4))

    def test_rr_two_regular_cycle_cover(self):
        g = gen_rr(6, 2, seed=1)
        assert (g.degrees == 2).all()
        assert all(lbl.label == CTREE for lbl in classify_components(g))

    def test_rr_degrees_large(self):
        g = gen_rr(100_000, 3, seed=2)
        assert (g.degrees == 3).all()
        assert_simple(g)

    def test_rr_odd_product(self):
        with pytest.raises(ValueError):
            gen_rr(7, 3, seed=0)

    def test_rr_deterministic(self):
        a, b = gen_rr(50, 3, seed=4), gen_rr(50, 3, seed=4)
        assert (a.edges == b.edges).all()

    def test_rr_k_too_large(self):
        with pytest.raises(ValueError):
            gen_rr(4, 4, seed=0)

    @pytest.mark.parametrize("d,l,n,m", [(2, 3, 9, 18), (3, 4, 64, 192)])
    def test_lattice_counts(self, d, l, n, m):
        g = gen_lattice(d, l)
        assert g.n == n and g.m == m
        assert (g.degrees == 2 * d).all()
        assert_simple(g)

    def test_lattice_1d_is_cycle(self):
        g = gen_lattice(1, 5)
        assert edge_set(g) == edge_set(cycle(5))

    def test_lattice_min_side(self):
        with pytest.raises(ValueError):
            gen_lattice(2, 2)


class TestPrune:
    def test_tree_empties(self):
        rng = np.random.default_rng(0)
        for _ in range(5):
            g = random_tree(int(rng.integers(2, 12)), rng)
            res = prune_low_degree(g)
            assert res.core.size == 0
            assert res.pruned.size == g.n

    def test_pendant_cycle(self):
        g = Graph(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (2, 5)])
        res = prune_low_degree(g)
        assert res.core.tolist() == [0, 1, 2, 3, 4]
        assert res.pruned.tolist() == [5]

    def test_k4_unchanged(self):
        res = prune_low_degree(complete(4))
        assert res.core.size == 4 and res.pruned.size == 0

    def test_idempotent_min_degree(self):
        g = gen_er(300, 2.2, seed=7)
        res = prune_low_degree(g)
        sub, _, _ = induced_subgraph(g, res.core)
        assert sub.n == 0 or sub.degrees.min() >= 2
        again = prune_low_degree(sub)
        assert again.core.size == sub.n and again.pruned.size == 0

    def test_external_removal(self):
        # deleting one cycle vertex makes the rest prunable
        res = prune_low_degree(cycle(5), removed=[2])
        assert res.core.size == 0
        assert 2 not in res.pruned.tolist()
        assert res.pruned.size == 4


class TestStructure:
    def test_acyclic(self):
        assert is_acyclic(path(5))
        assert not is_acyclic(cycle(3))
        two_tri = Graph(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)])
        assert not is_acyclic(two_tri)

    def test_acyclic_induced(self):
        assert is_acyclic(cycle(4), vertices=[0, 1, 2])

    def test_classify(self):
        ctree = Graph(5, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 4)])
        (comp,) = classify_components(ctree)
        assert comp.label == CTREE and comp.n_edges == 5
        (comp,) = classify_components(path(3))
        assert comp.label == TREE
        (comp,) = classify_components(complete(4))
        assert comp.label == MULTI_CYCLE

    def test_classify_matches_acyclic(self):
        rng = np.random.default_rng(3)
        for s in range(10):
            g = gen_er(20, float(rng.uniform(0.5, 3.0)), seed=s)
            all_trees = all(c.label == TREE for c in classify_components(g))
            assert all_trees == is_acyclic(g)

    def test_induced_subgraph(self):
        g = gen_er(30, 3.0, seed=2)
        sub, old_v, old_e = induced_subgraph(g, range(0, 30, 2))
        assert sub.n == 15
        back = {(min(old_v[u], old_v[v]), max(old_v[u], old_v[v]))
                for u, v in sub.edges}
        expect = {(min(u, v), max(u, v)) for u, v in g.edges
                  if u % 2 == 0 and v % 2 == 0}
        assert back == expect
        assert (g.edges[old_e] % 2 == 0).all()
