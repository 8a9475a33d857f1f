import math
from itertools import product

import numpy as np
import pytest
from helpers import (complete, cycle, fig_like_solution, path, random_er_gnp,
                     random_tree)

from fvsbp.errors import CapacityError
from fvsbp.graph import CTREE, TREE, Graph, is_acyclic
from fvsbp.model import (EMPTY, brute_min_fvs, check_legitimate,
                         config_is_valid, decode_fvs, degeneracy, edge_factor,
                         exact_marginals, exact_partition_states,
                         exact_partition_subgraphs, is_solution,
                         occupied_counts, solution_to_subgraph,
                         state_space_size, verify_fvs)


def all_configs(g):
    """Every state tuple, as the blunt meta-oracle for the pruned search."""
    domains = [[EMPTY, i] + g.neighbors(i).tolist() for i in range(g.n)]
    for tup in product(*domains):
        yield np.array(tup, dtype=np.int64)


def brute_z(g, x):
    total = 0.0
    for s in all_configs(g):
        if is_solution(g, s):
            total += math.exp(x * g.weights[s != EMPTY].sum())
    return total


class TestEdgeFactor:
    def setup_method(self):
        self.g = path(3)  # edges (0,1), (1,2)

    def test_both_empty(self):
        assert edge_factor(self.g, 0, 1, EMPTY, EMPTY) == 1

    def test_empty_vs_occupied(self):
        # occupied side must not point at the empty side
        assert edge_factor(self.g, 0, 1, EMPTY, 2) == 1
        assert edge_factor(self.g, 0, 1, EMPTY, 0) == 0
        assert edge_factor(self.g, 0, 1, 1, EMPTY) == 0

    def test_mutual_parents_rejected(self):
        assert edge_factor(self.g, 0, 1, 1, 0) == 0

    def test_single_parent_arrow(self):
        assert edge_factor(self.g, 0, 1, 1, 1) == 1  # 0 points at 1, 1 is root
        assert edge_factor(self.g, 0, 1, 1, 2) == 1  # 0 points at 1, 1 points on
        assert edge_factor(self.g, 0, 1, 0, 0) == 1  # 1 points back at root 0

    def test_two_roots_adjacent(self):
        # both occupied, neither arrow: violated on any edge
        assert edge_factor(self.g, 0, 1, 0, 1) == 0
        assert edge_factor(path(2), 0, 1, 0, 1) == 0

    def test_invalid_inputs(self):
        with pytest.raises(ValueError):
            edge_factor(self.g, 0, 2, EMPTY, EMPTY)  # not an edge
        with pytest.raises(ValueError):
            edge_factor(self.g, 0, 1, 2, EMPTY)  # 2 is not adjacent to 0


class TestConfigs:
    def test_validity(self):
        g = cycle(3)
        assert config_is_valid(g, [1, 2, 0])
        assert config_is_valid(g, [EMPTY, 1, 2])
        assert not config_is_valid(g, [3, 0, 0])
        assert not config_is_valid(path(3), [2, 1, 1])  # 2 not adjacent to 0

    def test_occupied_counts_trivial(self):
        g = cycle(4)
        assert occupied_counts(g, [EMPTY] * 4) == (0, 0)
        g1 = Graph(1, [])
        assert occupied_counts(g1, [0]) == (1, 0)

    def test_occupied_counts_example(self):
        g, states = fig_like_solution()
        assert occupied_counts(g, states) == (12, 10)

    def test_is_solution(self):
        g = Graph(3, [])
        assert is_solution(g, [EMPTY, 1, EMPTY])
        c3 = cycle(3)
        assert is_solution(c3, [1, 2, 0])  # oriented cycle of arrows
        assert is_solution(c3, [0, 0, EMPTY])  # tree {0,1} rooted at 0
        assert not is_solution(c3, [0, 0, 0])  # edge (1,2): occupied, no arrow
        assert not is_solution(c3, [EMPTY, 0, EMPTY])  # arrow into empty vertex

    def test_solution_occupied_is_ctree(self):
        c3 = cycle(3)
        sub = solution_to_subgraph(c3, [1, 2, 0])
        assert [c.label for c in sub.components] == [CTREE]

    def test_every_solution_is_legitimate_and_counted(self):
        rng = np.random.default_rng(11)
        for trial in range(6):
            g = random_er_gnp(5, 0.5, rng)
            by_occ = {}
            for s in all_configs(g):
                if is_solution(g, s):
                    occ = tuple(np.flatnonzero(s != EMPTY).tolist())
                    assert check_legitimate(g, occ)
                    by_occ[occ] = by_occ.get(occ, 0) + 1
            for occ, count in by_occ.items():
                assert degeneracy(g, occ) == count


class TestFigExample:
    def test_components(self):
        g, states = fig_like_solution()
        sub = solution_to_subgraph(g, states)
        got = {tuple(c.vertices.tolist()): c.label for c in sub.components}
        assert got == {(1, 2): TREE, (0, 5, 6, 7, 8, 9): TREE,
                       (11, 12, 13, 14): CTREE}

    def test_degeneracy(self):
        g, states = fig_like_solution()
        sub = solution_to_subgraph(g, states)
        assert degeneracy(g, sub.occupied) == 2 * 6 * 2

    def test_decode(self):
        g, states = fig_like_solution()
        fvs = decode_fvs(g, states, seed=5)
        assert len(fvs) == 4
        assert {3, 4, 10} <= set(fvs.tolist())
        assert verify_fvs(g, fvs)


class TestDegeneracy:
    def test_single_tree(self):
        g = path(6)
        assert degeneracy(g, range(6)) == 6

    def test_single_ctree(self):
        assert degeneracy(cycle(4), range(4)) == 2

    def test_not_legitimate(self):
        with pytest.raises(ValueError):
            degeneracy(complete(4), range(4))

    def test_check_legitimate(self):
        assert check_legitimate(complete(4), [])
        assert not check_legitimate(complete(4), range(4))


class TestPartition:
    def test_single_vertex(self):
        g = Graph(1, [])
        for x in (0.0, 1.0, 2.5):
            assert exact_partition_states(g, x) == pytest.approx(1 + math.exp(x))

    def test_single_edge_closed_form(self):
        g = path(2)
        for x in (0.0, 0.7, 2.0):
            e = math.exp(x)
            want = 1 + 2 * e + 2 * e * e
            assert exact_partition_states(g, x) == pytest.approx(want)
            assert exact_partition_subgraphs(g, x) == pytest.approx(want)

    def test_triangle_x0_counts_solutions(self):
        c3 = cycle(3)
        count = sum(1 for s in all_configs(c3) if is_solution(c3, s))
        assert exact_partition_states(c3, 0.0) == pytest.approx(count)

    def test_edgeless_product_form(self):
        g = Graph(5, [])
        x = 1.3
        assert exact_partition_subgraphs(g, x) == pytest.approx(
            (1 + math.exp(x)) ** 5)

    def test_pruned_search_equals_blunt_enumeration(self):
        rng = np.random.default_rng(2)
        for trial in range(5):
            g = random_er_gnp(5, 0.5, rng, weights=rng.uniform(0.2, 2.0, 5))
            for x in (0.0, 1.0):
                assert exact_partition_states(g, x) == pytest.approx(
                    brute_z(g, x), rel=1e-12)

    def test_dual_route_identity_weighted(self):
        rng = np.random.default_rng(8)
        for trial in range(10):
            g = random_er_gnp(7, 0.4, rng, weights=rng.uniform(0.1, 3.0, 7))
            for x in (0.0, 0.5, 2.0):
                zs = exact_partition_states(g, x)
                zg = exact_partition_subgraphs(g, x)
                assert zs == pytest.approx(zg, rel=1e-11)

    def test_capacity_errors(self):
        big = cycle(40)
        assert state_space_size(big) == 4 ** 40
        with pytest.raises(CapacityError):
            exact_partition_states(big, 1.0)
        with pytest.raises(CapacityError):
            exact_partition_subgraphs(big, 1.0)

    def test_marginals_normalized(self):
        rng = np.random.default_rng(4)
        g = random_er_gnp(6, 0.4, rng)
        for m in exact_marginals(g, 1.0):
            assert sum(m.values()) == pytest.approx(1.0, abs=1e-12)


class TestDecodeVerify:
    def test_all_tree_solution_decodes_to_unoccupied(self):
        g = path(4)
        states = np.array([0, 0, 1, 2])  # rooted at 0
        assert is_solution(g, states)
        assert decode_fvs(g, states, seed=1).size == 0

    def test_fully_unoccupied(self):
        g = cycle(5)
        fvs = decode_fvs(g, np.full(5, EMPTY), seed=0)
        assert fvs.tolist() == [0, 1, 2, 3, 4]

    def test_lowest_rule_deterministic(self):
        c3 = cycle(3)
        fvs = decode_fvs(c3, [1, 2, 0], rule="lowest")
        assert fvs.tolist() == [0]

    def test_decode_requires_solution(self):
        with pytest.raises(ValueError):
            decode_fvs(cycle(3), [0, 0, 0])

    def test_decode_always_verifies(self):
        rng = np.random.default_rng(9)
        for trial in range(4):
            g = random_er_gnp(6, 0.45, rng)
            for s in all_configs(g):
                if is_solution(g, s):
                    assert verify_fvs(g, decode_fvs(g, s, seed=trial))

    def test_verify_trivial(self):
        c3 = cycle(3)
        assert verify_fvs(c3, range(3))
        assert not verify_fvs(c3, [])
        assert verify_fvs(cycle(7), [4])


class TestBruteMin:
    def test_cycles_and_trees(self):
        rng = np.random.default_rng(1)
        assert brute_min_fvs(cycle(8))[0] == 1
        assert brute_min_fvs(random_tree(9, rng))[0] == 0

    def test_complete(self):
        size, witness = brute_min_fvs(complete(4))
        assert size == 2
        assert verify_fvs(complete(4), witness)

    def test_zero_iff_acyclic(self):
        rng = np.random.default_rng(6)
        for s in range(8):
            g = random_er_gnp(8, 0.3, rng)
            assert (brute_min_fvs(g)[0] == 0) == is_acyclic(g)

    def test_witness_verifies(self):
        rng = np.random.default_rng(12)
        for _ in range(5):
            g = random_er_gnp(9, 0.35, rng)
            size, witness = brute_min_fvs(g)
            assert witness.size == size
            assert verify_fvs(g, witness)
