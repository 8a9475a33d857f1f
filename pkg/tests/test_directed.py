import math
from itertools import product

import numpy as np
import pytest

from fvsbp.directed import (DiGraph, brute_min_directed_fvs,
                            directed_edge_factor, exact_directed_partition,
                            exists_height_config, gen_directed_er, is_dag,
                            is_directed_solution, topological_heights,
                            verify_directed_fvs)
from fvsbp.errors import CapacityError


def two_cycle():
    return DiGraph(2, [(0, 1), (1, 0)])


def bidirected_triangle():
    return DiGraph(3, [(0, 1), (1, 0), (1, 2), (2, 1), (0, 2), (2, 0)])


class TestDiGraph:
    def test_rejects_self_arc(self):
        with pytest.raises(ValueError):
            DiGraph(2, [(1, 1)])

    def test_rejects_duplicate_arc(self):
        with pytest.raises(ValueError):
            DiGraph(2, [(0, 1), (0, 1)])

    def test_antiparallel_ok(self):
        assert two_cycle().m == 2

    def test_generator(self):
        dg = gen_directed_er(100, 3.0, seed=4)
        assert dg.m == 300
        assert not np.any(dg.arcs[:, 0] == dg.arcs[:, 1])
        assert np.unique(dg.arcs[:, 0] * 100 + dg.arcs[:, 1]).size == 300
        again = gen_directed_er(100, 3.0, seed=4)
        assert (dg.arcs == again.arcs).all()


class TestFactor:
    @pytest.mark.parametrize("hi,hj,want", [
        (0, 0, 1), (2, 5, 1), (5, 2, 0), (3, 3, 0), (7, 0, 1), (0, 4, 1)])
    def test_table(self, hi, hj, want):
        assert directed_edge_factor(hi, hj) == want

    def test_negative_heights(self):
        with pytest.raises(ValueError):
            directed_edge_factor(-1, 0)


class TestSolutions:
    def test_two_cycle_occupied_fails(self):
        dg = two_cycle()
        for hi, hj in product(range(1, 4), repeat=2):
            assert not is_directed_solution(dg, [hi, hj])

    def test_all_zero_is_solution(self):
        assert is_directed_solution(bidirected_triangle(), [0, 0, 0])

    def test_depth_heights_satisfy_dags(self):
        rng = np.random.default_rng(3)
        for s in range(10):
            dg = gen_directed_er(8, 1.2, seed=s)
            occ = np.flatnonzero(rng.random(8) < 0.6)
            h = topological_heights(dg, occ)
            if h is None:
                assert not is_dag(dg, occ)
            else:
                assert is_directed_solution(dg, h)
                assert (np.flatnonzero(h > 0) == np.sort(occ)).all()


class TestVerify:
    def test_trivial_cases(self):
        dag = DiGraph(3, [(0, 1), (1, 2), (0, 2)])
        assert verify_directed_fvs(dag, [])
        assert not verify_directed_fvs(two_cycle(), [])
        assert verify_directed_fvs(two_cycle(), [0])

    def test_matches_is_dag(self):
        for s in range(6):
            dg = gen_directed_er(9, 1.5, seed=s)
            assert verify_directed_fvs(dg, []) == is_dag(dg)


class TestPartition:
    def test_single_vertex(self):
        dg = DiGraph(1, [])
        x = 1.2
        assert exact_directed_partition(dg, x, h_max=1) == pytest.approx(
            1 + math.exp(x))

    def test_single_arc_brute(self):
        dg = DiGraph(2, [(0, 1)])
        x, h_max = 0.8, 2
        want = 0.0
        for hi in range(h_max + 1):
            for hj in range(h_max + 1):
                if directed_edge_factor(hi, hj):
                    want += math.exp(x * ((hi > 0) + (hj > 0)))
        got = exact_directed_partition(dg, x, h_max=h_max)
        assert got == pytest.approx(want)
        e = math.exp(x)
        assert got == pytest.approx(1 + 4 * e + e * e)

    def test_monotone_in_height_cap(self):
        dg = DiGraph(3, [(0, 1), (1, 2), (2, 0)])
        vals = [exact_directed_partition(dg, 1.0, h_max=h) for h in (1, 2, 3, 5)]
        assert all(b >= a for a, b in zip(vals, vals[1:]))

    def test_capacity(self):
        dg = gen_directed_er(30, 1.0, seed=1)
        with pytest.raises(CapacityError):
            exact_directed_partition(dg, 1.0)


class TestBruteMin:
    def test_dag_zero(self):
        assert brute_min_directed_fvs(DiGraph(3, [(0, 1), (1, 2)]))[0] == 0

    def test_cycle_one(self):
        ring = DiGraph(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
        size, witness = brute_min_directed_fvs(ring)
        assert size == 1 and verify_directed_fvs(ring, witness)

    def test_bidirected_triangle_two(self):
        assert brute_min_directed_fvs(bidirected_triangle())[0] == 2


class TestEquivalence:
    def test_subset_dag_iff_heights_exist(self):
        # sampled version; the acceptance suite runs this exhaustively
        rng = np.random.default_rng(5)
        for s in range(25):
            n = int(rng.integers(3, 8))
            dg = gen_directed_er(n, float(rng.uniform(0.5, 1.5)), seed=s)
            for _ in range(8):
                occ = np.flatnonzero(rng.random(n) < 0.5)
                assert is_dag(dg, occ) == exists_height_config(dg, occ)

    def test_occupied_cycle_never_satisfiable(self):
        ring = DiGraph(3, [(0, 1), (1, 2), (2, 0)])
        assert not exists_height_config(ring, [0, 1, 2])
        assert exists_height_config(ring, [0, 1])
