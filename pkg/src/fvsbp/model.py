"""The arrow-occupancy model whose solutions encode cycle-free subgraphs.

Every vertex ``i`` carries a state ``A_i``: unoccupied (``EMPTY``), an
occupied root (``A_i == i``), or occupied with a parent pointer to a
neighbor (``A_i = j in adj(i)``).  An edge constraint admits exactly the
pairs where occupied neighbors are linked by a single parent arrow, so a
configuration satisfying every edge ("a solution") occupies a subgraph
whose components are trees or c-trees (single-cycle components).  The
unoccupied vertices of a solution, plus one vertex per c-tree cycle,
form a feedback vertex set.

This module also holds the exact oracles used to validate the
message-passing code: partition sums computed two independent ways
(state enumeration vs. subgraph enumeration), exact marginals, and a
brute-force minimum FVS search.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable

import numpy as np

from .errors import CapacityError
from .graph import CTREE, TREE, Component, Graph, _find, classify_components, \
    prune_low_degree

EMPTY = -1

ENUM_CAP = 10_000_000


@dataclass(frozen=True)
class LegitimateSubgraph:
    """Occupied set of a solution together with its component breakdown."""
    occupied: np.ndarray
    components: list[Component]


def _edge_keys(g: Graph) -> set[int]:
    keys = g._cache.get("edge_keys")
    if keys is None:
        e = g.edges
        keys = set((np.minimum(e[:, 0], e[:, 1]) * g.n
                    + np.maximum(e[:, 0], e[:, 1])).tolist())
        g._cache["edge_keys"] = keys
    return keys


def config_is_valid(g: Graph, states) -> bool:
    """Check every state is EMPTY, the vertex itself, or one of its neighbors."""
    s = np.asarray(states, dtype=np.int64)
    if s.shape != (g.n,):
        return False
    ids = np.arange(g.n)
    rest = np.flatnonzero((s != EMPTY) & (s != ids))
    keys = _edge_keys(g)
    for i in rest:
        p = int(s[i])
        if p < 0 or p >= g.n:
            return False
        key = i * g.n + p if i < p else p * g.n + i
        if key not in keys:
            return False
    return True


def _factor(i: int, j: int, a: int, b: int) -> bool:
    # a, b assumed valid states of i, j; edge (i, j) assumed present
    if a == EMPTY:
        return b == EMPTY or b != i
    if b == EMPTY:
        return a != j
    if a == j:
        return b != i
    return b == i


def edge_factor(g: Graph, i: int, j: int, a_i: int, a_j: int) -> int:
    """Constraint value (0 or 1) of edge ``(i, j)`` for states ``a_i``, ``a_j``."""
    key = i * g.n + j if i < j else j * g.n + i
    if i == j or key not in _edge_keys(g):
        raise ValueError(f"({i}, {j}) is not an edge")
    for v, a in ((i, a_i), (j, a_j)):
        if a != EMPTY and a != v:
            akey = v * g.n + a if v < a else a * g.n + v
            if a < 0 or a >= g.n or akey not in _edge_keys(g):
                raise ValueError(f"state {a} invalid for vertex {v}")
    return int(_factor(i, j, a_i, a_j))


def occupied_counts(g: Graph, states) -> tuple[int, int]:
    """Number of occupied vertices and of edges with both endpoints occupied."""
    s = np.asarray(states, dtype=np.int64)
    occ = s != EMPTY
    n_occ = int(occ.sum())
    m_occ = int((occ[g.edges[:, 0]] & occ[g.edges[:, 1]]).sum()) if g.m else 0
    return n_occ, m_occ


def is_solution(g: Graph, states) -> bool:
    """True iff the configuration is valid and satisfies every edge."""
    if not config_is_valid(g, states):
        return False
    s = np.asarray(states, dtype=np.int64)
    if g.m == 0:
        return True
    i, j = g.edges[:, 0], g.edges[:, 1]
    a, b = s[i], s[j]
    ea, eb = a == EMPTY, b == EMPTY
    both_occ = ~ea & ~eb
    ok = ((ea & eb)
          | (ea & ~eb & (b != i))
          | (eb & ~ea & (a != j))
          | (both_occ & (((a == j) & (b != i)) | ((b == i) & (a != j)))))
    return bool(ok.all())


def check_legitimate(g: Graph, occupied: Iterable[int]) -> bool:
    """True iff every induced component on ``occupied`` is a tree or a c-tree."""
    comps = classify_components(g, occupied)
    return all(c.label in (TREE, CTREE) for c in comps)


def solution_to_subgraph(g: Graph, states) -> LegitimateSubgraph:
    """Occupied subgraph of a solution, with tree / c-tree component labels."""
    if not is_solution(g, states):
        raise ValueError("configuration is not a solution")
    s = np.asarray(states, dtype=np.int64)
    occupied = np.flatnonzero(s != EMPTY)
    comps = classify_components(g, occupied)
    return LegitimateSubgraph(occupied=occupied, components=comps)


def degeneracy(g: Graph, occupied: Iterable[int]) -> int:
    """Number of distinct solutions whose occupied set is ``occupied``.

    Equals ``2**(number of c-trees) * prod(tree sizes)``: a tree of size t
    can be rooted t ways, a c-tree's cycle can be oriented 2 ways.
    """
    comps = classify_components(g, occupied)
    result = 1
    for c in comps:
        if c.label == TREE:
            result *= len(c.vertices)
        elif c.label == CTREE:
            result *= 2
        else:
            raise ValueError("occupied set is not legitimate "
                             "(a component has more than one cycle)")
    return result


def state_space_size(g: Graph) -> int:
    """Total number of configurations, prod(d_i + 2)."""
    size = 1
    for d in g.degrees:
        size *= int(d) + 2
    return size


def _solution_weights(g: Graph) -> np.ndarray:
    """Occupied total weight of every solution, by pruned depth-first search.

    Branches whose partial assignment already violates an edge contribute
    zero terms to the partition sum and are skipped; the result is exactly
    the sum over all state tuples.
    """
    cached = g._cache.get("solution_weights")
    if cached is not None:
        return cached
    n = g.n
    w = g.weights
    nbrs = [g.neighbors(i).tolist() for i in range(n)]
    earlier = [[j for j in nbrs[i] if j < i] for i in range(n)]
    states = np.full(n, EMPTY, dtype=np.int64)
    out: list[float] = []

    def consistent(i: int, a: int) -> bool:
        for j in earlier[i]:
            if not _factor(i, j, a, int(states[j])):
                return False
        return True

    def descend(i: int, acc: float) -> None:
        if i == n:
            out.append(acc)
            return
        states[i] = EMPTY
        if consistent(i, EMPTY):
            descend(i + 1, acc)
        for a in [i] + nbrs[i]:
            states[i] = a
            if consistent(i, a):
                descend(i + 1, acc + w[i])
        states[i] = EMPTY

    descend(0, 0.0)
    arr = np.array(out, dtype=np.float64)
    g._cache["solution_weights"] = arr
    return arr


def exact_partition_states(g: Graph, x: float, cap: int = ENUM_CAP) -> float:
    """Partition sum over per-vertex states, ``sum_A e^{x W(A)} prod C_ij``."""
    size = state_space_size(g)
    if size > cap:
        raise CapacityError(f"state space has {size} configurations, cap is {cap}")
    return float(np.exp(x * _solution_weights(g)).sum())


def _subgraph_profile(g: Graph) -> tuple[np.ndarray, np.ndarray]:
    """(weights, degeneracies) over all legitimate vertex subsets."""
    cached = g._cache.get("subgraph_profile")
    if cached is not None:
        return cached
    n = g.n
    edges = g.edges.tolist()
    w = g.weights
    ws: list[float] = []
    cs: list[float] = []
    for mask in range(1 << n):
        parent = list(range(n))

        def find(v: int) -> int:
            while parent[v] != v:
                parent[v] = parent[parent[v]]
                v = parent[v]
            return v

        legit = True
        extra_edges: dict[int, int] = {}
        for u, v in edges:
            if mask >> u & 1 and mask >> v & 1:
                ru, rv = find(u), find(v)
                if ru == rv:
                    extra_edges[ru] = extra_edges.get(ru, 0) + 1
                    if extra_edges[ru] > 1:
                        legit = False
                        break
                else:
                    parent[ru] = rv
                    if rv in extra_edges or ru in extra_edges:
                        # merge cycle counts into the new root
                        extra_edges[rv] = extra_edges.pop(rv, 0) + extra_edges.pop(ru, 0)
                        if extra_edges[rv] > 1:
                            legit = False
                            break
        if not legit:
            continue
        sizes: dict[int, int] = {}
        weight = 0.0
        for v in range(n):
            if mask >> v & 1:
                r = find(v)
                sizes[r] = sizes.get(r, 0) + 1
                weight += w[v]
        count = 1.0
        for r, sz in sizes.items():
            count *= 2.0 if extra_edges.get(r, 0) else float(sz)
        ws.append(weight)
        cs.append(count)
    profile = (np.array(ws, dtype=np.float64), np.array(cs, dtype=np.float64))
    g._cache["subgraph_profile"] = profile
    return profile


def exact_partition_subgraphs(g: Graph, x: float, cap: int = ENUM_CAP) -> float:
    """Partition sum over legitimate subgraphs, ``sum_T C(T) e^{x W(T)}``."""
    if 2 ** g.n > cap:
        raise CapacityError(f"subset space has {2 ** g.n} subsets, cap is {cap}")
    ws, cs = _subgraph_profile(g)
    return float((cs * np.exp(x * ws)).sum())


def exact_marginals(g: Graph, x: float, cap: int = ENUM_CAP) -> list[dict[int, float]]:
    """Exact per-vertex state marginals by enumeration.

    Returns one dict per vertex mapping state (EMPTY, the vertex itself,
    or a neighbor) to its probability under the partition measure.
    """
    size = state_space_size(g)
    if size > cap:
        raise CapacityError(f"state space has {size} configurations, cap is {cap}")
    n = g.n
    w = g.weights
    nbrs = [g.neighbors(i).tolist() for i in range(n)]
    earlier = [[j for j in nbrs[i] if j < i] for i in range(n)]
    states = np.full(n, EMPTY, dtype=np.int64)
    marg = [dict.fromkeys([EMPTY, i] + nbrs[i], 0.0) for i in range(n)]
    z = 0.0

    def consistent(i: int, a: int) -> bool:
        for j in earlier[i]:
            if not _factor(i, j, a, int(states[j])):
                return False
        return True

    def descend(i: int, acc: float) -> None:
        nonlocal z
        if i == n:
            weight = float(np.exp(x * acc))
            z += weight
            for v in range(n):
                marg[v][int(states[v])] += weight
            return
        for a in [EMPTY, i] + nbrs[i]:
            states[i] = a
            if consistent(i, a):
                descend(i + 1, acc if a == EMPTY else acc + w[i])
        states[i] = EMPTY

    descend(0, 0.0)
    return [{a: p / z for a, p in d.items()} for d in marg]


def decode_fvs(g: Graph, states, seed: int = 0, rule: str = "random") -> np.ndarray:
    """Feedback vertex set extracted from a solution.

    Takes all unoccupied vertices plus one vertex from each c-tree's unique
    cycle, chosen uniformly at random (``rule="random"``, seeded) or as the
    lowest index (``rule="lowest"``) for reproducibility.
    """
    if rule not in ("random", "lowest"):
        raise ValueError(f"unknown rule {rule!r}")
    sub = solution_to_subgraph(g, states)
    s = np.asarray(states, dtype=np.int64)
    gamma = np.flatnonzero(s == EMPTY).tolist()
    rng = np.random.default_rng(seed)
    for comp in sub.components:
        if comp.label != CTREE:
            continue
        # the cycle is what survives degree<=1 pruning inside the component
        members = set(comp.vertices.tolist())
        deg = {v: sum(1 for u in g.neighbors(v) if int(u) in members)
               for v in members}
        stack = [v for v in members if deg[v] <= 1]
        alive = set(members)
        while stack:
            v = stack.pop()
            if v not in alive:
                continue
            alive.remove(v)
            for u in g.neighbors(v):
                u = int(u)
                if u in alive:
                    deg[u] -= 1
                    if deg[u] <= 1:
                        stack.append(u)
        cycle = sorted(alive)
        if rule == "random":
            gamma.append(int(cycle[rng.integers(len(cycle))]))
        else:
            gamma.append(cycle[0])
    return np.array(sorted(gamma), dtype=np.int64)


def verify_fvs(g: Graph, fvs: Iterable[int]) -> bool:
    """True iff removing ``fvs`` leaves a forest."""
    keep = np.ones(g.n, dtype=bool)
    idx = np.asarray(list(fvs), dtype=np.int64)
    if idx.size:
        if idx.min() < 0 or idx.max() >= g.n:
            raise ValueError("FVS vertex id out of range")
        keep[idx] = False
    parent = np.arange(g.n, dtype=np.int64)
    for u, v in g.edges:
        if keep[u] and keep[v]:
            ru, rv = _find(parent, u), _find(parent, v)
            if ru == rv:
                return False
            parent[ru] = rv
    return True


def brute_min_fvs(g: Graph) -> tuple[int, np.ndarray]:
    """Minimum-cardinality FVS by subset search in increasing size.

    Only 2-core vertices are candidates (cycles live entirely in the
    2-core).  Exponential; intended for graphs of roughly n <= 20.
    """
    core, _ = prune_low_degree(g)
    if core.size == 0:
        return 0, np.zeros(0, dtype=np.int64)
    if core.size > 25:
        raise CapacityError(f"2-core has {core.size} vertices; "
                            "brute force is capped at 25")
    candidates = core.tolist()
    for k in range(1, len(candidates) + 1):
        for subset in combinations(candidates, k):
            if verify_fvs(g, subset):
                return k, np.array(subset, dtype=np.int64)
    raise AssertionError("unreachable: removing the whole 2-core is acyclic")
