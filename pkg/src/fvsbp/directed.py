"""Height model for feedback vertex sets of directed graphs.

Each vertex carries an integer height: 0 means unoccupied (in the FVS),
``h >= 1`` means occupied.  An arc ``i -> j`` is satisfied when ``j`` is
unoccupied or ``h_i < h_j`` (an unoccupied ``i`` has height 0, below any
occupied height).  Strictly increasing heights around a directed cycle are
impossible, so the occupied set of any satisfying assignment induces a
DAG; conversely, heights ``1 +`` longest-path depth satisfy every arc of
an induced DAG.

Only verification-scale tools live here: factor evaluation, solution
checking, exact partition sums by enumeration, and brute-force minimum
directed FVS.  There is no directed message passing.
"""

from __future__ import annotations

from collections import deque
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .errors import CapacityError

ENUM_CAP = 10_000_000


class DiGraph:
    """Immutable simple directed graph (antiparallel arc pairs allowed)."""

    __slots__ = ("n", "m", "arcs", "weights", "out_indptr", "out_nbr",
                 "in_indptr", "in_nbr")

    def __init__(self, n: int, arcs: Iterable[Sequence[int]],
                 weights: Sequence[float] | None = None):
        if n < 0:
            raise ValueError(f"vertex count must be >= 0, got {n}")
        a = np.asarray(list(arcs) if not isinstance(arcs, np.ndarray) else arcs,
                       dtype=np.int64).reshape(-1, 2)
        m = a.shape[0]
        if m:
            if a.min() < 0 or a.max() >= n:
                raise ValueError("arc endpoint out of range")
            if np.any(a[:, 0] == a[:, 1]):
                raise ValueError("self-arcs are not allowed")
            if np.unique(a[:, 0] * n + a[:, 1]).size != m:
                raise ValueError("duplicate arcs are not allowed")
        if weights is None:
            w = np.ones(n, dtype=np.float64)
        else:
            w = np.asarray(weights, dtype=np.float64)
            if w.shape != (n,):
                raise ValueError(f"expected {n} weights, got shape {w.shape}")
            if not np.all(np.isfinite(w)) or np.any(w < 0):
                raise ValueError("weights must be finite and >= 0")
        self.n = int(n)
        self.m = int(m)
        self.arcs = a
        self.weights = w

        def csr(src, dst):
            order = np.lexsort((dst, src))
            counts = np.bincount(src, minlength=n)
            indptr = np.zeros(n + 1, dtype=np.int64)
            np.cumsum(counts, out=indptr[1:])
            return indptr, dst[order]

        self.out_indptr, self.out_nbr = csr(a[:, 0], a[:, 1])
        self.in_indptr, self.in_nbr = csr(a[:, 1], a[:, 0])
        for arr in (self.arcs, self.weights, self.out_indptr, self.out_nbr,
                    self.in_indptr, self.in_nbr):
            arr.flags.writeable = False

    def out_neighbors(self, i: int) -> np.ndarray:
        return self.out_nbr[self.out_indptr[i]:self.out_indptr[i + 1]]

    def in_neighbors(self, i: int) -> np.ndarray:
        return self.in_nbr[self.in_indptr[i]:self.in_indptr[i + 1]]

    def __repr__(self):
        return f"DiGraph(n={self.n}, m={self.m})"


def gen_directed_er(n: int, alpha: float, seed: int) -> DiGraph:
    """Directed random graph with ``round(alpha * n)`` arcs.

    ``alpha`` is the mean in-degree (equal to the mean out-degree); arcs
    are drawn uniformly by rejection of self-arcs and duplicates.
    """
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    if alpha < 0:
        raise ValueError(f"mean degree must be >= 0, got {alpha}")
    m = int(round(alpha * n))
    if m > n * (n - 1):
        raise ValueError(f"cannot place {m} distinct arcs on {n} vertices")
    rng = np.random.default_rng(seed)
    seen: set[int] = set()
    arcs = np.empty((m, 2), dtype=np.int64)
    have = 0
    while have < m:
        i, j = int(rng.integers(n)), int(rng.integers(n))
        if i == j or i * n + j in seen:
            continue
        seen.add(i * n + j)
        arcs[have] = (i, j)
        have += 1
    return DiGraph(n, arcs)


def directed_edge_factor(h_i: int, h_j: int) -> int:
    """Arc constraint: satisfied iff the head is unoccupied or ``h_i < h_j``."""
    if h_i < 0 or h_j < 0:
        raise ValueError("heights must be >= 0")
    return int(h_j == 0 or h_i < h_j)


def heights_are_valid(dg: DiGraph, heights) -> bool:
    h = np.asarray(heights, dtype=np.int64)
    return h.shape == (dg.n,) and bool((h >= 0).all())


def is_directed_solution(dg: DiGraph, heights) -> bool:
    """True iff every arc factor is 1."""
    if not heights_are_valid(dg, heights):
        raise ValueError("invalid height configuration")
    h = np.asarray(heights, dtype=np.int64)
    if dg.m == 0:
        return True
    hi, hj = h[dg.arcs[:, 0]], h[dg.arcs[:, 1]]
    return bool(((hj == 0) | (hi < hj)).all())


def is_dag(dg: DiGraph, vertices: Iterable[int] | None = None) -> bool:
    """Kahn's algorithm on the induced subgraph."""
    if vertices is None:
        mask = np.ones(dg.n, dtype=bool)
    else:
        mask = np.zeros(dg.n, dtype=bool)
        mask[np.asarray(list(vertices), dtype=np.int64)] = True
    indeg = np.zeros(dg.n, dtype=np.int64)
    for u, v in dg.arcs:
        if mask[u] and mask[v]:
            indeg[v] += 1
    queue = deque(int(v) for v in np.flatnonzero(mask) if indeg[v] == 0)
    seen = 0
    while queue:
        u = queue.popleft()
        seen += 1
        for v in dg.out_neighbors(u):
            if mask[v]:
                indeg[v] -= 1
                if indeg[v] == 0:
                    queue.append(int(v))
    return seen == int(mask.sum())


def verify_directed_fvs(dg: DiGraph, fvs: Iterable[int]) -> bool:
    """True iff removing ``fvs`` leaves a DAG."""
    keep = np.ones(dg.n, dtype=bool)
    idx = np.asarray(list(fvs), dtype=np.int64)
    if idx.size:
        if idx.min() < 0 or idx.max() >= dg.n:
            raise ValueError("FVS vertex id out of range")
        keep[idx] = False
    return is_dag(dg, np.flatnonzero(keep))


def topological_heights(dg: DiGraph, occupied: Iterable[int]) -> np.ndarray | None:
    """Heights ``1 + longest-path depth`` on the induced subgraph, 0 elsewhere.

    Returns None when the induced subgraph is not a DAG (no valid heights
    exist in that case).  The returned configuration satisfies every arc.
    """
    mask = np.zeros(dg.n, dtype=bool)
    occ = np.asarray(list(occupied), dtype=np.int64)
    mask[occ] = True
    indeg = np.zeros(dg.n, dtype=np.int64)
    for u, v in dg.arcs:
        if mask[u] and mask[v]:
            indeg[v] += 1
    depth = np.zeros(dg.n, dtype=np.int64)
    queue = deque(int(v) for v in np.flatnonzero(mask) if indeg[v] == 0)
    heights = np.zeros(dg.n, dtype=np.int64)
    seen = 0
    while queue:
        u = queue.popleft()
        seen += 1
        heights[u] = depth[u] + 1
        for v in dg.out_neighbors(u):
            if mask[v]:
                depth[v] = max(depth[v], depth[u] + 1)
                indeg[v] -= 1
                if indeg[v] == 0:
                    queue.append(int(v))
    if seen != int(mask.sum()):
        return None
    return heights


def exists_height_config(dg: DiGraph, occupied: Iterable[int],
                         h_max: int | None = None) -> bool:
    """Complete backtracking search for heights satisfying every arc.

    Occupied vertices take heights in ``1..h_max`` (default ``n``, enough
    for any chain); all others are 0.  Used as an independent oracle, so
    it never consults DAG reasoning.
    """
    occ = sorted(int(v) for v in occupied)
    h_max = dg.n if h_max is None else h_max
    pos = {v: t for t, v in enumerate(occ)}
    # arcs between occupied vertices, as (earlier, later, tail_is_earlier)
    constraints: list[list[tuple[int, bool]]] = [[] for _ in occ]
    for u, v in dg.arcs:
        u, v = int(u), int(v)
        if u in pos and v in pos:
            if pos[u] < pos[v]:
                constraints[pos[v]].append((pos[u], True))
            else:
                constraints[pos[u]].append((pos[v], False))
    heights = [0] * len(occ)

    def descend(t: int) -> bool:
        if t == len(occ):
            return True
        for h in range(1, h_max + 1):
            ok = True
            for other, other_is_tail in constraints[t]:
                if other_is_tail:
                    if not heights[other] < h:
                        ok = False
                        break
                elif not h < heights[other]:
                    ok = False
                    break
            if ok:
                heights[t] = h
                if descend(t + 1):
                    return True
        return False

    return descend(0)


def exact_directed_partition(dg: DiGraph, x: float, h_max: int | None = None,
                             cap: int = ENUM_CAP) -> float:
    """Partition sum over height configurations ``h in {0..h_max}^n``.

    The sum grows with ``h_max`` (more labelings per induced DAG); any
    ``h_max >= n`` admits the same occupied sets.
    """
    h_max = dg.n if h_max is None else int(h_max)
    if h_max < 0:
        raise ValueError("h_max must be >= 0")
    size = (h_max + 1) ** dg.n
    if size > cap:
        raise CapacityError(f"height space has {size} configurations, cap is {cap}")
    w = dg.weights
    in_earlier = [[] for _ in range(dg.n)]   # arcs (u -> i) with u < i
    out_earlier = [[] for _ in range(dg.n)]  # arcs (i -> u) with u < i
    for u, v in dg.arcs:
        u, v = int(u), int(v)
        if u < v:
            in_earlier[v].append(u)
        else:
            out_earlier[u].append(v)
    heights = np.zeros(dg.n, dtype=np.int64)
    total = 0.0

    def descend(i: int, acc: float) -> None:
        nonlocal total
        if i == dg.n:
            total += np.exp(x * acc)
            return
        for h in range(h_max + 1):
            ok = True
            for u in in_earlier[i]:
                if not (h == 0 or heights[u] < h):
                    ok = False
                    break
            if ok:
                for u in out_earlier[i]:
                    if not (heights[u] == 0 or h < heights[u]):
                        ok = False
                        break
            if ok:
                heights[i] = h
                descend(i + 1, acc if h == 0 else acc + w[i])
        heights[i] = 0

    descend(0, 0.0)
    return float(total)


def brute_min_directed_fvs(dg: DiGraph) -> tuple[int, np.ndarray]:
    """Minimum-cardinality directed FVS by subset search in increasing size."""
    if dg.n > 25:
        raise CapacityError(f"{dg.n} vertices; brute force is capped at 25")
    if is_dag(dg):
        return 0, np.zeros(0, dtype=np.int64)
    ids = list(range(dg.n))
    for k in range(1, dg.n + 1):
        for subset in combinations(ids, k):
            if verify_directed_fvs(dg, subset):
                return k, np.array(subset, dtype=np.int64)
    raise AssertionError("unreachable: removing all vertices leaves a DAG")
