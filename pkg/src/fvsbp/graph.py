"""Undirected simple graphs: representation, generators, structural queries.

Vertices are integers ``0..n-1`` internally; the text file formats in
:mod:`fvsbp.io` are 1-based.  A :class:`Graph` is immutable after
construction (its arrays are marked read-only) and safe to share across
threads.

The adjacency is stored in CSR form.  Each directed edge ``i -> j`` owns a
*slot* ``p`` in ``indptr``/``nbr`` order; ``rec[p]`` is the slot of the
reverse edge ``j -> i`` and ``eslots[e]`` gives the two slots of undirected
edge ``e``.  Message-passing code indexes its per-edge state by slot.
"""

from __future__ import annotations

from collections import deque
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import GenerationError

TREE = "tree"
CTREE = "c-tree"
MULTI_CYCLE = "multi-cycle"

RR_MAX_RESTARTS = 100


class Component(NamedTuple):
    vertices: np.ndarray
    n_edges: int
    label: str


class PruneResult(NamedTuple):
    core: np.ndarray    # vertices of the 2-core, sorted
    pruned: np.ndarray  # vertices stripped by the degree<=1 cascade, sorted


class Graph:
    """Immutable undirected simple graph with non-negative vertex weights."""

    __slots__ = ("n", "m", "edges", "weights", "degrees", "indptr", "nbr",
                 "rec", "eslots", "_cache")

    def __init__(self, n: int, edges: Iterable[Sequence[int]],
                 weights: Sequence[float] | None = None):
        if n < 0:
            raise ValueError(f"vertex count must be >= 0, got {n}")
        e = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges,
                       dtype=np.int64)
        e = e.reshape(-1, 2)
        m = e.shape[0]
        if m:
            if e.min() < 0 or e.max() >= n:
                raise ValueError("edge endpoint out of range")
            if np.any(e[:, 0] == e[:, 1]):
                raise ValueError("self-loops are not allowed")
            keys = np.minimum(e[:, 0], e[:, 1]) * n + np.maximum(e[:, 0], e[:, 1])
            if np.unique(keys).size != m:
                raise ValueError("duplicate edges are not allowed")
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
        self.edges = e
        self.weights = w

        src = np.concatenate([e[:, 0], e[:, 1]])
        dst = np.concatenate([e[:, 1], e[:, 0]])
        order = np.lexsort((dst, src))
        self.nbr = dst[order]
        self.degrees = np.bincount(src, minlength=n).astype(np.int64)
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(self.degrees, out=indptr[1:])
        self.indptr = indptr

        # slot pairing: positions sorted by undirected edge id come in pairs
        eid_sorted = np.concatenate([np.arange(m), np.arange(m)])[order]
        q = np.argsort(eid_sorted, kind="stable")
        rec = np.empty(2 * m, dtype=np.int64)
        rec[q[0::2]] = q[1::2]
        rec[q[1::2]] = q[0::2]
        self.rec = rec
        s0, s1 = q[0::2], q[1::2]
        fwd = src[order][s0] == e[:, 0] if m else np.zeros(0, dtype=bool)
        eslots = np.empty((m, 2), dtype=np.int64)
        eslots[:, 0] = np.where(fwd, s0, s1)
        eslots[:, 1] = np.where(fwd, s1, s0)
        self.eslots = eslots

        for arr in (self.edges, self.weights, self.degrees, self.indptr,
                    self.nbr, self.rec, self.eslots):
            arr.flags.writeable = False
        self._cache: dict = {}

    def neighbors(self, i: int) -> np.ndarray:
        return self.nbr[self.indptr[i]:self.indptr[i + 1]]

    def degree(self, i: int) -> int:
        return int(self.degrees[i])

    @property
    def max_degree(self) -> int:
        return int(self.degrees.max()) if self.n else 0

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"


def gen_er(n: int, c: float, seed: int) -> Graph:
    """Erdos-Renyi graph with exactly ``round(c*n/2)`` edges.

    Edges are drawn uniformly among simple graphs by rejection of
    self-loops and duplicates; deterministic for a given seed.
    """
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    if c < 0:
        raise ValueError(f"mean degree must be >= 0, got {c}")
    m = int(round(c * n / 2.0))
    if m > n * (n - 1) // 2:
        raise ValueError(f"cannot place {m} distinct edges on {n} vertices")
    rng = np.random.default_rng(seed)
    seen: set[int] = set()
    ei = np.empty(m, dtype=np.int64)
    ej = np.empty(m, dtype=np.int64)
    have = 0
    while have < m:
        batch = max(1024, 2 * (m - have))
        draws = rng.integers(0, n, size=2 * batch)
        for t in range(batch):
            i, j = int(draws[2 * t]), int(draws[2 * t + 1])
            if i == j:
                continue
            key = (i * n + j) if i < j else (j * n + i)
            if key in seen:
                continue
            seen.add(key)
            ei[have] = i
            ej[have] = j
            have += 1
            if have == m:
                break
    return Graph(n, np.column_stack([ei, ej]))


def gen_rr(n: int, k: int, seed: int) -> Graph:
    """Random k-regular graph via stub pairing, restarted on collisions."""
    if not 0 <= k < n:
        raise ValueError(f"need 0 <= k < n, got k={k}, n={n}")
    if (n * k) % 2 != 0:
        raise ValueError(f"n*k must be even, got n={n}, k={k}")
    rng = np.random.default_rng(seed)
    m = n * k // 2
    stubs = np.repeat(np.arange(n, dtype=np.int64), k)
    for _ in range(RR_MAX_RESTARTS):
        perm = rng.permutation(stubs)
        u, v = perm[0::2], perm[1::2]
        if np.any(u == v):
            continue
        keys = np.minimum(u, v) * n + np.maximum(u, v)
        if np.unique(keys).size != m:
            continue
        return Graph(n, np.column_stack([u, v]))
    raise GenerationError(
        f"pairing failed {RR_MAX_RESTARTS} times for n={n}, k={k}")


def gen_lattice(d: int, l: int) -> Graph:
    """Hyper-cubic lattice with periodic boundaries: ``l**d`` vertices of degree ``2*d``.

    Vertex index is the row-major encoding of the coordinate vector.
    """
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    if l < 3:
        raise ValueError(f"side length must be >= 3 (periodic wrap), got {l}")
    n = l ** d
    ids = np.arange(n, dtype=np.int64)
    chunks = []
    for axis in range(d):
        stride = l ** (d - 1 - axis)
        coord = (ids // stride) % l
        plus = np.where(coord < l - 1, ids + stride, ids - (l - 1) * stride)
        chunks.append(np.column_stack([ids, plus]))
    return Graph(n, np.concatenate(chunks))


def prune_low_degree(g: Graph, removed: Iterable[int] | None = None) -> PruneResult:
    """Recursively strip vertices of degree 0 or 1 from ``g`` minus ``removed``.

    Returns the 2-core (every remaining vertex has degree >= 2, or the core
    is empty) and the cascade-pruned vertices.  Pruned vertices can never be
    needed in a feedback vertex set.  Vertices listed in ``removed`` appear
    in neither output.  O(n + m).
    """
    alive = np.ones(g.n, dtype=bool)
    deg = g.degrees.copy()
    queue: deque[int] = deque()
    if removed is not None:
        for v in removed:
            v = int(v)
            if not alive[v]:
                continue
            alive[v] = False
            for u in g.neighbors(v):
                if alive[u]:
                    deg[u] -= 1
                    if deg[u] <= 1:
                        queue.append(int(u))
    queue.extend(np.flatnonzero(alive & (deg <= 1)).tolist())
    pruned = []
    while queue:
        v = queue.popleft()
        if not alive[v]:
            continue
        alive[v] = False
        pruned.append(v)
        for u in g.neighbors(v):
            if alive[u]:
                deg[u] -= 1
                if deg[u] <= 1:
                    queue.append(int(u))
    return PruneResult(core=np.flatnonzero(alive),
                       pruned=np.array(sorted(pruned), dtype=np.int64))


def _find(parent: np.ndarray, x: int) -> int:
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


def is_acyclic(g: Graph, vertices: Iterable[int] | None = None) -> bool:
    """True iff the induced subgraph on ``vertices`` (default: all) is a forest."""
    if vertices is None:
        mask = np.ones(g.n, dtype=bool)
    else:
        mask = np.zeros(g.n, dtype=bool)
        mask[np.asarray(list(vertices), dtype=np.int64)] = True
    parent = np.arange(g.n, dtype=np.int64)
    for u, v in g.edges:
        if mask[u] and mask[v]:
            ru, rv = _find(parent, u), _find(parent, v)
            if ru == rv:
                return False
            parent[ru] = rv
    return True


def classify_components(g: Graph, vertices: Iterable[int] | None = None
                        ) -> list[Component]:
    """Connected components of the induced subgraph, labelled by cycle content.

    A component with ``n_c`` vertices and ``m_c`` edges is a tree
    (``m_c == n_c - 1``), a c-tree (``m_c == n_c``, exactly one cycle) or
    multi-cycle (``m_c > n_c``).
    """
    if vertices is None:
        verts = np.arange(g.n, dtype=np.int64)
        mask = np.ones(g.n, dtype=bool)
    else:
        verts = np.unique(np.asarray(list(vertices), dtype=np.int64))
        mask = np.zeros(g.n, dtype=bool)
        mask[verts] = True
    parent = np.arange(g.n, dtype=np.int64)
    edge_count: dict[int, int] = {}
    for u, v in g.edges:
        if mask[u] and mask[v]:
            ru, rv = _find(parent, u), _find(parent, v)
            if ru != rv:
                parent[ru] = rv
    for u, v in g.edges:
        if mask[u] and mask[v]:
            r = _find(parent, u)
            edge_count[r] = edge_count.get(r, 0) + 1
    groups: dict[int, list[int]] = {}
    for v in verts:
        groups.setdefault(_find(parent, int(v)), []).append(int(v))
    out = []
    for root, members in groups.items():
        nc, mc = len(members), edge_count.get(root, 0)
        if mc == nc - 1:
            label = TREE
        elif mc == nc:
            label = CTREE
        else:
            label = MULTI_CYCLE
        out.append(Component(np.array(sorted(members), dtype=np.int64), mc, label))
    out.sort(key=lambda comp: int(comp.vertices[0]))
    return out


def induced_subgraph(g: Graph, vertices: Iterable[int]
                     ) -> tuple[Graph, np.ndarray, np.ndarray]:
    """Materialize the induced subgraph on ``vertices``.

    Returns ``(sub, old_vertex_ids, old_edge_ids)`` where
    ``old_vertex_ids[new_id] = old_id`` (sorted ascending) and
    ``old_edge_ids`` indexes ``g.edges`` row-wise for the kept edges.
    """
    old_ids = np.unique(np.asarray(list(vertices), dtype=np.int64))
    if old_ids.size and (old_ids[0] < 0 or old_ids[-1] >= g.n):
        raise ValueError("vertex id out of range")
    new_of_old = np.full(g.n, -1, dtype=np.int64)
    new_of_old[old_ids] = np.arange(old_ids.size)
    if g.m:
        keep = (new_of_old[g.edges[:, 0]] >= 0) & (new_of_old[g.edges[:, 1]] >= 0)
        old_edge_ids = np.flatnonzero(keep)
        new_edges = new_of_old[g.edges[old_edge_ids]]
    else:
        old_edge_ids = np.zeros(0, dtype=np.int64)
        new_edges = np.zeros((0, 2), dtype=np.int64)
    sub = Graph(old_ids.size, new_edges, g.weights[old_ids])
    return sub, old_ids, old_edge_ids
