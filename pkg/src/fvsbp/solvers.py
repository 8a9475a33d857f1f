"""Decimation solvers: message-passing guided and greedy baselines.

The main solver alternates short belief-propagation runs with decimation:
after each run the vertices most likely to be unoccupied are moved into
the feedback vertex set and deleted, the remainder is stripped to its
2-core (stripped vertices can never be needed and are *not* added), and
the surviving messages warm-start the next round.  Every stage removes at
least one vertex, so termination is guaranteed, and the output is checked
with an independent acyclicity test before it is returned.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .bp import BPState, _check_x, _do_sweep, init_state, marginals_empty
from .graph import Graph, induced_subgraph, prune_low_degree
from .model import verify_fvs

DEFAULT_X = 12.0     # good for Poisson-like graphs; 7 suits regular graphs/lattices
DEFAULT_T = 500
DEFAULT_F = 0.01
DEFAULT_EPS = 1e-8


@dataclass
class BpdParams:
    x: float = DEFAULT_X
    t_rounds: int = DEFAULT_T
    f: float = DEFAULT_F
    eps: float = DEFAULT_EPS
    seed: int = 0

    def validate(self) -> "BpdParams":
        _check_x(self.x, positive=True)
        if self.t_rounds < 1:
            raise ValueError(f"t_rounds must be >= 1, got {self.t_rounds}")
        if not 0.0 < self.f <= 1.0:
            raise ValueError(f"decimation fraction must be in (0, 1], got {self.f}")
        if self.eps <= 0:
            raise ValueError(f"eps must be > 0, got {self.eps}")
        return self

    def to_dict(self) -> dict:
        return {"x": self.x, "t_rounds": self.t_rounds, "f": self.f,
                "eps": self.eps, "seed": self.seed}


@dataclass
class StageTrace:
    stage: int
    n_before: int
    k_removed: int
    n_pruned: int
    rounds: int
    max_delta: float


@dataclass
class FvsResult:
    vertices: np.ndarray
    size: int
    weight: float
    verified: bool
    solver: str
    params: dict
    trace: list[StageTrace] | None = None

    @classmethod
    def build(cls, g: Graph, gamma: Iterable[int], solver: str, params: dict,
              trace=None) -> "FvsResult":
        idx = np.array(sorted(int(v) for v in gamma), dtype=np.int64)
        verified = verify_fvs(g, idx)
        if not verified:
            raise RuntimeError(f"{solver} produced a non-feedback set; "
                               "this is a bug")
        return cls(vertices=idx, size=int(idx.size),
                   weight=float(g.weights[idx].sum()), verified=True,
                   solver=solver, params=params, trace=trace)


def select_decimation_targets(empty_prob: np.ndarray, k: int) -> np.ndarray:
    """Indices of the ``k`` largest empty-probabilities, ties to lower index."""
    empty_prob = np.asarray(empty_prob, dtype=np.float64)
    n = empty_prob.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= {n}, got k={k}")
    order = np.lexsort((np.arange(n), -empty_prob))
    return np.sort(order[:k])


def bpd(g: Graph, params: BpdParams | None = None,
        keep_trace: bool = False) -> FvsResult:
    """Construct a feedback vertex set by message passing plus decimation.

    Each stage: up to ``t_rounds`` sweeps (stopping early at a fixed
    point), per-vertex empty probabilities from the current messages,
    then the top ``ceil(f * n_remaining)`` vertices move into the FVS.
    Messages survive decimation (warm start); deleted edges drop theirs.
    """
    params = (params or BpdParams()).validate()
    rng = np.random.default_rng(params.seed)
    gamma: list[int] = []
    trace: list[StageTrace] = []

    core, _ = prune_low_degree(g)
    cur, old_ids, _ = induced_subgraph(g, core)
    state = init_state(cur, params.x, rng)
    stage = 0
    while cur.n > 0:
        delta = math.inf
        rounds = 0
        for _ in range(params.t_rounds):
            delta = _do_sweep(cur, state, rng.permutation(cur.n))
            rounds += 1
            if delta < params.eps:
                break
        empty_prob = marginals_empty(cur, state)
        k = min(cur.n, max(1, math.ceil(params.f * cur.n)))
        targets = select_decimation_targets(empty_prob, k)
        gamma.extend(old_ids[targets].tolist())

        res = prune_low_degree(cur, removed=targets)
        nxt, local_ids, kept_edges = induced_subgraph(cur, res.core)
        q0 = np.empty(2 * nxt.m)
        qr = np.empty(2 * nxt.m)
        q0[nxt.eslots[:, 0]] = state.p_empty[cur.eslots[kept_edges, 0]]
        q0[nxt.eslots[:, 1]] = state.p_empty[cur.eslots[kept_edges, 1]]
        qr[nxt.eslots[:, 0]] = state.p_root[cur.eslots[kept_edges, 0]]
        qr[nxt.eslots[:, 1]] = state.p_root[cur.eslots[kept_edges, 1]]
        if keep_trace:
            trace.append(StageTrace(stage=stage, n_before=cur.n, k_removed=k,
                                    n_pruned=int(res.pruned.size),
                                    rounds=rounds, max_delta=delta))
        state = BPState(x=params.x, p_empty=q0, p_root=qr)
        old_ids = old_ids[local_ids]
        cur = nxt
        stage += 1
    return FvsResult.build(g, gamma, solver="bpd", params=params.to_dict(),
                           trace=trace if keep_trace else None)


def _initial_core(g: Graph) -> tuple[np.ndarray, np.ndarray, deque]:
    alive = np.ones(g.n, dtype=bool)
    deg = g.degrees.copy()
    queue: deque[int] = deque(np.flatnonzero(deg <= 1).tolist())
    _drain(g, alive, deg, queue)
    return alive, deg, queue


def _drain(g: Graph, alive: np.ndarray, deg: np.ndarray, queue: deque) -> None:
    while queue:
        v = queue.popleft()
        if not alive[v] or deg[v] > 1:
            continue
        alive[v] = False
        for u in g.neighbors(v):
            if alive[u]:
                deg[u] -= 1
                if deg[u] <= 1:
                    queue.append(int(u))


def _remove_vertex(g: Graph, v: int, alive: np.ndarray, deg: np.ndarray) -> None:
    alive[v] = False
    queue: deque[int] = deque()
    for u in g.neighbors(v):
        if alive[u]:
            deg[u] -= 1
            if deg[u] <= 1:
                queue.append(int(u))
    _drain(g, alive, deg, queue)


def random_fvs(g: Graph, seed: int = 0) -> FvsResult:
    """Baseline: delete uniformly random 2-core vertices until no cycle is left."""
    rng = np.random.default_rng(seed)
    alive, deg, _ = _initial_core(g)
    gamma = []
    remaining = int(alive.sum())
    while remaining > 0:
        v = int(rng.integers(g.n))
        while not alive[v]:
            v = int(rng.integers(g.n))
        gamma.append(v)
        _remove_vertex(g, v, alive, deg)
        remaining = int(alive.sum())
    return FvsResult.build(g, gamma, solver="random", params={"seed": seed})


def greedy_degree_fvs(g: Graph, seed: int = 0) -> FvsResult:
    """Baseline: repeatedly delete a maximum-degree vertex of the 2-core.

    Ties among maximum-degree vertices are broken uniformly at random.
    """
    rng = np.random.default_rng(seed)
    alive, deg, _ = _initial_core(g)
    gamma = []
    while alive.any():
        cur = np.where(alive, deg, -1)
        top = int(cur.max())
        cands = np.flatnonzero(cur == top)
        v = int(cands[rng.integers(cands.size)])
        gamma.append(v)
        _remove_vertex(g, v, alive, deg)
    return FvsResult.build(g, gamma, solver="greedy_degree", params={"seed": seed})


def redundancy_prune(g: Graph, fvs: Iterable[int]) -> np.ndarray:
    """Drop vertices from an FVS whose return keeps the remainder acyclic.

    Candidates are tried in ascending (weight, index) order; accepted ones
    rejoin the kept forest, so later checks see them.  The result is a
    subset of the input and still a feedback vertex set.
    """
    idx = np.array(sorted(set(int(v) for v in fvs)), dtype=np.int64)
    if not verify_fvs(g, idx):
        raise ValueError("input is not a feedback vertex set")
    kept = np.ones(g.n, dtype=bool)
    kept[idx] = False
    parent = np.arange(g.n, dtype=np.int64)

    def find(v: int) -> int:
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for u, v in g.edges:
        if kept[u] and kept[v]:
            ru, rv = find(int(u)), find(int(v))
            parent[ru] = rv
    order = sorted(idx.tolist(), key=lambda v: (g.weights[v], v))
    remaining = []
    for v in order:
        roots = [find(int(u)) for u in g.neighbors(v) if kept[u]]
        if len(set(roots)) == len(roots):
            kept[v] = True
            for r in roots:
                parent[find(r)] = find(v)
        else:
            remaining.append(v)
    return np.array(sorted(remaining), dtype=np.int64)
