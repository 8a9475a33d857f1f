"""Plain-text file formats.

All vertex indices are 1-based on disk and 0-based in memory.

* edge list: first line ``N M``, then ``M`` lines ``i j``.
* weights: ``N`` lines, one non-negative real per vertex.
* configuration: ``N`` lines ``i A_i`` where ``A_i = 0`` marks an
  unoccupied vertex and ``A_i = i`` a root.
* arc list (directed): first line ``N M``, then ``M`` lines ``i j``
  meaning an arc ``i -> j``.
* FVS result: JSON object with keys ``size``, ``weight``, ``vertices``
  (1-based) and ``verified``.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .graph import Graph

EMPTY = -1  # in-memory state of an unoccupied vertex


class ParseError(ValueError):
    """Malformed input file."""


def _tokens(path) -> list[str]:
    return Path(path).read_text().split()


def write_edgelist(g: Graph, path) -> None:
    lines = [f"{g.n} {g.m}"]
    lines.extend(f"{u + 1} {v + 1}" for u, v in g.edges)
    Path(path).write_text("\n".join(lines) + "\n")


def read_edgelist(path, weights_path=None) -> Graph:
    toks = _tokens(path)
    try:
        n, m = int(toks[0]), int(toks[1])
        if len(toks) != 2 + 2 * m:
            raise ParseError(f"{path}: expected {2 * m} endpoint tokens, "
                             f"got {len(toks) - 2}")
        pairs = np.array(toks[2:], dtype=np.int64).reshape(m, 2) - 1
    except (IndexError, ValueError) as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(f"{path}: not a valid edge list ({exc})") from exc
    weights = read_weights(weights_path, n) if weights_path else None
    try:
        return Graph(n, pairs, weights)
    except ValueError as exc:
        raise ParseError(f"{path}: {exc}") from exc


def write_weights(weights, path) -> None:
    Path(path).write_text("\n".join(repr(float(w)) for w in weights) + "\n")


def read_weights(path, n: int | None = None) -> np.ndarray:
    toks = _tokens(path)
    try:
        w = np.array([float(t) for t in toks], dtype=np.float64)
    except ValueError as exc:
        raise ParseError(f"{path}: bad weight entry ({exc})") from exc
    if n is not None and w.size != n:
        raise ParseError(f"{path}: expected {n} weights, got {w.size}")
    return w


def write_config(states, path) -> None:
    """Write a per-vertex state vector (pointer form, EMPTY = unoccupied)."""
    lines = []
    for i, a in enumerate(np.asarray(states, dtype=np.int64)):
        lines.append(f"{i + 1} {0 if a == EMPTY else int(a) + 1}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_config(path) -> np.ndarray:
    toks = _tokens(path)
    if len(toks) % 2 != 0:
        raise ParseError(f"{path}: configuration lines must be 'i A_i' pairs")
    try:
        flat = np.array(toks, dtype=np.int64).reshape(-1, 2)
    except ValueError as exc:
        raise ParseError(f"{path}: bad configuration entry ({exc})") from exc
    n = flat.shape[0]
    states = np.full(n, EMPTY, dtype=np.int64)
    for idx, a in flat:
        if not 1 <= idx <= n:
            raise ParseError(f"{path}: vertex index {idx} out of range 1..{n}")
        states[idx - 1] = EMPTY if a == 0 else a - 1
    return states


def write_fvs_json(path, vertices, weight: float, verified: bool,
                   solver: str | None = None, params: dict | None = None) -> None:
    obj = {
        "size": int(len(vertices)),
        "weight": float(weight),
        "vertices": [int(v) + 1 for v in sorted(int(v) for v in vertices)],
        "verified": bool(verified),
    }
    if solver is not None:
        obj["solver"] = solver
    if params is not None:
        obj["params"] = params
    Path(path).write_text(json.dumps(obj, indent=2) + "\n")


def read_fvs_json(path) -> dict:
    """Read an FVS result file; ``vertices`` come back 0-based."""
    try:
        obj = json.loads(Path(path).read_text())
        obj["vertices"] = np.array(sorted(int(v) - 1 for v in obj["vertices"]),
                                   dtype=np.int64)
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{path}: not a valid FVS result ({exc})") from exc
    return obj


def write_arclist(dg, path) -> None:
    lines = [f"{dg.n} {dg.m}"]
    lines.extend(f"{u + 1} {v + 1}" for u, v in dg.arcs)
    Path(path).write_text("\n".join(lines) + "\n")


def read_arclist(path, weights_path=None):
    from .directed import DiGraph

    toks = _tokens(path)
    try:
        n, m = int(toks[0]), int(toks[1])
        if len(toks) != 2 + 2 * m:
            raise ParseError(f"{path}: expected {2 * m} endpoint tokens, "
                             f"got {len(toks) - 2}")
        pairs = np.array(toks[2:], dtype=np.int64).reshape(m, 2) - 1
    except (IndexError, ValueError) as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(f"{path}: not a valid arc list ({exc})") from exc
    weights = read_weights(weights_path, n) if weights_path else None
    try:
        return DiGraph(n, pairs, weights)
    except ValueError as exc:
        raise ParseError(f"{path}: {exc}") from exc
