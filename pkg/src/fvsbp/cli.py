"""Command-line front end.

Subcommands: ``generate`` writes graph files, ``solve`` runs a solver and
emits an FVS result as JSON, ``ensemble`` sweeps population dynamics over
a grid of re-weighting values and writes a CSV curve, ``verify`` checks a
result file against a graph file, and ``oracle`` exposes the exact
enumeration checks for small instances.

Set the environment variable ``FVS_LOG`` (DEBUG/INFO/WARNING/...) to
control log verbosity.  All randomized commands take ``--seed`` and are
reproducible given it.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import solvers
from . import directed as directed_mod
from . import io as fio
from . import model, popdyn
from .errors import CapacityError
from .graph import gen_er, gen_lattice, gen_rr

log = logging.getLogger("fvsbp")

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_ERROR = 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fvsbp",
        description="Feedback vertex set solvers and exact oracles.")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a graph file")
    gen.add_argument("kind", choices=["er", "rr", "lattice"])
    gen.add_argument("--n", type=int, help="vertex count (er, rr)")
    gen.add_argument("--c", type=float, help="mean degree (er)")
    gen.add_argument("--k", type=int, help="degree (rr)")
    gen.add_argument("--d", type=int, help="lattice dimension")
    gen.add_argument("--l", type=int, help="lattice side length")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", help="output path (default: stdout)")

    slv = sub.add_parser("solve", help="construct a feedback vertex set")
    slv.add_argument("graph", help="edge-list file")
    slv.add_argument("--algo", choices=["bpd", "greedy", "random"],
                     default="bpd")
    slv.add_argument("--weights", help="optional per-vertex weight file")
    slv.add_argument("--x", type=float, default=solvers.DEFAULT_X,
                     help="re-weighting parameter (bpd)")
    slv.add_argument("--t-rounds", type=int, default=solvers.DEFAULT_T,
                     help="sweeps per decimation stage (bpd)")
    slv.add_argument("--f-frac", type=float, default=solvers.DEFAULT_F,
                     help="decimation fraction per stage (bpd)")
    slv.add_argument("--eps", type=float, default=solvers.DEFAULT_EPS,
                     help="early-exit convergence threshold (bpd)")
    slv.add_argument("--seed", type=int, default=0)
    slv.add_argument("--prune-redundant", action="store_true",
                     help="post-process: drop vertices whose return keeps "
                          "the remainder acyclic")
    slv.add_argument("--trace", help="write per-stage CSV trace here (bpd)")
    slv.add_argument("--out", help="output path for the result JSON")

    ens = sub.add_parser("ensemble", help="population-dynamics curve")
    ens.add_argument("kind", choices=["er", "rr"])
    ens.add_argument("--c", type=float, help="mean degree (er)")
    ens.add_argument("--k", type=int, help="degree (rr)")
    ens.add_argument("--x-grid", default="0.5:20:0.5",
                     help="grid as start:stop:step or comma list")
    ens.add_argument("--pop-size", type=int, default=popdyn.DEFAULT_POP)
    ens.add_argument("--burnin", type=int, default=popdyn.DEFAULT_BURNIN)
    ens.add_argument("--measure", type=int, default=popdyn.DEFAULT_MEASURE)
    ens.add_argument("--seed", type=int, default=0)
    ens.add_argument("--jobs", type=int, default=1,
                     help="grid points evaluated in parallel")
    ens.add_argument("--out", required=True, help="CSV output path")

    ver = sub.add_parser("verify", help="check an FVS result file")
    ver.add_argument("graph")
    ver.add_argument("fvs", help="result JSON")
    ver.add_argument("--directed", action="store_true",
                     help="treat the graph file as an arc list")

    orc = sub.add_parser("oracle", help="exact checks for small graphs")
    orc.add_argument("graph")
    orc.add_argument("--x", type=float, default=1.0)
    orc.add_argument("--out", help="output path for the JSON report")
    return parser


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_generate(args) -> int:
    if args.kind == "er":
        if args.n is None or args.c is None:
            raise ValueError("er needs --n and --c")
        g = gen_er(args.n, args.c, args.seed)
    elif args.kind == "rr":
        if args.n is None or args.k is None:
            raise ValueError("rr needs --n and --k")
        g = gen_rr(args.n, args.k, args.seed)
    else:
        if args.d is None or args.l is None:
            raise ValueError("lattice needs --d and --l")
        g = gen_lattice(args.d, args.l)
    if args.out:
        fio.write_edgelist(g, args.out)
        log.info("wrote %s to %s", g, args.out)
    else:
        lines = [f"{g.n} {g.m}"]
        lines.extend(f"{u + 1} {v + 1}" for u, v in g.edges)
        sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_OK


def _cmd_solve(args) -> int:
    g = fio.read_edgelist(args.graph, args.weights)
    if args.algo == "bpd":
        params = solvers.BpdParams(x=args.x, t_rounds=args.t_rounds,
                                   f=args.f_frac, eps=args.eps, seed=args.seed)
        result = solvers.bpd(g, params, keep_trace=bool(args.trace))
    elif args.algo == "greedy":
        result = solvers.greedy_degree_fvs(g, args.seed)
    else:
        result = solvers.random_fvs(g, args.seed)
    vertices = result.vertices
    solver = result.solver
    if args.prune_redundant:
        vertices = solvers.redundancy_prune(g, vertices)
        solver += "+prune"
    if not model.verify_fvs(g, vertices):
        log.error("verification failed for %s on %s", solver, args.graph)
        return EXIT_INVALID
    if args.trace and result.trace is not None:
        with open(args.trace, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["stage", "n_remaining", "removed",
                             "pruned", "rounds", "max_delta"])
            for t in result.trace:
                writer.writerow([t.stage, t.n_before, t.k_removed,
                                 t.n_pruned, t.rounds, t.max_delta])
    obj = {
        "size": int(len(vertices)),
        "weight": float(g.weights[np.asarray(vertices, dtype=np.int64)].sum())
        if len(vertices) else 0.0,
        "vertices": [int(v) + 1 for v in vertices],
        "verified": True,
        "solver": solver,
        "params": result.params,
    }
    _emit(json.dumps(obj, indent=2) + "\n", args.out)
    return EXIT_OK


def _parse_grid(spec: str) -> list[float]:
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise ValueError(f"grid must be start:stop:step, got {spec!r}")
        start, stop, step = (float(p) for p in parts)
        if step <= 0 or stop < start:
            raise ValueError(f"bad grid {spec!r}")
        count = int(round((stop - start) / step)) + 1
        return [start + i * step for i in range(count)]
    return [float(p) for p in spec.split(",") if p.strip()]


def _pd_point(task):
    kind, degree, x, pop_size, burnin, measure, seed = task
    return popdyn.pd_run(kind, degree, x, pop_size, burnin, measure, seed)


def _cmd_ensemble(args) -> int:
    if args.kind == "er":
        if args.c is None:
            raise ValueError("er needs --c")
        degree = args.c
    else:
        if args.k is None:
            raise ValueError("rr needs --k")
        degree = args.k
    grid = _parse_grid(args.x_grid)
    if not grid:
        raise ValueError("empty grid")
    tasks = [(args.kind, degree, x, args.pop_size, args.burnin, args.measure,
              args.seed + i) for i, x in enumerate(grid)]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_pd_point, tasks))
    else:
        rows = [_pd_point(t) for t in tasks]
    curve = popdyn.EnsembleCurve(rows)
    curve.write_csv(args.out)
    try:
        ext = popdyn.extract_rho0(curve)
        summary = {"rho0": ext.rho0, "min_fvs_fraction": 1.0 - ext.rho0,
                   "x_cross": ext.x_cross, "flagged": ext.flagged}
    except ValueError as exc:
        summary = {"error": str(exc)}
    sys.stdout.write(json.dumps(summary) + "\n")
    return EXIT_OK


def _cmd_verify(args) -> int:
    try:
        fvs = fio.read_fvs_json(args.fvs)
        if args.directed:
            dg = fio.read_arclist(args.graph)
            ok = directed_mod.verify_directed_fvs(dg, fvs["vertices"])
        else:
            g = fio.read_edgelist(args.graph)
            ok = model.verify_fvs(g, fvs["vertices"])
    except (fio.ParseError, OSError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_ERROR
    sys.stdout.write("valid\n" if ok else "invalid\n")
    return EXIT_OK if ok else EXIT_INVALID


def _cmd_oracle(args) -> int:
    g = fio.read_edgelist(args.graph)
    z_states = model.exact_partition_states(g, args.x)
    z_subgraphs = model.exact_partition_subgraphs(g, args.x)
    size, witness = model.brute_min_fvs(g)
    obj = {
        "x": args.x,
        "Z_states": z_states,
        "Z_subgraphs": z_subgraphs,
        "min_fvs": {"size": size, "vertices": [int(v) + 1 for v in witness]},
    }
    _emit(json.dumps(obj, indent=2) + "\n", args.out)
    return EXIT_OK


def main(argv=None) -> int:
    logging.basicConfig(level=os.environ.get("FVS_LOG", "WARNING").upper(),
                        format="%(levelname)s %(name)s: %(message)s")
    args = _build_parser().parse_args(argv)
    handler = {
        "generate": _cmd_generate,
        "solve": _cmd_solve,
        "ensemble": _cmd_ensemble,
        "verify": _cmd_verify,
        "oracle": _cmd_oracle,
    }[args.command]
    try:
        return handler(args)
    except (fio.ParseError, CapacityError, ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
