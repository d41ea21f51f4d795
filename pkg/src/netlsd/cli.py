"""Command-line interface.

Exit codes: 0 success, 1 some graphs failed (after processing the rest),
2 usage or input error. Every global flag can also be set through an
environment variable ``NETLSD_<FLAG>`` (e.g. ``NETLSD_DENSE_THRESHOLD``);
flags win over the environment.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

from . import __version__
from .bench import MethodConfig, bench_communities, bench_real_vs_rewired, parse_method
from .compare import SignatureCollection, knn_query, signature_distance
from .errors import NetLSDError
from .graph import (
    MIXING_RATIO,
    NAMED_KINDS,
    gen_erdos_renyi,
    gen_named,
    gen_sbm,
    read_edge_list,
    rewire_degree_preserving,
    sbm_probabilities,
    write_edge_list,
)
from .io import load_signature_file, parse_grid, read_manifest, write_report, write_signatures
from .signature import KERNELS, NORMALIZATIONS, STRATEGIES, TimeGrid, compute_signature, default_grid
from .spectral import DEFAULT_TOL, DENSE_THRESHOLD

ENV_PREFIX = "NETLSD_"
log = logging.getLogger("netlsd")


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    kernel: str
    normalization: str
    grid: TimeGrid
    strategy: str
    k: int
    dense_threshold: int
    tol: float
    seed: int
    threads: int

    def validate(self):
        if self.kernel not in KERNELS:
            raise UsageError(f"unknown kernel {self.kernel!r}")
        if self.normalization not in NORMALIZATIONS:
            raise UsageError(f"unknown normalization {self.normalization!r}")
        if self.strategy not in STRATEGIES:
            raise UsageError(f"unknown strategy {self.strategy!r}")
        if self.strategy == "taylor" and self.kernel != "heat":
            raise UsageError("the taylor strategy supports the heat kernel only")
        if self.k < 2:
            raise UsageError("--k must be >= 2")
        if self.tol <= 0:
            raise UsageError("--tol must be positive")
        if self.dense_threshold < 1:
            raise UsageError("--dense-threshold must be >= 1")
        if self.threads < 1:
            raise UsageError("--threads must be >= 1")
        if self.kernel == "wave" and (self.grid.values[0] < 0 or self.grid.values[-1] >= 2 * 3.141592653589793):
            raise UsageError("wave signatures need a grid inside [0, 2*pi)")
        return self

    def provenance(self) -> dict:
        return {
            "strategy": self.strategy,
            "k": self.k,
            "tol": repr(self.tol),
            "dense_threshold": self.dense_threshold,
            "seed": self.seed,
        }

    @property
    def method(self) -> MethodConfig:
        return MethodConfig(self.kernel, self.normalization, self.grid, self.strategy, self.k,
                            self.dense_threshold, self.tol)


def _env(name, default):
    return os.environ.get(ENV_PREFIX + name, default)


def _common_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("signature options")
    g.add_argument("--kernel", default=_env("KERNEL", "heat"), help="heat or wave (default heat)")
    g.add_argument("--norm", default=_env("NORM", "empty"), help="none, empty or complete (default empty)")
    g.add_argument("--grid", default=_env("GRID", None),
                   help="count,min,max,log|lin (default 250,0.01,100,log; wave: 250 points in [0, 2pi))")
    g.add_argument("--strategy", default=_env("STRATEGY", "auto"), help="full, approx, taylor or auto")
    g.add_argument("--k", type=int, default=int(_env("K", 300)), help="eigenvalues for approx, split evenly")
    g.add_argument("--tol", type=float, default=float(_env("TOL", DEFAULT_TOL)))
    g.add_argument("--dense-threshold", type=int, default=int(_env("DENSE_THRESHOLD", DENSE_THRESHOLD)))
    g.add_argument("--seed", type=int, default=int(_env("SEED", 0)))
    g.add_argument("--threads", type=int, default=int(_env("THREADS", os.cpu_count() or 1)))
    return p


def _config(args) -> RunConfig:
    try:
        grid = parse_grid(args.grid) if args.grid else default_grid(args.kernel)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return RunConfig(args.kernel, args.norm, grid, args.strategy, args.k, args.dense_threshold,
                     args.tol, args.seed, args.threads).validate()


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(prog="netlsd", description="Spectral trace signatures of graphs.")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("embed", parents=[common], help="signatures for every graph in a manifest")
    p.add_argument("manifest")
    p.add_argument("-o", "--out", required=True)
    p.add_argument("--errors", help="error sidecar path (default <out>.errors)")
    p.add_argument("--id-policy", choices=("remap", "dense"), default="remap")
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("dist", help="L2 distance between two signatures")
    p.add_argument("sigfile")
    p.add_argument("id_a")
    p.add_argument("id_b")
    p.add_argument("--other", help="look id_b up in this signature file instead")
    p.set_defaults(func=cmd_dist)

    p = sub.add_parser("knn", help="nearest signatures to a stored one")
    p.add_argument("sigfile")
    p.add_argument("query_id")
    p.add_argument("k", type=int)
    p.set_defaults(func=cmd_knn)

    p = sub.add_parser("gen", parents=[common], help="write a synthetic graph as an edge list")
    p.add_argument("kind", choices=NAMED_KINDS + ("er", "sbm"))
    p.add_argument("n", type=int)
    p.add_argument("--mean-degree", type=float, default=10.0)
    p.add_argument("--blocks", type=int, default=10)
    p.add_argument("--p-in", type=float)
    p.add_argument("--p-out", type=float)
    p.add_argument("--mixing-ratio", type=float, default=MIXING_RATIO)
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("rewire", parents=[common], help="degree-preserving randomization of an edge list")
    p.add_argument("edgelist")
    p.add_argument("--sweeps", type=int, default=10)
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_rewire)

    p = sub.add_parser("bench", help="synthetic benchmarks")
    bsub = p.add_subparsers(dest="bench", required=True)
    b = bsub.add_parser("communities", parents=[common], help="ER vs SBM 1-NN accuracy")
    b.add_argument("--n", type=int, default=256, help="graph size (or size-law parameter)")
    b.add_argument("--size-law", choices=("fixed", "poisson", "uniform"), default="fixed")
    b.add_argument("--per-class", type=int, default=1000)
    b.add_argument("--method", help="heat, heat-empty, wave-complete, ... (default from --kernel/--norm)")
    b.add_argument("--trials", type=int, default=100)
    b.add_argument("--mixing-ratio", type=float, default=MIXING_RATIO)
    b.add_argument("--per-trial", action="store_true")
    b.add_argument("-o", "--out")
    b.set_defaults(func=cmd_bench_communities)
    b = bsub.add_parser("rewired", parents=[common], help="real vs rewired ROC AUC")
    b.add_argument("manifest")
    b.add_argument("--sweeps", type=int, default=10)
    b.add_argument("--method")
    b.add_argument("--trials", type=int, default=100)
    b.add_argument("--per-trial", action="store_true")
    b.add_argument("-o", "--out")
    b.set_defaults(func=cmd_bench_rewired)
    return parser


class _Output:
    def __init__(self, path: Optional[str]):
        self.path = path

    def __enter__(self):
        self.fh = open(self.path, "w") if self.path else sys.stdout
        return self.fh

    def __exit__(self, *exc):
        if self.path:
            self.fh.close()


# ------------------------------------------------------------ subcommands


def cmd_embed(args) -> int:
    cfg = _config(args)
    try:
        entries = read_manifest(args.manifest)
    except OSError as exc:
        raise UsageError(f"cannot read manifest: {exc}") from None

    def work(entry):
        start = time.perf_counter()
        g = read_edge_list(entry.path, args.id_policy)
        sig = compute_signature(g, cfg.kernel, cfg.grid, cfg.normalization, cfg.strategy, cfg.k,
                                cfg.dense_threshold, cfg.tol)
        return g, sig, time.perf_counter() - start

    def guarded(entry):
        try:
            return work(entry)
        except (OSError, NetLSDError, ValueError) as exc:
            return exc

    print("graph_id,n,m,seconds", file=sys.stderr)
    with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
        results = list(pool.map(guarded, entries))

    ok, failed = [], []
    for entry, res in zip(entries, results):
        if isinstance(res, Exception):
            failed.append((entry.graph_id, f"{type(res).__name__}: {res}"))
            continue
        g, sig, seconds = res
        print(f"{entry.graph_id},{g.n},{g.m},{seconds:.6f}", file=sys.stderr)
        ok.append((entry.graph_id, sig))

    with open(args.out, "w") as out:
        write_signatures(out, ok, cfg.kernel, cfg.normalization, cfg.grid, cfg.provenance())
    sidecar = args.errors or args.out + ".errors"
    if failed:
        with open(sidecar, "w") as fh:
            for gid, msg in failed:
                fh.write(f"{gid}\t{msg}\n")
        log.error("%d of %d graphs failed; see %s", len(failed), len(entries), sidecar)
        return 1
    if os.path.exists(sidecar):
        os.remove(sidecar)
    return 0


def _load_collection(path) -> SignatureCollection:
    try:
        _, _, _, items = load_signature_file(path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None
    if not items:
        raise UsageError(f"{path} holds no signatures")
    return SignatureCollection.from_signatures(items)


def _lookup(coll: SignatureCollection, gid: str, path: str):
    if gid not in coll.ids:
        raise UsageError(f"unknown id {gid!r} in {path}")
    return coll.signature(gid)


def cmd_dist(args) -> int:
    coll_a = _load_collection(args.sigfile)
    coll_b = _load_collection(args.other) if args.other else coll_a
    if coll_a.meta != coll_b.meta:
        raise UsageError("signature files are incompatible (kernel, normalization or grid differ)")
    a = _lookup(coll_a, args.id_a, args.sigfile)
    b = _lookup(coll_b, args.id_b, args.other or args.sigfile)
    print(f"{signature_distance(a, b):.12g}")
    return 0


def cmd_knn(args) -> int:
    if args.k < 1:
        raise UsageError("k must be >= 1")
    coll = _load_collection(args.sigfile)
    query = _lookup(coll, args.query_id, args.sigfile)
    print("rank,id,distance")
    for rank, (gid, d) in enumerate(knn_query(coll, query, args.k), start=1):
        print(f"{rank},{gid},{d:.12g}")
    return 0


def cmd_gen(args) -> int:
    if args.kind == "er":
        g = gen_erdos_renyi(args.n, args.mean_degree, args.seed)
    elif args.kind == "sbm":
        if args.p_in is not None and args.p_out is not None:
            p_in, p_out = args.p_in, args.p_out
        else:
            p_in, p_out = sbm_probabilities(args.n, args.blocks, args.mean_degree, args.mixing_ratio)
        g = gen_sbm(args.n, args.blocks, p_in, p_out, args.seed)
    else:
        g = gen_named(args.kind, args.n)
    with _Output(args.out) as out:
        write_edge_list(g, out)
    return 0


def cmd_rewire(args) -> int:
    try:
        g = read_edge_list(args.edgelist)
    except OSError as exc:
        raise UsageError(f"cannot read {args.edgelist}: {exc}") from None
    if args.sweeps < 1:
        raise UsageError("--sweeps must be >= 1")
    with _Output(args.out) as out:
        write_edge_list(rewire_degree_preserving(g, args.sweeps, args.seed), out)
    return 0


def _method(args, cfg: RunConfig) -> MethodConfig:
    if not args.method:
        return cfg.method
    grid = cfg.grid if args.grid else None
    return parse_method(args.method, grid=grid, strategy=cfg.strategy, k=cfg.k,
                        dense_threshold=cfg.dense_threshold, tol=cfg.tol)


def cmd_bench_communities(args) -> int:
    cfg = _config(args)
    method = _method(args, cfg)
    reports = bench_communities(args.size_law, args.n, args.per_class, [method], args.trials, cfg.seed,
                                mixing_ratio=args.mixing_ratio)
    with _Output(args.out) as out:
        write_report(out, reports[method.name], args.per_trial)
    return 0


def cmd_bench_rewired(args) -> int:
    cfg = _config(args)
    method = _method(args, cfg)
    try:
        entries = read_manifest(args.manifest)
        graphs = [(e.graph_id, read_edge_list(e.path)) for e in entries]
    except OSError as exc:
        raise UsageError(f"cannot read graphs: {exc}") from None
    reports = bench_real_vs_rewired(graphs, args.sweeps, [method], args.trials, cfg.seed)
    with _Output(args.out) as out:
        write_report(out, reports[method.name], args.per_trial)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"netlsd: error: {exc}", file=sys.stderr)
        return 2
    except (NetLSDError, ValueError) as exc:
        print(f"netlsd: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
