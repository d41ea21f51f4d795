"""Synthetic experiments: community detection, real-vs-rewired, approximation quality, timing."""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .compare import EvalReport, SignatureCollection, evaluate_1nn
from .graph import (
    MIXING_RATIO,
    Graph,
    gen_erdos_renyi,
    random_graph_sizes,
    rewire_degree_preserving,
    sample_sbm,
    sbm_probabilities,
)
from .signature import (
    DEFAULT_K,
    TimeGrid,
    compute_spectrum,
    default_grid,
    heat_trace,
    signature_from_spectrum,
)
from .spectral import DEFAULT_TOL, DENSE_THRESHOLD, Spectrum, approximate_spectrum, graph_spectrum

MEAN_DEGREE = 10.0
BLOCKS = 10


@dataclass(frozen=True)
class MethodConfig:
    """How a graph becomes a signature."""

    kernel: str = "heat"
    normalization: str = "empty"
    grid: Optional[TimeGrid] = None
    strategy: str = "auto"
    k: int = DEFAULT_K
    dense_threshold: int = DENSE_THRESHOLD
    tol: float = DEFAULT_TOL

    @property
    def time_grid(self) -> TimeGrid:
        return self.grid if self.grid is not None else default_grid(self.kernel)

    @property
    def name(self) -> str:
        return self.kernel if self.normalization == "none" else f"{self.kernel}-{self.normalization}"


def parse_method(name: str, **overrides) -> MethodConfig:
    """``heat``, ``heat-empty``, ``wave-complete`` and so on."""
    kernel, _, norm = name.partition("-")
    if kernel not in ("heat", "wave") or norm not in ("", "none", "empty", "complete"):
        raise ValueError(f"unknown method {name!r}")
    return MethodConfig(kernel=kernel, normalization=norm or "none", **overrides)


def spectra_of(graphs: Sequence[Graph], method: MethodConfig) -> List[Spectrum]:
    if method.strategy == "taylor":
        raise ValueError("benchmarks need a spectrum; the Taylor strategy has none")
    return [compute_spectrum(g, method.strategy, method.k, method.dense_threshold, method.tol) for g in graphs]


def collection_from_spectra(ids, spectra, labels, method: MethodConfig) -> SignatureCollection:
    grid = method.time_grid
    items = [(gid, signature_from_spectrum(s, method.kernel, grid, method.normalization)) for gid, s in zip(ids, spectra)]
    return SignatureCollection.from_signatures(items, dict(zip(ids, labels)))


# ------------------------------------------------------------ communities


def community_graphs(
    size_law: str,
    size: int,
    graphs_per_class: int,
    seed: int = 0,
    mean_degree: float = MEAN_DEGREE,
    blocks: int = BLOCKS,
    mixing_ratio: float = MIXING_RATIO,
) -> Tuple[List[Graph], List[int]]:
    """Erdos-Renyi graphs (label 0) and SBM graphs (label 1) with matched expected degree.

    ``mixing_ratio`` is the share of an SBM node's expected edges that cross
    blocks; setting it to ``(n - s) / (n - 1)`` for block size ``s`` makes the
    SBM indistinguishable from Erdos-Renyi.
    """
    if graphs_per_class < 10:
        raise ValueError("graphs_per_class must be >= 10")
    rng = np.random.default_rng(seed)
    sizes = random_graph_sizes(size_law, size, 2 * graphs_per_class, rng)
    seeds = rng.integers(0, 2**63 - 1, size=2 * graphs_per_class)
    graphs, labels = [], []
    for i in range(graphs_per_class):
        n = int(sizes[i])
        graphs.append(gen_erdos_renyi(n, min(mean_degree, n - 1.5), seeds[i]))
        labels.append(0)
    for i in range(graphs_per_class, 2 * graphs_per_class):
        n = int(sizes[i])
        b = min(blocks, n)
        p_in, p_out = sbm_probabilities(n, b, min(mean_degree, n - 1.5), mixing_ratio)
        graphs.append(sample_sbm(n, b, p_in, p_out, seeds[i]))
        labels.append(1)
    return graphs, labels


def bench_communities(
    size_law: str = "fixed",
    size: int = 256,
    graphs_per_class: int = 1000,
    methods: Iterable[MethodConfig] = (MethodConfig(),),
    trials: int = 100,
    seed: int = 0,
    train_fraction: float = 0.8,
    mixing_ratio: float = MIXING_RATIO,
) -> Dict[str, EvalReport]:
    """1-NN accuracy at telling SBM graphs from Erdos-Renyi graphs, per method.

    Methods sharing a spectrum strategy reuse one eigensolve per graph.
    """
    methods = list(methods)
    graphs, labels = community_graphs(size_law, size, graphs_per_class, seed, mixing_ratio=mixing_ratio)
    ids = [f"g{i:05d}" for i in range(len(graphs))]
    cache: dict = {}
    reports = {}
    for m in methods:
        key = (m.strategy, m.k, m.dense_threshold, m.tol)
        if key not in cache:
            cache[key] = spectra_of(graphs, m)
        coll = collection_from_spectra(ids, cache[key], labels, m)
        reports[m.name] = evaluate_1nn(coll, train_fraction, trials, "accuracy", seed)
    return reports


# ------------------------------------------------------- real vs rewired


def bench_real_vs_rewired(
    graphs: Sequence[Tuple[str, Graph]],
    sweeps: int = 10,
    methods: Iterable[MethodConfig] = (MethodConfig(),),
    trials: int = 100,
    seed: int = 0,
    train_fraction: float = 0.8,
) -> Dict[str, EvalReport]:
    """ROC AUC of 1-NN at telling original graphs (label 1) from rewired copies (label 0)."""
    graphs = list(graphs)
    if len(graphs) < 20:
        raise ValueError("need at least 20 graphs")
    rng = np.random.default_rng(seed)
    seeds = rng.integers(0, 2**63 - 1, size=len(graphs))
    pool, ids, labels = [], [], []
    for (gid, g), s in zip(graphs, seeds):
        pool += [g, rewire_degree_preserving(g, sweeps, s)]
        ids += [f"{gid}", f"{gid}~rewired"]
        labels += [1, 0]
    cache: dict = {}
    reports = {}
    for m in methods:
        key = (m.strategy, m.k, m.dense_threshold, m.tol)
        if key not in cache:
            cache[key] = spectra_of(pool, m)
        coll = collection_from_spectra(ids, cache[key], labels, m)
        reports[m.name] = evaluate_1nn(coll, train_fraction, trials, "roc_auc", seed)
    return reports


# ------------------------------------------------- approximation quality


def one_sided_spectrum(exact: Spectrum, k: int) -> Spectrum:
    """Only the ``k`` smallest eigenvalues known; the rest grow linearly up to 2."""
    return approximate_spectrum(exact.eigenvalues[:k], [], exact.n, exact.component_count)


def two_sided_from_exact(exact: Spectrum, k: int) -> Spectrum:
    """``k/2`` eigenvalues from each end with the interior interpolated."""
    lo = k // 2
    hi = k - lo
    ev = exact.eigenvalues
    return approximate_spectrum(ev[:lo], ev[len(ev) - hi:], exact.n, exact.component_count)


def relative_heat_error(approx: Spectrum, exact: Spectrum, t) -> np.ndarray:
    ref = heat_trace(exact, t)
    return np.abs(heat_trace(approx, t) - ref) / ref


def approximation_errors(graphs: Sequence[Graph], k: int, grid: Optional[TimeGrid] = None):
    """Per-graph relative heat-trace error over the grid, two-sided and one-sided.

    Returns two arrays of shape ``(len(graphs), len(grid))``.
    """
    grid = grid if grid is not None else default_grid("heat")
    two, one = [], []
    for g in graphs:
        exact = graph_spectrum(g, max(DENSE_THRESHOLD, g.n))
        two.append(relative_heat_error(two_sided_from_exact(exact, k), exact, grid.values))
        one.append(relative_heat_error(one_sided_spectrum(exact, k), exact, grid.values))
    return np.array(two), np.array(one)


# ------------------------------------------------------------ scalability


def time_embedding(g: Graph, method: MethodConfig) -> float:
    """Wall-clock seconds for eigensolve plus trace evaluation."""
    start = time.perf_counter()
    spectrum = compute_spectrum(g, method.strategy, method.k, method.dense_threshold, method.tol)
    signature_from_spectrum(spectrum, method.kernel, method.time_grid, method.normalization)
    return time.perf_counter() - start


def scaling_slope(sizes: Sequence[int], seconds: Sequence[float]) -> float:
    """Slope of the least-squares line through ``(log n, log seconds)``."""
    slope, _ = np.polyfit(np.log(sizes), np.log(seconds), 1)
    return float(slope)


def scalability(sizes: Sequence[int], mean_degree: float = MEAN_DEGREE, k: int = DEFAULT_K, seed: int = 0):
    """Embedding times for Erdos-Renyi graphs of growing size with the two-sided approximation."""
    method = MethodConfig(strategy="approx", k=k)
    times = []
    for i, n in enumerate(sizes):
        g = gen_erdos_renyi(n, mean_degree, seed + i)
        times.append(time_embedding(g, method))
    return times
