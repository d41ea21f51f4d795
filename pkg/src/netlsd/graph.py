"""Undirected simple graphs, edge-list ingestion, generators and rewiring."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, TextIO

import numpy as np
import scipy.sparse as sp
from scipy.sparse import csgraph

from .errors import ParseError

logger = logging.getLogger(__name__)

NAMED_KINDS = ("ring", "wheel", "complete", "empty", "path")


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable undirected graph without self-loops or multi-edges.

    ``edges`` holds each edge once as ``(u, v)`` with ``u < v``, sorted
    lexicographically. ``adjacency`` is the symmetric CSR adjacency matrix.
    ``names`` optionally maps dense node ids back to the ids read from disk.
    """

    n: int
    edges: np.ndarray
    adjacency: sp.csr_matrix = field(repr=False)
    degrees: np.ndarray = field(repr=False)
    names: Optional[tuple] = field(default=None, repr=False)

    @classmethod
    def from_edges(cls, n: int, edges, names=None) -> "Graph":
        """Build a graph from any iterable of node pairs.

        Self-loops are dropped and duplicates (in either orientation) collapsed.
        """
        n = int(n)
        if n < 1:
            raise ValueError("a graph needs at least one node")
        e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if e.size and (e.min() < 0 or e.max() >= n):
            raise ValueError("edge endpoint out of range 0..n-1")
        e = e[e[:, 0] != e[:, 1]]
        e = np.sort(e, axis=1)
        e = np.unique(e, axis=0) if len(e) else np.empty((0, 2), dtype=np.int64)
        e.setflags(write=False)
        m = len(e)
        rows = np.concatenate([e[:, 0], e[:, 1]])
        cols = np.concatenate([e[:, 1], e[:, 0]])
        adj = sp.csr_matrix((np.ones(2 * m), (rows, cols)), shape=(n, n))
        adj.sort_indices()
        deg = np.diff(adj.indptr).astype(np.int64)
        deg.setflags(write=False)
        if names is not None:
            names = tuple(names)
            if len(names) != n:
                raise ValueError("names must have one entry per node")
        return cls(n=n, edges=e, adjacency=adj, degrees=deg, names=names)

    @property
    def m(self) -> int:
        return len(self.edges)

    def relabel(self, perm) -> "Graph":
        """Return the isomorphic graph with node ``i`` renamed to ``perm[i]``."""
        perm = np.asarray(perm, dtype=np.int64)
        if sorted(perm.tolist()) != list(range(self.n)):
            raise ValueError("perm must be a permutation of 0..n-1")
        return Graph.from_edges(self.n, perm[self.edges])

    def edge_set(self) -> set:
        return {(int(u), int(v)) for u, v in self.edges}

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.edges, other.edges)

    def __hash__(self):
        return hash((self.n, self.edges.tobytes()))


@dataclass(frozen=True)
class ComponentLabeling:
    labels: np.ndarray
    count: int


# ---------------------------------------------------------------- ingestion


def parse_edge_list(stream: Iterable[str], id_policy: str = "remap"):
    """Parse an edge list and return ``(graph, self_loops, duplicates)``.

    ``id_policy`` is ``"remap"`` (arbitrary tokens, renumbered in order of first
    appearance) or ``"dense"`` (tokens must be integers; node count is max id + 1).
    """
    if id_policy not in ("remap", "dense"):
        raise ValueError(f"unknown id policy {id_policy!r}")
    index: dict = {}
    pairs = []
    for lineno, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if len(tokens) != 2:
            raise ParseError(f"expected 2 tokens, got {len(tokens)}", lineno)
        if id_policy == "dense":
            try:
                u, v = int(tokens[0]), int(tokens[1])
            except ValueError:
                raise ParseError("node ids must be integers under the dense id policy", lineno) from None
            if u < 0 or v < 0:
                raise ParseError("node ids must be non-negative", lineno)
        else:
            u = index.setdefault(tokens[0], len(index))
            v = index.setdefault(tokens[1], len(index))
        pairs.append((u, v))
    if not pairs:
        raise ParseError("edge list is empty")

    e = np.array(pairs, dtype=np.int64)
    if id_policy == "dense":
        n = int(e.max()) + 1
        names = None
    else:
        n = len(index)
        names = tuple(index)
    loops = int(np.count_nonzero(e[:, 0] == e[:, 1]))
    g = Graph.from_edges(n, e, names=names)
    duplicates = len(e) - loops - g.m
    return g, loops, duplicates


def load_edge_list(stream: Iterable[str], id_policy: str = "remap") -> Graph:
    g, loops, duplicates = parse_edge_list(stream, id_policy)
    if loops:
        logger.warning("dropped %d self-loop(s)", loops)
    if duplicates:
        logger.info("collapsed %d duplicate edge(s)", duplicates)
    return g


def read_edge_list(path, id_policy: str = "remap") -> Graph:
    with open(path) as fh:
        return load_edge_list(fh, id_policy)


def write_edge_list(g: Graph, out: TextIO) -> None:
    names = g.names
    for u, v in g.edges:
        if names is None:
            out.write(f"{u} {v}\n")
        else:
            out.write(f"{names[u]} {names[v]}\n")


# ------------------------------------------------------------- connectivity


def connected_components(g: Graph) -> ComponentLabeling:
    count, labels = csgraph.connected_components(g.adjacency, directed=False)
    return ComponentLabeling(labels=labels.astype(np.int64), count=int(count))


# --------------------------------------------------------------- generators


def circulant(n: int, offsets: Sequence[int]) -> Graph:
    i = np.arange(n)
    edges = [np.column_stack([i, (i + k) % n]) for k in offsets]
    return Graph.from_edges(n, np.concatenate(edges))


def gen_named(kind: str, n: int) -> Graph:
    """Deterministic graph families.

    ``wheel`` is the circulant graph where node ``i`` links to ``i±1`` and
    ``i±2`` (mod n), not the hub-and-spokes wheel.
    """
    minimum = {"ring": 3, "wheel": 3, "complete": 1, "empty": 1, "path": 1}
    if kind not in minimum:
        raise ValueError(f"unknown graph kind {kind!r}; expected one of {NAMED_KINDS}")
    if n < minimum[kind]:
        raise ValueError(f"{kind} graph needs n >= {minimum[kind]}, got {n}")
    if kind == "ring":
        return circulant(n, [1])
    if kind == "wheel":
        return circulant(n, [1, 2])
    if kind == "complete":
        u, v = np.triu_indices(n, 1)
        return Graph.from_edges(n, np.column_stack([u, v]))
    if kind == "empty":
        return Graph.from_edges(n, [])
    i = np.arange(n - 1)
    return Graph.from_edges(n, np.column_stack([i, i + 1]))


def _sample_pairs(rng, count, total, decode, draw):
    """Draw ``count`` distinct pair indices out of ``total``.

    Dense regimes enumerate; sparse ones draw with replacement and top up.
    """
    if count == 0:
        return np.empty((0, 2), dtype=np.int64)
    if total <= 2_000_000 or count > total // 4:
        return decode(np.sort(rng.choice(total, size=count, replace=False)))
    chosen = np.empty((0, 2), dtype=np.int64)
    while len(chosen) < count:
        extra = draw(int((count - len(chosen)) * 1.1) + 16)
        chosen = np.unique(np.concatenate([chosen, extra]), axis=0)
    keep = rng.choice(len(chosen), size=count, replace=False)
    return chosen[np.sort(keep)]


def _within_block(rng, nodes: np.ndarray, p: float) -> np.ndarray:
    s = len(nodes)
    total = s * (s - 1) // 2
    count = int(rng.binomial(total, p)) if total else 0

    def decode(idx):
        iu, iv = np.triu_indices(s, 1)
        return np.column_stack([iu[idx], iv[idx]])

    def draw(k):
        a = rng.integers(0, s, size=k)
        b = rng.integers(0, s, size=k)
        ok = a != b
        return np.sort(np.column_stack([a[ok], b[ok]]), axis=1)

    local = _sample_pairs(rng, count, total, decode, draw)
    return nodes[local]


def _between_blocks(rng, left: np.ndarray, right: np.ndarray, p: float) -> np.ndarray:
    total = len(left) * len(right)
    count = int(rng.binomial(total, p)) if total else 0

    def decode(idx):
        return np.column_stack([idx // len(right), idx % len(right)])

    def draw(k):
        return np.column_stack([rng.integers(0, len(left), size=k), rng.integers(0, len(right), size=k)])

    local = _sample_pairs(rng, count, total, decode, draw)
    return np.column_stack([left[local[:, 0]], right[local[:, 1]]])


def gen_erdos_renyi(n: int, mean_degree: float, seed=None) -> Graph:
    """G(n, p) with ``p = mean_degree / (n - 1)``."""
    if n < 2:
        raise ValueError("Erdos-Renyi graph needs n >= 2")
    p = mean_degree / (n - 1)
    if not 0 < p <= 1:
        raise ValueError(f"edge probability {p} outside (0, 1]")
    rng = np.random.default_rng(seed)
    return Graph.from_edges(n, _within_block(rng, np.arange(n), p))


def block_sizes(n: int, blocks: int) -> np.ndarray:
    base, extra = divmod(n, blocks)
    return np.array([base + (i < extra) for i in range(blocks)], dtype=np.int64)


# share of an SBM node's expected edges leaving its block
MIXING_RATIO = 0.3


def sbm_probabilities(n: int, blocks: int, mean_degree: float, mixing_ratio: float = MIXING_RATIO):
    """Edge probabilities ``(p_in, p_out)`` giving the requested expected degree.

    ``mixing_ratio`` is the share of a node's expected edges that leave its
    block. When blocks are too small to hold the intra-block share, ``p_in``
    saturates at 1 and the excess moves to ``p_out``.
    """
    if blocks < 2 or blocks > n:
        raise ValueError("need 2 <= blocks <= n")
    if not 0 <= mixing_ratio <= 1:
        raise ValueError("mixing_ratio must lie in [0, 1]")
    sizes = block_sizes(n, blocks)
    # expected number of same-block / other-block partners of a random node
    same = float(np.sum(sizes * (sizes - 1))) / n
    other = (n - 1) - same
    if not 0 < mean_degree < n - 1:
        raise ValueError("mean_degree must lie in (0, n-1)")
    p_in = (1 - mixing_ratio) * mean_degree / same if same else 0.0
    if p_in > 1:
        p_in = 1.0
    p_out = (mean_degree - p_in * same) / other
    if p_out > 1:
        raise ValueError("mean_degree too large for this block layout")
    return p_in, p_out


def sample_sbm(n: int, blocks: int, p_in: float, p_out: float, seed=None) -> Graph:
    """SBM sampler without the community-structure check; see :func:`gen_sbm`."""
    if not (0 <= p_out <= 1 and 0 <= p_in <= 1):
        raise ValueError("probabilities must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    bounds = np.concatenate([[0], np.cumsum(block_sizes(n, blocks))])
    members = [np.arange(bounds[b], bounds[b + 1]) for b in range(blocks)]
    parts = []
    for a in range(blocks):
        parts.append(_within_block(rng, members[a], p_in))
        for b in range(a + 1, blocks):
            parts.append(_between_blocks(rng, members[a], members[b], p_out))
    return Graph.from_edges(n, np.concatenate(parts))


def gen_sbm(n: int, blocks: int, p_in: float, p_out: float, seed=None) -> Graph:
    """Stochastic block model with near-equal blocks of consecutive node ids."""
    if blocks < 2 or blocks > n:
        raise ValueError("need 2 <= blocks <= n")
    if not 0 <= p_out < p_in <= 1:
        raise ValueError(f"need 0 <= p_out < p_in <= 1, got p_in={p_in}, p_out={p_out}")
    return sample_sbm(n, blocks, p_in, p_out, seed)


# ---------------------------------------------------------------- rewiring


def rewire_degree_preserving(g: Graph, sweeps: int = 10, seed=None) -> Graph:
    """Randomize ``g`` by double-edge swaps, keeping every node's degree.

    One sweep is ``m`` attempted swaps. A swap picks edges ``(a, b)``,
    ``(c, d)`` and replaces them with ``(a, d)``, ``(c, b)`` (or ``(a, c)``,
    ``(b, d)``); it is rejected if it would create a self-loop or a
    multi-edge. The target distribution is uniform over simple graphs with
    the given degrees, so every valid proposal is accepted.
    """
    if sweeps < 1:
        raise ValueError("sweeps must be >= 1")
    m = g.m
    if m < 2:
        return g
    rng = np.random.default_rng(seed)
    n = g.n
    edges = [[int(u), int(v)] for u, v in g.edges]
    present = {u * n + v for u, v in edges}
    attempts = sweeps * m
    first = rng.integers(0, m, size=attempts)
    second = rng.integers(0, m - 1, size=attempts)
    second = second + (second >= first)
    flip = rng.integers(0, 2, size=attempts).astype(bool)
    for i, j, f in zip(first.tolist(), second.tolist(), flip.tolist()):
        a, b = edges[i]
        c, d = edges[j]
        if f:
            c, d = d, c
        # new edges (a, d) and (c, b)
        if a == d or c == b:
            continue
        e1 = (a, d) if a < d else (d, a)
        e2 = (c, b) if c < b else (b, c)
        k1 = e1[0] * n + e1[1]
        k2 = e2[0] * n + e2[1]
        if k1 == k2 or k1 in present or k2 in present:
            continue
        present.discard(edges[i][0] * n + edges[i][1])
        present.discard(edges[j][0] * n + edges[j][1])
        present.add(k1)
        present.add(k2)
        edges[i] = list(e1)
        edges[j] = list(e2)
    return Graph.from_edges(n, edges, names=g.names)


def random_graph_sizes(law: str, size: int, count: int, rng) -> np.ndarray:
    """Node counts under a size law: ``fixed``, ``poisson`` or ``uniform`` (on [10, size])."""
    if law == "fixed":
        return np.full(count, size, dtype=np.int64)
    if law == "poisson":
        return np.maximum(rng.poisson(size, size=count), 2).astype(np.int64)
    if law == "uniform":
        if size < 10:
            raise ValueError("uniform size law needs an upper bound >= 10")
        return rng.integers(10, size + 1, size=count).astype(np.int64)
    raise ValueError(f"unknown size law {law!r}")


def is_simple(g: Graph) -> bool:
    a = g.adjacency
    return (
        (a != a.T).nnz == 0
        and a.diagonal().sum() == 0
        and (a.data == 1).all()
        and int(g.degrees.sum()) == 2 * g.m
    )


def expected_degree_sbm(n: int, blocks: int, p_in: float, p_out: float) -> float:
    sizes = block_sizes(n, blocks)
    same = float(np.sum(sizes * (sizes - 1))) / n
    return p_in * same + p_out * ((n - 1) - same)

