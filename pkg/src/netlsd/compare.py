"""Signature distances, nearest-neighbour queries and 1-NN evaluation."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import rankdata

from .errors import IncompatibleSignaturesError
from .signature import Signature, TimeGrid


def _row_norms(diff: np.ndarray) -> np.ndarray:
    # single code path for every L2 distance so repeated computations agree bitwise
    return np.sqrt(np.einsum("ij,ij->i", diff, diff))


def signature_distance(a: Signature, b: Signature) -> float:
    """Euclidean distance between two signatures sharing kernel, normalization and grid."""
    if a.meta != b.meta:
        raise IncompatibleSignaturesError(f"cannot compare {a.meta} with {b.meta}")
    return float(_row_norms((a.values - b.values)[None, :])[0])


@dataclass(frozen=True)
class SignatureCollection:
    kernel: str
    normalization: str
    grid: TimeGrid
    ids: Tuple[str, ...]
    matrix: np.ndarray = field(repr=False)
    labels: Optional[Dict[str, int]] = field(default=None, repr=False)

    @classmethod
    def from_signatures(cls, items, labels: Optional[Mapping[str, int]] = None) -> "SignatureCollection":
        """Build from ``(id, Signature)`` pairs; all must share metadata and ids must be unique."""
        items = list(items)
        if not items:
            raise ValueError("a collection needs at least one signature")
        meta = items[0][1].meta
        ids = []
        for gid, sig in items:
            if sig.meta != meta:
                raise IncompatibleSignaturesError(f"signature {gid!r} has metadata {sig.meta}, expected {meta}")
            ids.append(str(gid))
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate ids in collection")
        if labels is not None:
            missing = [i for i in ids if i not in labels]
            if missing:
                raise ValueError(f"missing labels for {missing[:3]}")
            labels = {i: int(labels[i]) for i in ids}
        matrix = np.vstack([sig.values for _, sig in items])
        matrix.setflags(write=False)
        first = items[0][1]
        return cls(first.kernel, first.normalization, first.grid, tuple(ids), matrix, labels)

    def __len__(self):
        return len(self.ids)

    @property
    def meta(self) -> tuple:
        return (self.kernel, self.normalization, self.grid.key)

    def signature(self, graph_id: str) -> Signature:
        return Signature(self.kernel, self.normalization, self.grid, self.matrix[self.ids.index(graph_id)])

    def distances_to(self, query: Signature) -> np.ndarray:
        if query.meta != self.meta:
            raise IncompatibleSignaturesError(f"query {query.meta} does not match collection {self.meta}")
        return _row_norms(self.matrix - query.values[None, :])

    def pairwise(self) -> np.ndarray:
        return np.vstack([_row_norms(self.matrix - row[None, :]) for row in self.matrix])


def knn_query(coll: SignatureCollection, query: Signature, k: int) -> List[Tuple[str, float]]:
    """The ``k`` nearest entries by exact scan; ties break by ascending id."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if len(coll) == 0:
        raise ValueError("empty collection")
    d = coll.distances_to(query)
    order = sorted(range(len(coll)), key=lambda i: (d[i], coll.ids[i]))
    return [(coll.ids[i], float(d[i])) for i in order[:k]]


# ------------------------------------------------------------- evaluation


@dataclass(frozen=True)
class EvalReport:
    metric: str
    value: float
    trials: int
    per_trial: Tuple[float, ...]
    seed: Optional[int] = None


def roc_auc(scores: Sequence[float], labels: Sequence[int]) -> float:
    """Rank-based ROC AUC (Mann-Whitney U); tied scores count one half."""
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels).astype(bool)
    pos = int(labels.sum())
    neg = len(labels) - pos
    if pos == 0 or neg == 0:
        raise ValueError("ROC AUC needs both classes")
    ranks = rankdata(scores)
    u = ranks[labels].sum() - pos * (pos + 1) / 2
    return float(u / (pos * neg))


def stratified_split(labels: np.ndarray, train_fraction: float, rng) -> Tuple[np.ndarray, np.ndarray]:
    """Random per-class split keeping at least one training and, when possible, one test item per class."""
    train, test = [], []
    for c in np.unique(labels):
        members = np.flatnonzero(labels == c)
        rng.shuffle(members)
        k = int(round(train_fraction * len(members)))
        k = min(max(k, 1), max(len(members) - 1, 1))
        train.append(members[:k])
        test.append(members[k:])
    return np.sort(np.concatenate(train)), np.sort(np.concatenate(test))


def _nearest(dist: np.ndarray, cand: np.ndarray, order_key: np.ndarray) -> np.ndarray:
    """Index into ``cand`` of the nearest candidate for each row, ties by id order."""
    sub = dist[:, cand]
    best = sub.min(axis=1, keepdims=True)
    tied = sub == best
    # among exact ties take the candidate with the smallest id rank
    rank = np.where(tied, order_key[cand][None, :], np.iinfo(np.int64).max)
    return rank.argmin(axis=1)


def evaluate_1nn(
    coll: SignatureCollection,
    train_fraction: float = 0.8,
    trials: int = 100,
    metric: str = "accuracy",
    seed: Optional[int] = 0,
    distances: Optional[np.ndarray] = None,
) -> EvalReport:
    """Nearest-neighbour classification over repeated stratified splits.

    ``accuracy`` predicts each test item's label from its nearest training
    item. ``roc_auc`` (binary labels only, the larger label positive) scores
    each test item by ``d(nearest negative) - d(nearest positive)``.
    """
    if coll.labels is None:
        raise ValueError("evaluation needs a labelled collection")
    if not 0 < train_fraction < 1:
        raise ValueError("train_fraction must lie in (0, 1)")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if metric not in ("accuracy", "roc_auc"):
        raise ValueError(f"unknown metric {metric!r}")
    labels = np.array([coll.labels[i] for i in coll.ids])
    classes = np.unique(labels)
    if len(classes) < 2:
        raise ValueError("evaluation needs at least two classes")
    if metric == "roc_auc" and len(classes) > 2:
        raise ValueError("roc_auc is defined for binary labels only")
    dist = coll.pairwise() if distances is None else distances
    id_rank = np.argsort(np.argsort(np.array(coll.ids, dtype=object)))
    rng = np.random.default_rng(seed)
    values = []
    for _ in range(trials):
        train, test = stratified_split(labels, train_fraction, rng)
        if len(test) == 0:
            raise ValueError("collection too small for a non-empty test split")
        rows = dist[test]
        if metric == "accuracy":
            nn = train[_nearest(rows, train, id_rank)]
            values.append(float(np.mean(labels[nn] == labels[test])))
        else:
            positive = classes[-1]
            pos_train = train[labels[train] == positive]
            neg_train = train[labels[train] != positive]
            score = rows[:, neg_train].min(axis=1) - rows[:, pos_train].min(axis=1)
            truth = labels[test] == positive
            if truth.all() or not truth.any():
                raise ValueError("test split lacks one of the classes")
            values.append(roc_auc(score, truth))
    return EvalReport(metric, float(np.mean(values)), trials, tuple(values), seed)
