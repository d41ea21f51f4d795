"""Normalized Laplacian and its spectrum, exact or approximated from both ends."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.sparse import csgraph
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigsh

from .errors import ConvergenceError, InconsistentEndsError, SizeError
from .graph import ComponentLabeling, Graph, connected_components

DENSE_THRESHOLD = 4096
DEFAULT_TOL = 1e-8
CLAMP_EPS = 1e-8
SNAP_EPS = 1e-9


@dataclass(frozen=True)
class NormalizedLaplacian:
    """``L = I - D^-1/2 A D^-1/2`` with zero rows for isolated nodes."""

    matrix: sp.csr_matrix = field(repr=False)
    degrees: np.ndarray = field(repr=False)
    trace: float
    trace_of_square: float

    @property
    def n(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class Spectrum:
    """Ascending eigenvalues of a normalized Laplacian.

    ``provenance`` is ``"full"`` or ``"approximated"``; for approximated
    spectra ``k_lo``/``k_hi`` count the computed ends and ``interpolated``
    the filled-in interior values.
    """

    eigenvalues: np.ndarray
    provenance: str = "full"
    component_count: Optional[int] = None
    k_lo: int = 0
    k_hi: int = 0
    interpolated: int = 0

    @property
    def n(self) -> int:
        return len(self.eigenvalues)


def build_laplacian(g: Graph) -> NormalizedLaplacian:
    deg = g.degrees.astype(float)
    with np.errstate(divide="ignore"):
        inv_sqrt = np.where(deg > 0, 1.0 / np.sqrt(deg), 0.0)
    scale = sp.diags(inv_sqrt)
    off = scale @ g.adjacency @ scale
    diag = sp.diags((deg > 0).astype(float))
    lap = sp.csr_matrix(diag - off)
    lap.sort_indices()
    lap.eliminate_zeros()
    trace = float(np.count_nonzero(deg))
    trace_sq = float(np.sum(lap.data**2))
    return NormalizedLaplacian(matrix=lap, degrees=g.degrees, trace=trace, trace_of_square=trace_sq)


def _tidy(values: np.ndarray, zeros: int = 0) -> np.ndarray:
    """Clip into [0, 2], snap values next to the bounds, pin known zeros."""
    v = np.sort(np.asarray(values, dtype=float))
    v = np.clip(v, -CLAMP_EPS, 2 + CLAMP_EPS)
    v = np.clip(v, 0.0, 2.0)
    v[v < SNAP_EPS] = 0.0
    v[v > 2 - SNAP_EPS] = 2.0
    v[:zeros] = 0.0
    return v


def _labels_of(lap: NormalizedLaplacian, components: Optional[ComponentLabeling]) -> ComponentLabeling:
    if components is not None:
        return components
    count, labels = csgraph.connected_components(lap.matrix, directed=False)
    return ComponentLabeling(labels=labels.astype(np.int64), count=int(count))


def full_spectrum(
    lap: NormalizedLaplacian,
    dense_threshold: int = DENSE_THRESHOLD,
    components: Optional[ComponentLabeling] = None,
) -> Spectrum:
    if lap.n > dense_threshold:
        raise SizeError(
            f"n={lap.n} exceeds the dense threshold {dense_threshold}; use approximate_spectrum"
        )
    comps = _labels_of(lap, components)
    values = scipy.linalg.eigvalsh(lap.matrix.toarray(), check_finite=False)
    return Spectrum(_tidy(values, comps.count), provenance="full", component_count=comps.count)


def graph_spectrum(g: Graph, dense_threshold: int = DENSE_THRESHOLD) -> Spectrum:
    return full_spectrum(build_laplacian(g), dense_threshold, connected_components(g))


# ------------------------------------------------------------ Lanczos ends


class _Deflation:
    """Known zero eigenspace of the non-isolated part: ``D^1/2`` per component."""

    def __init__(self, degrees: np.ndarray, labels: np.ndarray):
        _, self.labels = np.unique(labels, return_inverse=True)
        self.count = int(self.labels.max()) + 1 if len(labels) else 0
        q = np.sqrt(degrees.astype(float))
        norms = np.sqrt(np.bincount(self.labels, weights=q * q, minlength=self.count))
        self.q = q / norms[self.labels]

    def project(self, x: np.ndarray) -> np.ndarray:
        """``Q Q^T x``."""
        coef = np.bincount(self.labels, weights=self.q * x, minlength=self.count)
        return self.q * coef[self.labels]


def _residuals(apply, values, vectors) -> np.ndarray:
    if vectors is None or len(values) == 0:
        return np.zeros(0)
    r = apply(vectors) - vectors * values
    return np.linalg.norm(r, axis=0)


def _lanczos(op, k, v0, tol, maxiter):
    """Implicitly restarted Lanczos (ARPACK) for the ``k`` largest eigenpairs."""
    size = op.shape[0]
    try:
        vals, vecs = eigsh(op, k=k, which="LA", v0=v0, tol=tol, maxiter=maxiter, ncv=_ncv_for(k, size))
    except ArpackNoConvergence as exc:
        res = _residuals(op.matmat, exc.eigenvalues, exc.eigenvectors)
        raise ConvergenceError(
            f"Lanczos did not converge for {k} eigenvalues",
            iterations=maxiter,
            residual=float(res.max()) if len(res) else float("inf"),
        ) from exc
    order = np.argsort(vals)[::-1]
    return vals[order], vecs[:, order]


def _ncv_for(k: int, size: int) -> int:
    return min(size, max(2 * k + 1, 40))


def _top_pairs(apply, size, k, rng, tol, maxiter, project=None):
    """The ``k`` largest eigenpairs of a symmetric operator with spectrum in [0, 2].

    Single-vector Lanczos finds one copy of each repeated eigenvalue, so the
    converged vectors are locked (shifted below the spectrum) and the search
    repeated until it turns up nothing above the current k-th value.
    """

    def start():
        v0 = rng.standard_normal(size)
        return v0 - project(v0) if project is not None else v0

    op = LinearOperator((size, size), matvec=lambda x: apply(np.ravel(x)), matmat=apply, dtype=float)
    vals, vecs = _lanczos(op, k, start(), tol, maxiter)
    margin = 4 * tol
    for _ in range(k):
        p = min(k, 8)
        if size - vecs.shape[1] <= max(2 * p + 1, 40):
            break
        locked = vecs

        def apply_locked(x, locked=locked):
            return apply(x) - 3.0 * (locked @ (locked.T @ x))

        lop = LinearOperator(
            (size, size), matvec=lambda x: apply_locked(np.ravel(x)), matmat=apply_locked, dtype=float
        )
        w, W = _lanczos(lop, p, start(), tol, maxiter)
        better = w > vals[-1] + margin
        if not better.any():
            break
        vals = np.concatenate([vals, w[better]])
        vecs = np.hstack([vecs, W[:, better]])
        order = np.argsort(vals)[::-1][:k]
        vals, vecs = vals[order], vecs[:, order]
    return vals, vecs


def _restart_budget(k_lo, k_hi, budget=10):
    return 10 * (k_lo + k_hi) * budget


def extreme_eigenvalues(
    lap: NormalizedLaplacian,
    k_lo: int,
    k_hi: int,
    components: Optional[ComponentLabeling] = None,
    tol: float = DEFAULT_TOL,
    max_iterations: Optional[int] = None,
    seed: int = 0,
):
    """The ``k_lo`` smallest and ``k_hi`` largest eigenvalues, each ascending.

    The zero eigenvalues (one per connected component, isolated nodes
    included) are known exactly and returned without iterating; the
    low-end search runs on the orthogonal complement of that eigenspace.
    Isolated nodes are removed from the operator entirely. Every computed
    eigenpair has ``||L v - lam v|| <= tol * ||L||``; otherwise
    :class:`ConvergenceError` is raised. ``max_iterations`` caps Lanczos
    restart cycles per solve.
    """
    n = lap.n
    if k_lo < 0 or k_hi < 0:
        raise ValueError("eigenvalue counts must be non-negative")
    if k_lo + k_hi >= n:
        raise ValueError(f"k_lo + k_hi must be < n ({k_lo} + {k_hi} >= {n})")
    if tol <= 0:
        raise ValueError("tol must be positive")
    comps = _labels_of(lap, components)

    active = np.flatnonzero(lap.degrees > 0)
    isolated = n - len(active)
    sub = lap.matrix[active][:, active].tocsr()
    defl = _Deflation(lap.degrees[active], comps.labels[active])
    n_zero = isolated + defl.count
    size = len(active)
    if max_iterations is None:
        max_iterations = _restart_budget(k_lo, k_hi)
    rng = np.random.default_rng(seed)
    # ARPACK stops at ||r|| <= tol_a * |theta| with |theta| <= 2, and ||L|| >= 1
    # whenever there is an edge, so tol / 2 meets the contract.
    tol_a = tol / 2

    need_lo = max(k_lo - n_zero, 0)
    need_hi = min(k_hi, size - defl.count)
    dense = None
    # tiny problems, or ones asking for most of the spectrum, go dense
    if size and (need_lo + need_hi + 2 >= size or size <= 64):
        dense = _tidy(scipy.linalg.eigvalsh(sub.toarray(), check_finite=False), defl.count)

    def apply_l(x):
        return sub @ x

    hi = np.empty(0)
    norm_l = 1.0
    if need_hi:
        if dense is not None:
            hi = dense[len(dense) - need_hi:]
        else:
            vals, vecs = _top_pairs(apply_l, size, need_hi, rng, tol_a, max_iterations)
            norm_l = max(1.0, float(vals[0]))
            _check(apply_l, vals, vecs, tol * norm_l, max_iterations)
            hi = vals[::-1]
    hi = np.concatenate([np.zeros(k_hi - len(hi)), hi])

    lo = np.zeros(min(k_lo, n_zero))
    if need_lo:
        if dense is not None:
            found = dense[defl.count:defl.count + need_lo]
        else:
            # 2I - L - 2QQ^T sends the known zeros to 0 and every other
            # eigenvalue lambda to 2 - lambda, so the low end becomes the top
            def apply_low(x):
                proj = defl.project(x) if x.ndim == 1 else np.column_stack([defl.project(c) for c in x.T])
                return 2.0 * x - sub @ x - 2.0 * proj

            vals, vecs = _top_pairs(apply_low, size, need_lo, rng, tol_a, max_iterations, defl.project)
            found = 2.0 - vals
            _check(apply_l, found, vecs, tol * norm_l, max_iterations)
        lo = np.concatenate([lo, found])
    return _tidy(lo), _tidy(hi)


def _check(apply, values, vectors, bound, iterations):
    res = _residuals(apply, values, vectors)
    worst = float(res.max()) if len(res) else 0.0
    if worst > bound:
        raise ConvergenceError("eigenpair residual above tolerance", iterations=iterations, residual=worst)


# ----------------------------------------------------------- interpolation


def approximate_spectrum(lo, hi, n: int, component_count: Optional[int] = None) -> Spectrum:
    """Fill the unknown interior of a spectrum linearly between its computed ends.

    The ``n - len(lo) - len(hi)`` interior values are the inner points of an
    even grid from ``max(lo)`` to ``min(hi)``. A missing end anchors at the
    spectral bound (0 below, 2 above).
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    interior = n - len(lo) - len(hi)
    if interior < 0:
        raise ValueError(f"{len(lo)} + {len(hi)} computed eigenvalues exceed n={n}")
    if np.any(np.diff(lo) < 0) or np.any(np.diff(hi) < 0):
        raise ValueError("ends must be sorted ascending")
    left = lo[-1] if len(lo) else 0.0
    right = hi[0] if len(hi) else 2.0
    if left > right:
        raise InconsistentEndsError(f"max(lo)={left} exceeds min(hi)={right}")
    middle = np.linspace(left, right, interior + 2)[1:-1]
    values = np.concatenate([lo, middle, hi])
    return Spectrum(
        values,
        provenance="approximated",
        component_count=component_count,
        k_lo=len(lo),
        k_hi=len(hi),
        interpolated=interior,
    )


def two_sided_spectrum(
    g: Graph,
    k: int = 300,
    k_lo: Optional[int] = None,
    k_hi: Optional[int] = None,
    tol: float = DEFAULT_TOL,
    lap: Optional[NormalizedLaplacian] = None,
) -> Spectrum:
    """Approximate spectrum from ``k`` extreme eigenvalues split evenly between the ends."""
    if k_lo is None:
        k_lo = k // 2
    if k_hi is None:
        k_hi = k - k_lo
    lap = lap if lap is not None else build_laplacian(g)
    comps = connected_components(g)
    lo, hi = extreme_eigenvalues(lap, k_lo, k_hi, comps, tol)
    return approximate_spectrum(lo, hi, g.n, comps.count)
