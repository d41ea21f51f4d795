"""Heat and wave trace signatures sampled on a grid of time scales."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import UnsupportedCombinationError
from .graph import Graph, connected_components
from .spectral import (
    DEFAULT_TOL,
    DENSE_THRESHOLD,
    NormalizedLaplacian,
    Spectrum,
    approximate_spectrum,
    build_laplacian,
    extreme_eigenvalues,
    full_spectrum,
)

KERNELS = ("heat", "wave")
NORMALIZATIONS = ("none", "empty", "complete")
STRATEGIES = ("full", "approx", "taylor", "auto")
SPACINGS = {"log": "log", "logarithmic": "log", "lin": "lin", "linear": "lin"}
DEFAULT_K = 300


@dataclass(frozen=True)
class TimeGrid:
    count: int
    t_min: float
    t_max: float
    spacing: str = "log"
    values: np.ndarray = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.values is None:
            object.__setattr__(self, "values", _grid_values(self.count, self.t_min, self.t_max, self.spacing))

    def __len__(self):
        return self.count

    @property
    def key(self) -> tuple:
        return (self.count, float(self.t_min), float(self.t_max), self.spacing)


def _grid_values(count, t_min, t_max, spacing):
    if count == 1:
        v = np.array([float(t_min)])
    elif spacing == "log":
        v = np.logspace(math.log10(t_min), math.log10(t_max), count)
        # pin the endpoints exactly
        v[0], v[-1] = t_min, t_max
    else:
        v = np.linspace(t_min, t_max, count)
    v.setflags(write=False)
    return v


def make_time_grid(count: int = 250, t_min: float = 1e-2, t_max: float = 1e2, spacing: str = "log") -> TimeGrid:
    if spacing not in SPACINGS:
        raise ValueError(f"unknown spacing {spacing!r}")
    spacing = SPACINGS[spacing]
    count = int(count)
    if count < 1:
        raise ValueError("count must be >= 1")
    if count > 1 and not t_min < t_max:
        raise ValueError(f"need t_min < t_max, got [{t_min}, {t_max}]")
    if spacing == "log" and t_min <= 0:
        raise ValueError("logarithmic grids need t_min > 0")
    if spacing == "lin" and t_min < 0:
        raise ValueError("time scales must be non-negative")
    return TimeGrid(count, float(t_min), float(t_max), spacing)


def wave_time_grid(count: int = 250) -> TimeGrid:
    """Linear grid covering [0, 2*pi) with the right endpoint left out."""
    return make_time_grid(count, 0.0, 2 * math.pi * (count - 1) / count if count > 1 else 1.0, "lin")


def default_grid(kernel: str) -> TimeGrid:
    return wave_time_grid() if kernel == "wave" else make_time_grid()


@dataclass(frozen=True)
class Signature:
    kernel: str
    normalization: str
    grid: TimeGrid
    values: np.ndarray = field(repr=False)
    n: Optional[int] = None

    def __post_init__(self):
        if len(self.values) != self.grid.count:
            raise ValueError("signature length does not match its grid")

    @property
    def meta(self) -> tuple:
        return (self.kernel, self.normalization, self.grid.key)


# ------------------------------------------------------------------ traces


def heat_trace(spectrum: Spectrum, t):
    """``sum_j exp(-t * lambda_j)``; ``t`` may be a scalar or an array."""
    lam = spectrum.eigenvalues
    t = np.asarray(t, dtype=float)
    out = np.exp(-np.multiply.outer(t, lam)).sum(axis=-1)
    return float(out) if out.ndim == 0 else out


def wave_trace(spectrum: Spectrum, t):
    """Real part of ``sum_j exp(-i t lambda_j)``, i.e. ``sum_j cos(t lambda_j)``."""
    lam = spectrum.eigenvalues
    t = np.asarray(t, dtype=float)
    out = np.cos(np.multiply.outer(t, lam)).sum(axis=-1)
    return float(out) if out.ndim == 0 else out


def taylor_heat_trace(lap: NormalizedLaplacian, t):
    """Second-order expansion ``n - t tr(L) + t^2/2 tr(L^2)``.

    Accurate for small scales only; the neglected terms grow like ``t^3``
    and the error becomes noticeable from ``t`` around 1.
    """
    t = np.asarray(t, dtype=float)
    out = lap.n - t * lap.trace + 0.5 * t * t * lap.trace_of_square
    return float(out) if out.ndim == 0 else out


def normalization_trace(kind: str, kernel: str, n: int, t):
    """Trace of the n-node empty or complete graph under the given kernel.

    The complete graph uses its exact nonzero eigenvalue ``n / (n - 1)``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    t = np.asarray(t, dtype=float)
    if kind == "empty":
        out = np.full(t.shape, float(n))
    elif kind == "complete":
        if n == 1:
            out = np.ones(t.shape)
        else:
            lam = n / (n - 1)
            if kernel == "heat":
                out = 1 + (n - 1) * np.exp(-t * lam)
            elif kernel == "wave":
                out = 1 + (n - 1) * np.cos(t * lam)
            else:
                raise ValueError(f"unknown kernel {kernel!r}")
    else:
        raise ValueError(f"unknown normalization {kind!r}")
    return float(out) if out.ndim == 0 else out


# --------------------------------------------------------------- assembly


def _check_grid(kernel, grid):
    if kernel == "wave" and (grid.values[0] < 0 or grid.values[-1] >= 2 * math.pi):
        raise ValueError("wave signatures need time scales in [0, 2*pi)")


def signature_from_spectrum(
    spectrum: Spectrum, kernel: str = "heat", grid: Optional[TimeGrid] = None, normalization: str = "none"
) -> Signature:
    if kernel not in KERNELS:
        raise ValueError(f"unknown kernel {kernel!r}")
    if normalization not in NORMALIZATIONS:
        raise ValueError(f"unknown normalization {normalization!r}")
    grid = grid if grid is not None else default_grid(kernel)
    _check_grid(kernel, grid)
    trace = heat_trace if kernel == "heat" else wave_trace
    values = np.atleast_1d(trace(spectrum, grid.values))
    return _finish(values, kernel, grid, normalization, spectrum.n)


def _finish(values, kernel, grid, normalization, n):
    if normalization != "none":
        values = values / np.atleast_1d(normalization_trace(normalization, kernel, n, grid.values))
    values = np.asarray(values, dtype=float)
    values.setflags(write=False)
    return Signature(kernel, normalization, grid, values, n)


def compute_spectrum(
    g: Graph,
    strategy: str = "auto",
    k: int = DEFAULT_K,
    dense_threshold: int = DENSE_THRESHOLD,
    tol: float = DEFAULT_TOL,
    k_lo: Optional[int] = None,
    lap: Optional[NormalizedLaplacian] = None,
) -> Spectrum:
    """Spectrum by ``full``, ``approx`` (k extreme eigenvalues) or ``auto`` routing.

    ``approx`` with ``k >= n`` falls back to the full spectrum.
    """
    if strategy not in ("full", "approx", "auto"):
        raise ValueError(f"strategy {strategy!r} does not produce a spectrum")
    lap = lap if lap is not None else build_laplacian(g)
    comps = connected_components(g)
    if strategy == "auto":
        strategy = "full" if g.n <= dense_threshold else "approx"
    if strategy == "approx" and k >= g.n:
        return full_spectrum(lap, g.n, comps)
    if strategy == "full":
        return full_spectrum(lap, dense_threshold, comps)
    lo_count = k // 2 if k_lo is None else k_lo
    lo, hi = extreme_eigenvalues(lap, lo_count, k - lo_count, comps, tol)
    return approximate_spectrum(lo, hi, g.n, comps.count)


def compute_signature(
    g: Graph,
    kernel: str = "heat",
    grid: Optional[TimeGrid] = None,
    normalization: str = "empty",
    strategy: str = "auto",
    k: int = DEFAULT_K,
    dense_threshold: int = DENSE_THRESHOLD,
    tol: float = DEFAULT_TOL,
) -> Signature:
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    if kernel not in KERNELS:
        raise ValueError(f"unknown kernel {kernel!r}")
    grid = grid if grid is not None else default_grid(kernel)
    _check_grid(kernel, grid)
    if strategy == "taylor":
        if kernel != "heat":
            raise UnsupportedCombinationError("the Taylor strategy only approximates the heat trace")
        lap = build_laplacian(g)
        values = np.atleast_1d(taylor_heat_trace(lap, grid.values))
        return _finish(values, kernel, grid, normalization, g.n)
    spectrum = compute_spectrum(g, strategy, k, dense_threshold, tol)
    return signature_from_spectrum(spectrum, kernel, grid, normalization)
