import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from netlsd.errors import UnsupportedCombinationError
from netlsd.graph import Graph, gen_erdos_renyi, gen_named
from netlsd.signature import (
    compute_signature,
    compute_spectrum,
    default_grid,
    heat_trace,
    make_time_grid,
    normalization_trace,
    signature_from_spectrum,
    taylor_heat_trace,
    wave_time_grid,
    wave_trace,
)
from netlsd.spectral import Spectrum, build_laplacian, graph_spectrum


def dense_laplacian(g):
    a = np.zeros((g.n, g.n))
    for u, v in g.edges:
        a[u, v] = a[v, u] = 1.0
    d = a.sum(axis=1)
    s = np.where(d > 0, 1 / np.sqrt(np.where(d > 0, d, 1)), 0)
    return np.diag((d > 0).astype(float)) - s[:, None] * a * s[None, :]


def expm_heat_trace(g, t):
    """Trace of the heat kernel by matrix exponential, no eigendecomposition."""
    return float(np.trace(scipy.linalg.expm(-t * dense_laplacian(g))))


@st.composite
def random_graphs(draw, max_n=30):
    n = draw(st.integers(2, max_n))
    seed = draw(st.integers(0, 2**31))
    p = draw(st.floats(0.05, 0.9))
    rng = np.random.default_rng(seed)
    iu = np.triu_indices(n, 1)
    keep = rng.random(len(iu[0])) < p
    return Graph.from_edges(n, np.column_stack([iu[0][keep], iu[1][keep]]))


# ------------------------------------------------------------------ grids


def test_grid_examples():
    np.testing.assert_allclose(make_time_grid(3, 0.01, 100, "log").values, [0.01, 1, 100])
    np.testing.assert_array_equal(make_time_grid(1, 1, 2, "lin").values, [1.0])
    g = make_time_grid()
    assert len(g.values) == 250 and g.values[0] == 0.01 and g.values[-1] == 100
    assert np.all(np.diff(g.values) > 0)
    np.testing.assert_allclose(np.diff(np.log10(g.values)), 4 / 249)


@pytest.mark.parametrize(
    "args", [(0, 1, 2, "log"), (5, 2, 1, "log"), (5, 0, 1, "log"), (5, -1, 1, "lin"), (5, 1, 2, "cubic")]
)
def test_grid_rejects(args):
    with pytest.raises(ValueError):
        make_time_grid(*args)


def test_wave_grid_half_open():
    g = wave_time_grid()
    assert g.count == 250 and g.values[0] == 0 and g.values[-1] < 2 * math.pi
    np.testing.assert_allclose(np.diff(g.values), 2 * math.pi / 250)
    assert default_grid("wave").key == g.key


def test_wave_rejects_full_period():
    g = make_time_grid(10, 0, 2 * math.pi, "lin")
    with pytest.raises(ValueError):
        compute_signature(gen_named("ring", 5), "wave", g)


# ----------------------------------------------------------------- traces


def test_heat_trace_examples():
    assert heat_trace(Spectrum(np.zeros(4)), 7.5) == 4
    assert heat_trace(graph_spectrum(gen_erdos_renyi(30, 4, 0)), 0.0) == pytest.approx(30)
    k2 = gen_named("complete", 2)
    assert heat_trace(graph_spectrum(k2), 1.0) == pytest.approx(expm_heat_trace(k2, 1.0), abs=1e-12)
    assert heat_trace(graph_spectrum(k2), 1.0) == pytest.approx(1.135335, abs=1e-6)


def test_wave_trace_examples():
    assert wave_trace(Spectrum(np.zeros(3)), 1.3) == 3
    assert wave_trace(graph_spectrum(gen_named("complete", 2)), math.pi) == pytest.approx(2)
    k4 = graph_spectrum(gen_named("complete", 4))
    np.testing.assert_allclose(k4.eigenvalues, [0, 4 / 3, 4 / 3, 4 / 3], atol=1e-12)
    assert wave_trace(k4, math.pi / 2) == pytest.approx(-0.5, abs=1e-12)


def test_wave_trace_is_real_part_of_unitary_trace():
    g = gen_erdos_renyi(12, 3, 1)
    lap = dense_laplacian(g)
    for t in (0.3, 1.7, 5.9):
        w = np.trace(scipy.linalg.expm(-1j * t * lap))
        assert wave_trace(graph_spectrum(g), t) == pytest.approx(w.real, abs=1e-10)


def test_taylor_examples():
    k2 = build_laplacian(gen_named("complete", 2))
    assert taylor_heat_trace(k2, 0.1) == pytest.approx(1.82)
    assert 1 + math.exp(-0.2) == pytest.approx(1.81873, abs=1e-5)
    assert taylor_heat_trace(build_laplacian(gen_named("empty", 6)), 3.0) == 6
    ring = gen_named("ring", 9)
    assert taylor_heat_trace(build_laplacian(ring), 0.0) == heat_trace(graph_spectrum(ring), 0.0)


@settings(max_examples=50, deadline=None)
@given(random_graphs())
def test_taylor_matches_expansion_of_expm(g):
    t = 1e-3
    exact = expm_heat_trace(g, t)
    # neglected terms are O(t^3 * n)
    assert abs(taylor_heat_trace(build_laplacian(g), t) - exact) < 2 * g.n * t**3


def test_normalization_examples():
    assert normalization_trace("empty", "heat", 7, 3.5) == 7
    assert normalization_trace("complete", "heat", 2, 1.0) == pytest.approx(1 + math.exp(-2))
    assert normalization_trace("complete", "heat", 2, 1.0) == pytest.approx(heat_trace(graph_spectrum(gen_named("complete", 2)), 1.0))
    assert normalization_trace("complete", "wave", 2, math.pi) == pytest.approx(2)
    assert normalization_trace("complete", "heat", 1, 5.0) == 1


@pytest.mark.parametrize("n", [2, 3, 7, 40])
def test_complete_normalization_matches_spectrum(n):
    s = graph_spectrum(gen_named("complete", n))
    t = np.array([0.01, 0.5, 2.0, 6.0])
    np.testing.assert_allclose(normalization_trace("complete", "heat", n, t), heat_trace(s, t), rtol=1e-12)
    np.testing.assert_allclose(normalization_trace("complete", "wave", n, t), wave_trace(s, t), atol=1e-10)


# -------------------------------------------------------------- signatures


def test_self_normalization_gives_ones():
    e = compute_signature(gen_named("empty", 8), "heat", normalization="empty")
    np.testing.assert_array_equal(e.values, np.ones(250))
    c = compute_signature(gen_named("complete", 8), "heat", normalization="complete")
    np.testing.assert_allclose(c.values, np.ones(250), rtol=1e-12)


def test_taylor_wave_unsupported():
    with pytest.raises(UnsupportedCombinationError):
        compute_signature(gen_named("ring", 8), "wave", strategy="taylor")


def test_approx_with_large_k_upgrades_to_full():
    g = gen_named("ring", 30)
    s = compute_spectrum(g, "approx", k=300)
    assert s.provenance == "full"


def test_auto_routes_by_size():
    g = gen_erdos_renyi(300, 6, 0)
    assert compute_spectrum(g, "auto").provenance == "full"
    assert compute_spectrum(g, "auto", k=100, dense_threshold=200).provenance == "approximated"


def test_signature_metadata():
    s = compute_signature(gen_named("ring", 10))
    assert (s.kernel, s.normalization, s.n) == ("heat", "empty", 10)
    assert s.grid.key == (250, 0.01, 100.0, "log")
    assert not s.values.flags.writeable


@settings(max_examples=40, deadline=None)
@given(random_graphs())
def test_heat_signature_properties(g):
    s = signature_from_spectrum(graph_spectrum(g), "heat", normalization="none")
    assert np.all(np.diff(s.values) <= 0)
    if g.m:
        # strictly decreasing until the trace rounds to its limit
        live = s.values[:-1] - graph_spectrum(g).component_count > 1e-9 * g.n
        assert np.all(np.diff(s.values)[live] < 0)
    assert np.all(s.values > 0)
    w = signature_from_spectrum(graph_spectrum(g), "wave", normalization="none")
    assert np.all(np.abs(w.values) <= g.n + 1e-9)


def test_heat_trace_limits():
    for seed in range(10):
        g = gen_erdos_renyi(40, 2, seed)
        s = graph_spectrum(g)
        assert heat_trace(s, 1e-6) == pytest.approx(g.n, abs=1e-3)
        assert heat_trace(s, 1e6) == pytest.approx(s.component_count, abs=1e-3)
        e = signature_from_spectrum(s, "heat", make_time_grid(3, 1e-6, 1, "log"), "empty")
        assert e.values[0] == pytest.approx(1, abs=1e-5)


def test_empty_graph_heat_constant():
    s = compute_signature(gen_named("empty", 5), normalization="none")
    np.testing.assert_array_equal(s.values, np.full(250, 5.0))


@settings(max_examples=30, deadline=None)
@given(random_graphs(max_n=40), st.integers(0, 2**31))
def test_permutation_invariance(g, seed):
    perm = np.random.default_rng(seed).permutation(g.n)
    for kernel in ("heat", "wave"):
        a = compute_signature(g, kernel)
        b = compute_signature(g.relabel(perm), kernel)
        np.testing.assert_allclose(a.values, b.values, atol=1e-8, rtol=0)


def test_ring_and_wheel_differ_at_middle_scales():
    grid = make_time_grid()
    ring = compute_signature(gen_named("ring", 10), normalization="none", strategy="full", grid=grid)
    wheel = compute_signature(gen_named("wheel", 10), normalization="none", strategy="full", grid=grid)
    gap = np.abs(ring.values - wheel.values)
    peak = int(gap.argmax())
    assert 0 < peak < 249
    assert gap[0] < 0.1 * gap[peak] and gap[-1] < 0.1 * gap[peak]
