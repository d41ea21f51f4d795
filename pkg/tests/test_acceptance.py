"""Acceptance suite: each test checks one criterion at its stated tolerance.

Every test prints a single PASS/FAIL line (also collected in the pytest
terminal summary). Run alone with ``pytest tests/test_acceptance.py -s``.
"""

import itertools
import math
import time

import numpy as np
import pytest

from netlsd.bench import (
    approximation_errors,
    bench_communities,
    parse_method,
    scalability,
    scaling_slope,
)
from netlsd.compare import roc_auc, signature_distance
from netlsd.graph import (
    MIXING_RATIO,
    Graph,
    circulant,
    connected_components,
    gen_erdos_renyi,
    gen_named,
    random_graph_sizes,
    sample_sbm,
    sbm_probabilities,
)
from netlsd.signature import (
    Signature,
    heat_trace,
    make_time_grid,
    signature_from_spectrum,
    taylor_heat_trace,
)
from netlsd.spectral import build_laplacian, graph_spectrum

pytestmark = pytest.mark.acceptance


def random_graph(rng, max_n):
    n = int(rng.integers(1, max_n + 1))
    p = rng.uniform(0, 1) if n < 30 else rng.uniform(0.5, 20) / n
    iu = np.triu_indices(n, 1)
    keep = rng.random(len(iu[0])) < p
    return Graph.from_edges(n, np.column_stack([iu[0][keep], iu[1][keep]]))


# ----------------------------------------------------------------------- 1


def test_permutation_invariance(criterion):
    rng = np.random.default_rng(2024)
    grid = make_time_grid()
    worst, failures = 0.0, 0
    start = time.perf_counter()
    for _ in range(200):
        g = random_graph(rng, 256)
        h = g.relabel(rng.permutation(g.n))
        a = signature_from_spectrum(graph_spectrum(g), "heat", grid, "none").values
        b = signature_from_spectrum(graph_spectrum(h), "heat", grid, "none").values
        gap = float(np.max(np.abs(a - b)))
        worst = max(worst, gap)
        failures += gap > 1e-8
    elapsed = time.perf_counter() - start
    criterion(1, "permutation invariance").check(
        failures == 0 and elapsed < 60,
        f"200 graphs, max per-entry gap {worst:.2e} (<= 1e-8), failures {failures}, {elapsed:.1f}s",
    )


# ----------------------------------------------------------------------- 2


def test_analytic_fixtures(criterion):
    worst = 0.0
    for n in (2, 4, 10, 100):
        empty = graph_spectrum(gen_named("empty", n)).eigenvalues
        worst = max(worst, np.max(np.abs(empty)))
        complete = graph_spectrum(gen_named("complete", n)).eigenvalues
        expected = np.r_[0.0, np.full(n - 1, n / (n - 1))]
        worst = max(worst, np.max(np.abs(complete - expected)))
        # circulant with offset 1; at n=2 this is the single edge, whose spectrum {0, 2} matches the formula
        ring = graph_spectrum(circulant(n, [1])).eigenvalues
        closed = np.sort(1 - np.cos(2 * np.pi * np.arange(n) / n))
        worst = max(worst, np.max(np.abs(ring - closed)))
    criterion(2, "analytic fixtures").check(
        worst <= 1e-8, f"empty/complete/ring at n in {{2,4,10,100}}, max deviation {worst:.2e} (<= 1e-8)"
    )


# ----------------------------------------------------------------------- 3


def test_taylor_regime(criterion):
    grid = make_time_grid()
    small = grid.values[grid.values <= 1.0]
    errors = {}
    at_point = {}
    for n in (100, 1000, 5000):
        g = gen_erdos_renyi(n, 10, seed=n)
        exact_spectrum = graph_spectrum(g, dense_threshold=n)
        lap = build_laplacian(g)
        exact = heat_trace(exact_spectrum, small)
        errors[n] = np.abs(taylor_heat_trace(lap, small) - exact) / exact
        e01 = heat_trace(exact_spectrum, 0.1)
        at_point[n] = abs(taylor_heat_trace(lap, 0.1) - e01) / e01
    stacked = np.vstack(list(errors.values()))
    spread = float(np.max(stacked.max(axis=0) / stacked.min(axis=0)))
    spread01 = max(at_point.values()) / min(at_point.values())
    ok = all(v < 1e-2 for v in at_point.values()) and spread <= 2 and spread01 <= 2
    detail = ", ".join(f"n={n}: {v:.3e}" for n, v in at_point.items())
    criterion(3, "Taylor regime").check(
        ok, f"rel. error at t=0.1 {detail} (< 1e-2); max size ratio over t<=1 {spread:.3f} (<= 2)"
    )


# ----------------------------------------------------------------------- 4


def test_two_sided_dominance(criterion):
    rng = np.random.default_rng(7)
    sizes = random_graph_sizes("poisson", 1500, 50, rng)
    seeds = rng.integers(0, 2**63 - 1, 50)
    graphs = []
    for n, s in zip(sizes, seeds):
        p_in, p_out = sbm_probabilities(int(n), 10, 10.0, MIXING_RATIO)
        graphs.append(sample_sbm(int(n), 10, p_in, p_out, s))
    grid = make_time_grid()
    two, one = approximation_errors(graphs, 100, grid)
    mean_two, mean_one = float(two.mean()), float(one.mean())
    mid = grid.count // 2
    mid_two, mid_one = float(two[:, mid].mean()), float(one[:, mid].mean())
    ratio = mid_one / mid_two if mid_two > 0 else math.inf
    criterion(4, "two-sided dominance").check(
        mean_two < mean_one and ratio >= 3,
        f"50 SBM graphs n~1500, k=100: mean error two-sided {mean_two:.3e} vs one-sided {mean_one:.3e}; "
        f"at t={grid.values[mid]:.3g} one/two = {ratio:.1f} (>= 3)",
    )


# ----------------------------------------------------------------------- 5


def test_community_trend(criterion):
    method = parse_method("heat-empty")
    acc = {}
    for n in (64, 256, 1024):
        acc[n] = bench_communities("fixed", n, 200, [method], trials=20, seed=0)[method.name].value
    values = [acc[64], acc[256], acc[1024]]
    tolerance = 0.07
    monotone = all(b >= a - tolerance for a, b in zip(values, values[1:]))
    strict = all(b >= a for a, b in zip(values, values[1:]))
    ok = monotone and acc[256] > 0.70 and acc[1024] > 0.75
    criterion(5, "community detection trend").check(
        ok,
        f"h/h(empty) accuracy n=64 {acc[64]:.3f}, n=256 {acc[256]:.3f}, n=1024 {acc[1024]:.3f}; "
        f"non-decreasing within 7 points: {monotone} (strictly: {strict}); >0.70 and >0.75 thresholds",
    )


# ----------------------------------------------------------------------- 6


def test_size_invariance_benefit(criterion):
    heat, empty = parse_method("heat"), parse_method("heat-empty")
    reports = bench_communities("poisson", 1024, 200, [heat, empty], trials=20, seed=0)
    a, b = reports["heat"].value, reports["heat-empty"].value
    criterion(6, "size-invariance benefit").check(
        b - a >= 0.10, f"Poisson(1024) sizes: heat {a:.3f}, heat-empty {b:.3f}, gain {100 * (b - a):.1f} points (>= 10)"
    )


# ----------------------------------------------------------------------- 7


def test_pseudometric(criterion):
    rng = np.random.default_rng(3)
    grid = make_time_grid()
    asym, worst_tri = 0.0, -math.inf
    linf_violations = 0
    start = time.perf_counter()
    for _ in range(100_000):
        rows = rng.random((3, 250)) * rng.choice([1e-3, 1.0, 1e3])
        a, b, c = (Signature("heat", "empty", grid, r) for r in rows)
        ab, ba = signature_distance(a, b), signature_distance(b, a)
        ac, bc = signature_distance(a, c), signature_distance(b, c)
        asym = max(asym, abs(ab - ba))
        worst_tri = max(worst_tri, ac - (ab + bc))
        for (x, y), d in zip(((0, 1), (0, 2), (1, 2)), (ab, ac, bc)):
            linf_violations += np.max(np.abs(rows[x] - rows[y])) > d
    elapsed = time.perf_counter() - start
    criterion(7, "pseudometric").check(
        asym == 0 and worst_tri <= 1e-12 and linf_violations == 0,
        f"1e5 triples: max asymmetry {asym}, worst triangle excess {worst_tri:.2e} (<= 1e-12), "
        f"Linf > L2 on {linf_violations} pairs, {elapsed:.1f}s",
    )


# ----------------------------------------------------------------------- 8


def pair_count_auc(scores, labels):
    pos = [s for s, y in zip(scores, labels) if y]
    neg = [s for s, y in zip(scores, labels) if not y]
    total = sum(1.0 if p > q else 0.5 if p == q else 0.0 for p, q in itertools.product(pos, neg))
    return total / (len(pos) * len(neg))


def closure_component_count(g):
    reach = np.eye(g.n, dtype=bool)
    for u, v in g.edges:
        reach[u, v] = reach[v, u] = True
    for k in range(g.n):
        reach |= reach[:, [k]] & reach[[k], :]
    return reach, len({tuple(row) for row in reach})


def test_oracle_equivalences(criterion):
    rng = np.random.default_rng(8)
    auc_mismatch = 0
    cases = 0
    while cases < 10_000:
        size = int(rng.integers(2, 13))
        labels = rng.integers(0, 2, size)
        if labels.all() or not labels.any():
            continue
        scores = rng.integers(0, int(rng.integers(1, 6)), size) / 4
        cases += 1
        auc_mismatch += roc_auc(scores, labels) != pair_count_auc(scores, labels)
    comp_mismatch = 0
    for _ in range(10_000):
        g = random_graph(rng, 8)
        reach, count = closure_component_count(g)
        comp = connected_components(g)
        same = comp.labels[:, None] == comp.labels[None, :]
        comp_mismatch += comp.count != count or not np.array_equal(same, reach)
    criterion(8, "oracle equivalences").check(
        auc_mismatch == 0 and comp_mismatch == 0,
        f"AUC vs pair counting: {auc_mismatch}/10000 mismatches; components vs closure: {comp_mismatch}/10000",
    )


# ----------------------------------------------------------------------- 9


@pytest.mark.slow
def test_scalability(criterion):
    sizes = [5_000, 10_000, 20_000, 40_000]
    seconds = scalability(sizes, k=300)
    slope = scaling_slope(sizes, seconds)
    detail = ", ".join(f"{n}: {s:.1f}s" for n, s in zip(sizes, seconds))
    criterion(9, "scalability shape").check(slope < 1.6, f"ER mean degree 10, k=300: {detail}; slope {slope:.3f} (< 1.6)")


# ---------------------------------------------------------------------- 10


def test_ring_wheel_scales(criterion):
    grid = make_time_grid()
    ring = signature_from_spectrum(graph_spectrum(gen_named("ring", 10)), "heat", grid, "none").values
    wheel = signature_from_spectrum(graph_spectrum(gen_named("wheel", 10)), "heat", grid, "none").values
    gap = np.abs(ring - wheel)
    peak = int(gap.argmax())
    ok = 0 < peak < grid.count - 1 and gap[0] < 0.1 * gap[peak] and gap[-1] < 0.1 * gap[peak]
    criterion(10, "ring vs wheel").check(
        ok,
        f"max gap {gap[peak]:.4f} at t={grid.values[peak]:.3g}; gap at 1e-2 {gap[0]:.2e}, at 1e2 {gap[-1]:.2e} (< 10% of max)",
    )
