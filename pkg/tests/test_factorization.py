"""Closed-form co-occurrence limit oracles and empirical counterparts."""

import numpy as np
import pytest

from layerwalk.factorization import (
    ResourceCapError,
    edge_stationary,
    empirical_cooccurrence,
    factorization_target,
    limit_matrix_dw,
    limit_matrix_general,
    second_order_kernel,
)
from layerwalk.graph import adjusted_aggregate, build_network
from layerwalk.walks import NeighborhoodCorpus, WalkConfig, sample_walk, walk_substream

from conftest import rng_of
from reference import brute_force_cooccurrence

TRIANGLE = [(0, "a", 0, "b", 1.0), (0, "b", 0, "c", 1.0), (0, "c", 0, "a", 1.0)]


def _agg(records):
    return adjusted_aggregate(build_network(records, num_layers=1), 1.0)


def _ring_agg(rng, n, extra_edges):
    # odd chord on a ring: connected and non-bipartite by construction
    records = [(0, i, 0, (i + 1) % n, 1.0) for i in range(n)]
    records.append((0, 0, 0, 2, 0.5))
    for _ in range(extra_edges):
        u, v = int(rng.integers(n)), int(rng.integers(n))
        if u != v:
            records.append((0, u, 0, v, [0.5, 1.0, 2.0][int(rng.integers(3))]))
    return _agg(records)


def test_triangle_kernel_hand_values():
    kernel = second_order_kernel(_agg(TRIANGLE), p=2.0, q=0.5)
    assert kernel.num_states == 6
    # from state (b, a): back to a carries 1/p = 0.5, c neighbors a so 1.0
    assert kernel.prob("a", "b", "a") == pytest.approx(1.0 / 3.0, abs=1e-12)
    assert kernel.prob("c", "b", "a") == pytest.approx(2.0 / 3.0, abs=1e-12)
    assert kernel.prob("b", "c", "b") == pytest.approx(1.0 / 3.0, abs=1e-12)
    assert kernel.prob("a", "c", "b") == pytest.approx(2.0 / 3.0, abs=1e-12)


def test_kernel_rows_are_stochastic():
    agg = _ring_agg(rng_of(3), 9, 6)
    kernel = second_order_kernel(agg, p=4.0, q=0.25)
    rows = np.asarray(kernel.matrix.sum(axis=1)).ravel()
    np.testing.assert_allclose(rows, 1.0, atol=1e-12)
    assert kernel.matrix.data.min() >= 0.0


def test_kernel_p1_q1_is_first_order():
    agg = _agg([(0, "a", 0, "b", 1.0), (0, "b", 0, "c", 2.0), (0, "c", 0, "a", 0.5)])
    kernel = second_order_kernel(agg, p=1.0, q=1.0)
    for v_i, v in enumerate(agg.node_ids):
        for w in agg.node_ids:
            if agg.weight(v, w) <= 0:
                continue
            for u in agg.node_ids:
                expect = agg.weight(v, u) / agg.degrees[v_i]
                assert kernel.prob(u, v, w) == pytest.approx(expect, abs=1e-12)


def test_kernel_state_count_is_directed_support():
    agg = _ring_agg(rng_of(5), 7, 3)
    kernel = second_order_kernel(agg, p=1.0, q=1.0)
    _, _, data = agg.csr_arrays()
    assert kernel.num_states == int((data > 0).sum())


def test_kernel_guard_and_errors():
    path = [(0, i, 0, i + 1, 1.0) for i in range(200)]
    with pytest.raises(ResourceCapError, match="N <= 200"):
        second_order_kernel(_agg(path), p=1.0, q=1.0)
    two_parts = [(0, "a", 0, "b", 1.0), (0, "c", 0, "d", 1.0)]
    with pytest.raises(ValueError, match="disconnected: 2 components"):
        second_order_kernel(_agg(two_parts), p=1.0, q=1.0)
    with pytest.raises(ValueError, match="positive"):
        second_order_kernel(_agg(TRIANGLE), p=0.0, q=1.0)


def test_unreachable_state_lookup():
    kernel = second_order_kernel(_agg([(0, "a", 0, "b", 1.0), (0, "b", 0, "c", 1.0)]), 1.0, 1.0)
    with pytest.raises(KeyError, match="not reachable"):
        kernel.prob("b", "a", "c")


def test_stationary_first_order_closed_form():
    records = TRIANGLE[:1] + [(0, "b", 0, "c", 2.0), (0, "c", 0, "a", 0.5), (0, "a", 0, "d", 1.0)]
    agg = _agg(records)
    kernel = second_order_kernel(agg, p=1.0, q=1.0)
    stat = edge_stationary(kernel)
    assert stat.masses.sum() == pytest.approx(1.0, abs=1e-12)
    assert stat.residual < 1e-10
    vol = float(agg.degrees.sum())
    for v, w in ((u, x) for u in agg.node_ids for x in agg.node_ids):
        if agg.weight(v, w) > 0:
            assert stat.mass(v, w) == pytest.approx(agg.weight(w, v) / vol, abs=1e-9)
    np.testing.assert_allclose(stat.node_marginals(), agg.degrees / vol, atol=1e-9)


def test_stationary_is_fixed_point():
    agg = _ring_agg(rng_of(11), 8, 4)
    kernel = second_order_kernel(agg, p=2.0, q=0.5)
    stat = edge_stationary(kernel)
    nxt = kernel.matrix.T @ stat.masses
    assert np.abs(nxt - stat.masses).max() < 1e-8


def test_bipartite_cycle_does_not_converge():
    square = [(0, i, 0, (i + 1) % 4, 1.0) for i in range(4)]
    kernel = second_order_kernel(_agg(square), p=1.0, q=1.0)
    with pytest.raises(ValueError, match="bipartite"):
        edge_stationary(kernel, max_iter=5000)


def test_dw_limit_triangle_hand_values():
    limit = limit_matrix_dw(_agg(TRIANGLE), k=1)
    expect = np.array([[0.0, 1.5, 1.5], [1.5, 0.0, 1.5], [1.5, 1.5, 0.0]])
    assert np.array_equal(limit, expect)


def test_dw_limit_k1_is_volume_scaled_adjacency():
    agg = _ring_agg(rng_of(19), 9, 5)
    limit = limit_matrix_dw(agg, k=1)
    a = agg.dense()
    expect = agg.volume * a / np.outer(agg.degrees, agg.degrees)
    np.testing.assert_allclose(limit, expect, atol=1e-12)


def test_dw_limit_errors():
    square = [(0, i, 0, (i + 1) % 4, 1.0) for i in range(4)]
    with pytest.raises(ValueError, match="bipartite"):
        limit_matrix_dw(_agg(square), k=1)
    with pytest.raises(ValueError, match="disconnected"):
        limit_matrix_dw(_agg([(0, "a", 0, "b", 1.0), (0, "c", 0, "d", 1.0)]), k=1)
    with pytest.raises(ValueError, match="isolated nodes"):
        limit_matrix_dw(_agg(TRIANGLE + [(0, "z", 0, "z", 0.0)]), k=1)
    with pytest.raises(ValueError, match="k must be >= 1"):
        limit_matrix_dw(_agg(TRIANGLE), k=0)


def test_general_limit_specializes_to_dw():
    rng = rng_of(29)
    for trial in range(10):
        agg = _ring_agg(rng, int(rng.integers(5, 31)), int(rng.integers(0, 8)))
        k = int(rng.integers(1, 4))
        kernel = second_order_kernel(agg, p=1.0, q=1.0)
        # the 1e-8 budget needs the stationary solved beyond its default 1e-10
        stat = edge_stationary(kernel, tol=1e-12)
        general = limit_matrix_general(kernel, stat, k)
        dw = limit_matrix_dw(agg, k)
        assert np.nanmax(np.abs(general - dw)) < 1e-8


def test_general_limit_is_symmetric():
    agg = _ring_agg(rng_of(37), 10, 6)
    kernel = second_order_kernel(agg, p=2.0, q=0.5)
    stat = edge_stationary(kernel)
    limit = limit_matrix_general(kernel, stat, k=3)
    assert np.nanmax(np.abs(limit - limit.T)) < 1e-10


def test_path_plus_chord_monte_carlo():
    # single long biased walk against the closed-form windowed limit
    records = [(0, 0, 0, 1, 1.0), (0, 1, 0, 2, 1.0), (0, 2, 0, 3, 1.0), (0, 0, 0, 2, 1.0)]
    agg = _agg(records)
    p, q, k = 1.0, 0.5, 2
    kernel = second_order_kernel(agg, p, q)
    stat = edge_stationary(kernel)
    limit = limit_matrix_general(kernel, stat, k)

    cfg = WalkConfig(return_p=p, inout_q=q, walk_length=10**6, seed=12)
    walk = sample_walk(agg, 0, cfg, walk_substream(12, 0, 0))
    idx = [np.asarray(walk, dtype=np.int32)]
    corpus = NeighborhoodCorpus(walks_idx=idx, node_ids=agg.node_ids, total_tokens=len(walk))
    _, ratio = empirical_cooccurrence(corpus, k)
    rel = np.abs(ratio - limit) / np.abs(limit)
    assert np.nanmax(rel) < 0.05


def test_factorization_target_values_and_floor():
    limit = np.array([[4.0, 0.0], [1e-15, 2.0]])
    target = factorization_target(limit, negative_b=2, floor=1e-12)
    assert target[0, 0] == pytest.approx(np.log(4.0) - np.log(2.0), abs=1e-14)
    assert target[0, 1] == pytest.approx(np.log(1e-12) - np.log(2.0), abs=1e-10)
    assert target[1, 0] == target[0, 1]
    with pytest.raises(ValueError, match="negative_b"):
        factorization_target(limit, negative_b=0)
    with pytest.raises(ValueError, match="floor"):
        factorization_target(limit, negative_b=1, floor=0.0)


def _corpus(walks, node_ids):
    idx = [np.asarray(w, dtype=np.int32) for w in walks]
    return NeighborhoodCorpus(
        walks_idx=idx, node_ids=node_ids, total_tokens=sum(len(w) for w in walks)
    )


def test_cooccurrence_hand_example():
    corpus = _corpus([[0, 1, 2]], ["a", "b", "c"])
    stats, ratio = empirical_cooccurrence(corpus, k=1)
    assert stats.pair_counts[0, 1] == 2.0
    assert stats.pair_counts[1, 0] == 2.0
    assert stats.pair_counts[0, 2] == 0.0
    assert stats.node_counts.tolist() == [2.0, 4.0, 2.0]
    assert stats.total == 8.0
    assert ratio[0, 1] == 2.0
    assert ratio[0, 2] == 0.0


def test_cooccurrence_alternating_walk_symmetry():
    corpus = _corpus([[0, 1] * 50], ["a", "b"])
    stats, _ = empirical_cooccurrence(corpus, k=1)
    assert stats.pair_counts[0, 1] == stats.pair_counts[1, 0]
    assert stats.pair_counts[0, 1] == 2.0 * 99.0


def test_cooccurrence_matches_brute_force():
    rng = rng_of(41)
    walks = [list(rng.integers(0, 6, size=int(rng.integers(2, 15)))) for _ in range(8)]
    corpus = _corpus(walks, list(range(6)))
    for k in (1, 2, 4):
        stats, _ = empirical_cooccurrence(corpus, k)
        expect = brute_force_cooccurrence(walks, k, 6)
        assert np.array_equal(stats.pair_counts, expect)
        assert np.array_equal(stats.node_counts, expect.sum(axis=1))
        assert stats.total == expect.sum()
    with pytest.raises(ValueError, match="k must be >= 1"):
        empirical_cooccurrence(corpus, 0)
