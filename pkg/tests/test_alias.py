"""Alias sampler: Vose round-trip exactness, draw law, budget fallback."""

import numpy as np
import pytest

from layerwalk.alias import AliasTable, AliasTableSet, build_alias_tables
from layerwalk.graph import IDENTITY_COUPLING, adjusted_aggregate, build_network
from layerwalk.walks import WalkConfig, generate_corpus

from conftest import rng_of


def _triangle_agg():
    records = [(0, "a", 0, "b", 1.0), (0, "b", 0, "c", 2.0), (0, "c", 0, "a", 0.5)]
    return adjusted_aggregate(build_network(records, num_layers=1), 1.0)


def test_reconstructed_probabilities_round_trip():
    rng = rng_of(11)
    for _ in range(50):
        n = int(rng.integers(1, 40))
        w = rng.random(n) + 1e-6
        table = AliasTable(w)
        np.testing.assert_allclose(table.reconstructed_probabilities(), w / w.sum(), atol=1e-12)


def test_reconstructed_probabilities_uniform_row():
    table = AliasTable(np.ones(50))
    np.testing.assert_allclose(table.reconstructed_probabilities(), np.full(50, 0.02), atol=1e-12)


def test_empirical_frequencies_match_weights():
    table = AliasTable(np.array([1.0, 1.0, 2.0]))
    rng = rng_of(123)
    counts = np.zeros(3)
    draws = 100_000
    for _ in range(draws):
        counts[table.sample(rng)] += 1
    np.testing.assert_allclose(counts / draws, [0.25, 0.25, 0.5], atol=0.01)


def test_single_outcome_table():
    table = AliasTable(np.array([3.0]))
    rng = rng_of(0)
    assert all(table.sample(rng) == 0 for _ in range(20))


def test_alias_table_validation():
    with pytest.raises(ValueError, match="non-empty 1-D"):
        AliasTable(np.empty(0))
    with pytest.raises(ValueError, match="non-empty 1-D"):
        AliasTable(np.ones((2, 2)))
    with pytest.raises(ValueError, match="non-negative"):
        AliasTable(np.array([1.0, -0.5]))
    with pytest.raises(ValueError, match="non-negative"):
        AliasTable(np.array([1.0, np.nan]))
    with pytest.raises(ValueError, match="positive total"):
        AliasTable(np.zeros(3))


def test_edge_tables_match_biased_law():
    agg = _triangle_agg()
    cfg = WalkConfig(return_p=4.0, inout_q=0.25)
    tables = build_alias_tables(agg, cfg)
    a, b = agg.node_index("a"), agg.node_index("b")
    table = tables.edge_table(a, b)
    nbrs, w = tables._successors(b)
    bias = tables._biased_weights(a, b)
    # triangle: every successor of b neighbors a or is a itself
    expect = bias / bias.sum()
    np.testing.assert_allclose(table.reconstructed_probabilities(), expect, atol=1e-12)
    assert set(int(x) for x in nbrs) == {a, agg.node_index("c")}


def test_budget_zero_falls_back_to_linear_scan():
    agg = _triangle_agg()
    cfg = WalkConfig(return_p=2.0, inout_q=0.5, walk_length=6, walks_per_node=2, seed=4)
    tables = AliasTableSet(agg, cfg, max_bytes=0)
    assert tables.edge_table(0, 1) is None
    assert tables.budget_exceeded
    walk = tables.sample_walk_indices(0, 10, rng_of(5))
    assert len(walk) == 10
    with pytest.warns(RuntimeWarning, match="alias table budget"):
        corpus = generate_corpus(agg, cfg, sampler="alias", alias_max_bytes=0)
    assert corpus.num_walks == 6


def test_edge_cache_reuse_and_accounting():
    agg = _triangle_agg()
    tables = build_alias_tables(agg, WalkConfig())
    t1 = tables.edge_table(0, 1)
    used = tables.bytes_used
    assert used > 0
    assert tables.edge_table(0, 1) is t1
    assert tables.bytes_used == used


def test_alias_walk_transition_frequencies():
    # alias draws follow the same transition law as the canonical sampler
    records = [(0, "a", 0, "b", 1.0), (0, "b", 0, "c", 2.0), (0, "c", 0, "a", 0.5),
               (1, "a", 1, "c", 1.0)]
    net = build_network(records, coupling_mode=IDENTITY_COUPLING, num_layers=2)
    agg = adjusted_aggregate(net, 1.0)
    cfg = WalkConfig(return_p=2.0, inout_q=0.5, walk_length=3, seed=0)
    tables = build_alias_tables(agg, cfg)
    a = agg.node_index("a")
    b = agg.node_index("b")
    rng = rng_of(99)
    hits = {}
    draws = 40_000
    for _ in range(draws):
        walk = tables.sample_walk_indices(a, 3, rng)
        if walk[1] == b:
            hits[walk[2]] = hits.get(walk[2], 0) + 1
    total = sum(hits.values())
    bias = tables._biased_weights(a, b)
    nbrs, _ = tables._successors(b)
    expect = {int(x): bias[i] / bias.sum() for i, x in enumerate(nbrs)}
    for node, count in hits.items():
        assert count / total == pytest.approx(expect[node], abs=0.02)
