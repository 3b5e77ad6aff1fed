"""Biased second-order walk engine: support, biases, determinism, parity."""

import numpy as np
import pytest

from layerwalk.graph import EXPLICIT_COUPLING, IDENTITY_COUPLING, adjusted_aggregate, build_network
from layerwalk.walks import (
    NeighborhoodCorpus,
    WalkConfig,
    generate_corpus,
    sample_walk,
    schedule_stream,
    transition_bias,
    walk_substream,
    write_corpus,
)

from conftest import rng_of
from reference import reference_first_order_walk, reference_second_order_walk

TRIANGLE = [(0, "a", 0, "b", 1.0), (0, "b", 0, "c", 1.0), (0, "c", 0, "a", 1.0)]


def _agg(records, r=1.0, mode=IDENTITY_COUPLING, m=None):
    return adjusted_aggregate(build_network(records, coupling_mode=mode, num_layers=m), r)


def test_walk_config_validation():
    with pytest.raises(ValueError, match="positive"):
        WalkConfig(return_p=0.0)
    with pytest.raises(ValueError, match="walk_length"):
        WalkConfig(walk_length=1)
    with pytest.raises(ValueError, match=">= 1"):
        WalkConfig(walks_per_node=0)
    with pytest.raises(ValueError, match="64 bits"):
        WalkConfig(seed=2**64)
    assert WalkConfig(walks_per_node=3, min_samples_per_node=7).rounds == 7


def test_transition_bias_cases():
    path = _agg([(0, "a", 0, "b", 1.0), (0, "b", 0, "c", 1.0)])
    cfg = WalkConfig(return_p=2.0, inout_q=0.5)
    assert transition_bias("a", "a", "b", path, cfg) == 0.5  # return: 1/p
    assert transition_bias("a", "c", "b", path, cfg) == 2.0  # distance 2: 1/q
    tri = _agg(TRIANGLE)
    assert transition_bias("a", "c", "b", tri, cfg) == 1.0  # neighbor of prev


def test_walk_support_invariant():
    agg = _agg(TRIANGLE + [(0, "c", 0, "d", 0.5)])
    cfg = WalkConfig(return_p=0.5, inout_q=2.0, walk_length=12, seed=3)
    for w in range(20):
        walk = sample_walk(agg, "a", cfg, walk_substream(3, 0, w))
        assert walk[0] == "a"
        assert len(walk) == 12
        for u, v in zip(walk, walk[1:]):
            assert agg.weight(u, v) > 0.0


def test_two_node_walk_is_forced_alternation():
    agg = _agg([(0, "a", 0, "b", 1.0)])
    cfg = WalkConfig(walk_length=5, seed=0)
    walk = sample_walk(agg, "a", cfg, walk_substream(0, 0, 0))
    assert walk == ["a", "b", "a", "b", "a"]


def test_star_leaf_revisit_rare_at_large_p():
    records = [(0, "c", 0, f"leaf{i}", 1.0) for i in range(4)]
    agg = _agg(records)
    cfg = WalkConfig(return_p=1e6, inout_q=1.0, walk_length=3, seed=5)
    start = agg.node_index("leaf0")
    revisits = 0
    for w in range(10_000):
        walk = sample_walk(agg, "leaf0", cfg, walk_substream(5, start, w))
        assert walk[1] == "c"
        revisits += walk[2] == "leaf0"
    assert revisits / 10_000 < 0.01


def test_star_leaf_revisit_dominates_at_small_p():
    records = [(0, "c", 0, f"leaf{i}", 1.0) for i in range(4)]
    agg = _agg(records)
    cfg = WalkConfig(return_p=1e-6, inout_q=1.0, walk_length=3, seed=5)
    start = agg.node_index("leaf0")
    revisits = sum(
        sample_walk(agg, "leaf0", cfg, walk_substream(5, start, w))[2] == "leaf0"
        for w in range(2_000)
    )
    assert revisits / 2_000 > 0.99


def test_isolated_start_errors():
    agg = _agg([(0, "a", 0, "b", 1.0), (0, "c", 0, "c", 0.0)])
    with pytest.raises(ValueError, match="no outgoing mass"):
        sample_walk(agg, "c", WalkConfig(), walk_substream(0, 2, 0))


def test_corpus_counts_and_isolated_exclusion():
    agg = _agg(TRIANGLE + [(0, "d", 0, "d", 0.0)])
    cfg = WalkConfig(walks_per_node=2, walk_length=4, seed=1)
    corpus = generate_corpus(agg, cfg)
    assert corpus.num_walks == 6
    assert corpus.total_tokens == 24
    tokens = {u for walk in corpus.walks for u in walk}
    assert "d" not in tokens
    starts = sorted(walk[0] for walk in corpus.walks)
    assert starts == ["a", "a", "b", "b", "c", "c"]


def test_corpus_large_walks_per_node_start_count():
    agg = _agg([(0, "a", 0, "b", 1.0)])
    cfg = WalkConfig(walks_per_node=3788, walk_length=2, seed=9)
    corpus = generate_corpus(agg, cfg)
    assert corpus.num_walks == 2 * 3788
    assert sum(w[0] == "a" for w in corpus.walks) == 3788


def test_corpus_determinism_and_seed_sensitivity():
    agg = _agg(TRIANGLE, r=0.5, m=2)
    cfg = WalkConfig(walk_length=8, walks_per_node=3, seed=42)
    c1 = generate_corpus(agg, cfg)
    c2 = generate_corpus(agg, cfg)
    assert all(np.array_equal(a, b) for a, b in zip(c1.walks_idx, c2.walks_idx))
    c3 = generate_corpus(agg, WalkConfig(walk_length=8, walks_per_node=3, seed=43))
    assert any(not np.array_equal(a, b) for a, b in zip(c1.walks_idx, c3.walks_idx))


def test_all_isolated_graph_errors():
    agg = _agg([(0, "a", 0, "b", 0.0)])
    with pytest.raises(ValueError, match="positive degree"):
        generate_corpus(agg, WalkConfig())


def test_unknown_sampler_errors():
    agg = _agg(TRIANGLE)
    with pytest.raises(ValueError, match="unknown sampler"):
        generate_corpus(agg, WalkConfig(), sampler="magic")


def test_self_transition_mass_decreases_with_r():
    records = [(0, "a", 0, "b", 1.0), (1, "b", 1, "c", 0.5), (2, "a", 2, "c", 0.75)]
    net = build_network(records, coupling_mode=IDENTITY_COUPLING, num_layers=3)
    prev_mass = None
    for r in (0.25, 0.5, 1.0, 2.0, 4.0):
        agg = adjusted_aggregate(net, r)
        i = agg.node_index("a")
        self_mass = agg.weight("a", "a") / agg.degrees[i]
        if prev_mass is not None:
            assert self_mass < prev_mass
        prev_mass = self_mass


def _corpus_like_reference(dense, seed, cfg, p, q, first_order=False):
    """Replay the corpus contract with the pure-Python reference walkers."""
    active = np.flatnonzero(dense.sum(axis=1) > 0.0)
    schedule = schedule_stream(seed)
    walks = []
    for round_idx in range(cfg.rounds):
        for start in schedule.permutation(active):
            rng = walk_substream(seed, int(start), round_idx)
            uniforms = rng.random(cfg.walk_length - 1)
            if first_order:
                walks.append(reference_first_order_walk(dense, int(start), uniforms))
            else:
                walks.append(reference_second_order_walk(dense, int(start), p, q, uniforms))
    return walks


def test_engine_matches_reference_walker_tokenwise():
    rng = rng_of(77)
    for case in range(5):
        n = int(rng.integers(4, 12))
        records = [(0, 0, 0, 1, 1.0)]
        for _ in range(3 * n):
            layer = int(rng.integers(2))
            records.append((layer, int(rng.integers(n)), layer, int(rng.integers(n)), 0.5))
        net = build_network(records, coupling_mode=IDENTITY_COUPLING, num_layers=2)
        agg = adjusted_aggregate(net, 0.5)
        p, q = [(1.0, 1.0), (2.0, 0.5), (0.25, 4.0)][case % 3]
        cfg = WalkConfig(return_p=p, inout_q=q, layer_r=0.5,
                         walk_length=7, walks_per_node=2, seed=case)
        corpus = generate_corpus(agg, cfg)
        expected = _corpus_like_reference(agg.dense(), case, cfg, p, q)
        assert len(expected) == corpus.num_walks
        for got, want in zip(corpus.walks_idx, expected):
            assert list(got) == want


def test_alias_sampler_produces_valid_supported_walks():
    agg = _agg(TRIANGLE + [(0, "a", 0, "d", 2.0)])
    cfg = WalkConfig(return_p=2.0, inout_q=0.5, walk_length=10, walks_per_node=4, seed=8)
    corpus = generate_corpus(agg, cfg, sampler="alias")
    assert corpus.num_walks == 4 * 4
    for walk in corpus.iter_walks():
        for u, v in zip(walk, walk[1:]):
            assert agg.weight(u, v) > 0.0


def test_write_corpus_format(tmp_path):
    agg = _agg([(0, "a", 0, "b", 1.0)])
    corpus = generate_corpus(agg, WalkConfig(walk_length=3, walks_per_node=1, seed=0))
    out = tmp_path / "walks.txt"
    write_corpus(corpus, out)
    lines = out.read_text().splitlines()
    assert len(lines) == 2
    assert all(line.split(" ") == walk for line, walk in zip(lines, corpus.walks))


def test_explicit_inter_mass_is_walkable_support():
    # aggregate support includes entries that exist only via inter-layer mass
    records = [(0, "a", 0, "b", 1.0), (0, "b", 1, "c", 0.5)]
    agg = _agg(records, r=0.5, mode=EXPLICIT_COUPLING, m=2)
    cfg = WalkConfig(walk_length=40, seed=2)
    walk = sample_walk(agg, "a", cfg, walk_substream(2, 0, 0))
    assert "c" in walk
