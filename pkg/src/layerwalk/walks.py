"""Biased second-order random walks over the adjusted aggregate.

The neighborhood search: from each positive-degree node, sample max(s, a)
truncated walks of length l.  The first transition is proportional to the
aggregate row of the start node; subsequent transitions weight each
candidate successor x by 1/p if x is the previous node, 1 if x neighbors
the previous node, and 1/q otherwise, multiplied by the aggregate weight.

Determinism contract (load-bearing for reproducibility): walk number w
started at registry index i draws all of its uniforms from
``Generator(PCG64(SeedSequence(entropy=seed, spawn_key=(1, i, w))))``, one
uniform per emitted step, choosing the first successor (ascending node
index) whose running cumulative biased weight exceeds u * total.  The
per-epoch shuffle of start nodes uses spawn_key=(0,).  Any sampler that
honors this contract reproduces corpora token-for-token.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Hashable, Iterator, Sequence

import numpy as np

from . import _kernels
from .alias import AliasTableSet
from .graph import AdjustedAggregate

DEFAULT_ALIAS_BUDGET = 1 << 30  # 1 GiB for lazily cached second-order tables


@dataclass(frozen=True)
class WalkConfig:
    """Walk hyperparameters: p, q, r, length l, starts s, minimum a."""

    return_p: float = 1.0
    inout_q: float = 0.5
    layer_r: float = 0.25
    walk_length: int = 30
    walks_per_node: int = 10
    min_samples_per_node: int = 1
    seed: int = 0

    def __post_init__(self):
        if not (self.return_p > 0 and self.inout_q > 0 and self.layer_r > 0):
            raise ValueError("p, q and r must all be positive")
        if self.walk_length < 2:
            raise ValueError("walk_length must be >= 2")
        if self.walks_per_node < 1 or self.min_samples_per_node < 1:
            raise ValueError("walks_per_node and min_samples_per_node must be >= 1")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must fit in 64 bits")

    @property
    def rounds(self) -> int:
        return max(self.walks_per_node, self.min_samples_per_node)


@dataclass
class NeighborhoodCorpus:
    """Bag of sampled walks, stored as registry-index arrays.

    ``walks_idx[i]`` is an int32 array of node registry indices; ``walks``
    materializes identifier sequences for inspection.  Every consecutive
    pair in a walk has positive aggregate weight.
    """

    walks_idx: list
    node_ids: list
    total_tokens: int

    @property
    def num_walks(self) -> int:
        return len(self.walks_idx)

    @property
    def walks(self) -> list:
        return [self.walk_ids(i) for i in range(len(self.walks_idx))]

    def walk_ids(self, i: int) -> list:
        return [self.node_ids[j] for j in self.walks_idx[i]]

    def iter_walks(self) -> Iterator[list]:
        for i in range(len(self.walks_idx)):
            yield self.walk_ids(i)


def schedule_stream(seed: int) -> np.random.Generator:
    """Generator that orders start nodes within each round."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy=seed, spawn_key=(0,))))


def walk_substream(seed: int, node_idx: int, walk_idx: int) -> np.random.Generator:
    """Independent generator for one (start node, walk number) pair."""
    seq = np.random.SeedSequence(entropy=seed, spawn_key=(1, node_idx, walk_idx))
    return np.random.Generator(np.random.PCG64(seq))


def transition_bias(
    prev: Hashable, candidate: Hashable, current: Hashable, agg: AdjustedAggregate, cfg: WalkConfig
) -> float:
    """Second-order bias of stepping current -> candidate given predecessor.

    1/p when the candidate is the predecessor, 1 when it is adjacent to the
    predecessor on the aggregate, 1/q otherwise.
    """
    t = agg.node_index(prev)
    x = agg.node_index(candidate)
    agg.node_index(current)  # validate
    if x == t:
        return 1.0 / cfg.return_p
    if agg.weight(prev, candidate) > 0.0:
        return 1.0
    return 1.0 / cfg.inout_q


def _sample_walk_indices(agg, start_idx, cfg, rng, out):
    indptr, indices, data = agg.csr_arrays()
    uniforms = rng.random(cfg.walk_length - 1)
    count = _kernels.walk_kernel(
        indptr,
        indices,
        data,
        np.int64(start_idx),
        1.0 / cfg.return_p,
        1.0 / cfg.inout_q,
        uniforms,
        out,
    )
    return count


def sample_walk(
    agg: AdjustedAggregate, start: Hashable, cfg: WalkConfig, rng: np.random.Generator
) -> list:
    """One truncated biased walk starting at `start`; returns node ids."""
    start_idx = agg.node_index(start)
    if agg.degrees[start_idx] <= 0.0:
        raise ValueError(f"no outgoing mass at start node {start!r}")
    out = np.empty(cfg.walk_length, dtype=np.int64)
    count = _sample_walk_indices(agg, start_idx, cfg, rng, out)
    return [agg.node_ids[i] for i in out[:count]]


def generate_corpus(
    agg: AdjustedAggregate,
    cfg: WalkConfig,
    sampler: str = "cdf",
    alias_max_bytes: int = DEFAULT_ALIAS_BUDGET,
) -> NeighborhoodCorpus:
    """Sample max(s, a) walks from every positive-degree node.

    Start order is reshuffled every round by the schedule stream; each walk
    draws from its own substream, so the corpus depends only on
    (cfg, network), not on execution order.  `sampler` picks the inner
    draw: "cdf" (canonical, inverse-CDF) or "alias" (O(1) per step via
    cached alias tables; same walk law, different token stream).
    """
    if sampler not in ("cdf", "alias"):
        raise ValueError(f"unknown sampler {sampler!r}")
    active = np.flatnonzero(agg.degrees > 0.0)
    if active.size == 0:
        raise ValueError("no node with positive degree; cannot generate corpus")

    tables = None
    if sampler == "alias":
        tables = AliasTableSet(agg, cfg, max_bytes=alias_max_bytes)

    schedule = schedule_stream(cfg.seed)
    out = np.empty(cfg.walk_length, dtype=np.int64)
    walks: list = []
    total = 0
    for round_idx in range(cfg.rounds):
        order = schedule.permutation(active)
        for start_idx in order:
            rng = walk_substream(cfg.seed, int(start_idx), round_idx)
            if tables is not None:
                seq = tables.sample_walk_indices(int(start_idx), cfg.walk_length, rng)
                count = len(seq)
                out[:count] = seq
            else:
                count = _sample_walk_indices(agg, int(start_idx), cfg, rng, out)
            walks.append(out[:count].astype(np.int32))
            total += count
    if tables is not None and tables.budget_exceeded:
        warnings.warn(
            "alias table budget exceeded; uncached edges sampled by linear scan",
            RuntimeWarning,
            stacklevel=2,
        )
    return NeighborhoodCorpus(walks_idx=walks, node_ids=agg.node_ids, total_tokens=total)


def write_corpus(corpus: NeighborhoodCorpus, path) -> None:
    """Dump one walk per line, space-separated node identifiers."""
    with open(path, "w", encoding="utf-8") as fh:
        for walk in corpus.iter_walks():
            fh.write(" ".join(str(u) for u in walk) + "\n")
