"""Skip-gram with negative sampling over a walk corpus.

Two weight matrices: input rows are the returned features F, output rows
are context vectors.  Per positive (center, context) pair the loss is
-log sigma(f'_c . f_u) - sum_neg log sigma(-f'_n . f_u); negatives come
from the 3/4-power unigram distribution of corpus tokens.  The learning
rate decays linearly from initial_lr to initial_lr / 100 across all
scheduled updates.  Single-threaded training is a pure function of
(corpus, config); the parallel mode is racy and non-deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Sequence

import numpy as np
from scipy.special import logsumexp

from . import _kernels
from .walks import NeighborhoodCorpus

EXACT_SOFTMAX_MAX_NODES = 2000

_PAIR_CACHE: dict = {}


@dataclass(frozen=True)
class SkipGramConfig:
    """Embedding dimension D, window radius k, negatives b, lr, epochs."""

    dim_d: int = 100
    context_k: int = 10
    negative_b: int = 5
    initial_lr: float = 0.025
    epochs: int = 5
    seed: int = 0

    def __post_init__(self):
        if self.dim_d < 1:
            raise ValueError("dim_d must be >= 1")
        if self.context_k < 1:
            raise ValueError("context_k must be >= 1")
        if self.negative_b < 1:
            raise ValueError("negative_b must be >= 1")
        if not self.initial_lr > 0:
            raise ValueError("initial_lr must be positive")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must fit in 64 bits")


@dataclass
class EmbeddingModel:
    """Learned feature matrix plus context weights over the node registry."""

    node_ids: list
    input_weights: np.ndarray
    output_weights: np.ndarray
    occurrence_counts: np.ndarray
    loss_history: list = field(default_factory=list)
    _index: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if not self._index:
            self._index = {node: i for i, node in enumerate(self.node_ids)}

    @property
    def num_nodes(self) -> int:
        return len(self.node_ids)

    @property
    def dim(self) -> int:
        return int(self.input_weights.shape[1])

    def node_index(self, node: Hashable) -> int:
        try:
            return self._index[node]
        except KeyError:
            raise KeyError(f"unknown node {node!r}") from None

    def vector(self, node: Hashable) -> np.ndarray:
        return self.input_weights[self.node_index(node)]

    @property
    def zero_occurrence(self) -> list:
        return [self.node_ids[i] for i in np.flatnonzero(self.occurrence_counts == 0)]


def _window_offsets(k: int) -> np.ndarray:
    return np.concatenate([np.arange(-k, 0), np.arange(1, k + 1)])


def window_pairs(length: int, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Positions (i, j) with 0 < |i - j| <= k for a walk of given length.

    Canonical enumeration order: center-major, context ascending.  Cached
    per (length, k) since corpora reuse a handful of walk lengths.
    """
    key = (length, k)
    hit = _PAIR_CACHE.get(key)
    if hit is not None:
        return hit
    offsets = _window_offsets(k)
    ci = np.repeat(np.arange(length, dtype=np.int64), offsets.size)
    cj = ci + np.tile(offsets, length)
    mask = (cj >= 0) & (cj < length)
    pair = (ci[mask], cj[mask])
    _PAIR_CACHE[key] = pair
    return pair


def corpus_pairs(corpus: NeighborhoodCorpus, k: int) -> tuple[np.ndarray, np.ndarray]:
    """All (center, context) registry-index pairs, walk-major order."""
    centers, contexts = [], []
    for walk in corpus.walks_idx:
        ci, cj = window_pairs(len(walk), k)
        w = np.asarray(walk, dtype=np.int64)
        centers.append(w[ci])
        contexts.append(w[cj])
    if not centers:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    return np.concatenate(centers), np.concatenate(contexts)


def occurrence_counts(corpus: NeighborhoodCorpus, num_nodes: int) -> np.ndarray:
    counts = np.zeros(num_nodes, dtype=np.int64)
    for walk in corpus.walks_idx:
        counts += np.bincount(np.asarray(walk, dtype=np.int64), minlength=num_nodes)
    return counts


def noise_distribution(counts: np.ndarray) -> np.ndarray:
    """Unigram token frequencies raised to 3/4, normalized."""
    w = np.asarray(counts, dtype=np.float64) ** 0.75
    total = w.sum()
    if total <= 0:
        raise ValueError("corpus has no tokens")
    return w / total


def _draw_negatives(noise_cdf: np.ndarray, rng: np.random.Generator, n_pairs: int, b: int) -> np.ndarray:
    u = rng.random((n_pairs, b))
    idx = np.searchsorted(noise_cdf, u, side="right")
    return np.minimum(idx, noise_cdf.size - 1).astype(np.int64)


def train(corpus: NeighborhoodCorpus, cfg: SkipGramConfig, threads: int = 1) -> EmbeddingModel:
    """Fit SGNS over the corpus for cfg.epochs passes.

    Zero-occurrence nodes keep their seeded initialization and are reported
    via the model rather than dropped, so F always has one row per registry
    node.  NaN or Inf in the weights aborts with a diagnostic.
    """
    n = len(corpus.node_ids)
    if n == 0 or corpus.total_tokens == 0:
        raise ValueError("corpus is empty")
    counts = occurrence_counts(corpus, n)
    noise = noise_distribution(counts)
    noise_cdf = np.cumsum(noise)

    init_rng = np.random.Generator(
        np.random.PCG64(np.random.SeedSequence(entropy=cfg.seed, spawn_key=(0,)))
    )
    w_in = (init_rng.random((n, cfg.dim_d)) - 0.5) / cfg.dim_d
    w_out = np.zeros((n, cfg.dim_d))

    centers, contexts = corpus_pairs(corpus, cfg.context_k)
    n_pairs = centers.size
    if n_pairs == 0:
        raise ValueError("no context pairs; walks shorter than 2 tokens")
    total_updates = cfg.epochs * n_pairs

    neg_rng = np.random.Generator(
        np.random.PCG64(np.random.SeedSequence(entropy=cfg.seed, spawn_key=(1,)))
    )
    threads = min(int(threads), _kernels.max_threads())  # clamp to host capacity
    if threads > 1 and _kernels.HAVE_NUMBA:
        _kernels.set_num_threads(threads)
        epoch_fn = _kernels.sgns_epoch_kernel_parallel
    else:
        epoch_fn = _kernels.sgns_epoch_kernel

    model = EmbeddingModel(
        node_ids=corpus.node_ids,
        input_weights=w_in,
        output_weights=w_out,
        occurrence_counts=counts,
    )
    for epoch in range(cfg.epochs):
        negatives = _draw_negatives(noise_cdf, neg_rng, n_pairs, cfg.negative_b)
        loss = epoch_fn(
            w_in, w_out, centers, contexts, negatives, cfg.initial_lr,
            epoch * n_pairs, total_updates,
        )
        model.loss_history.append(float(loss))
        if not (np.isfinite(w_in).all() and np.isfinite(w_out).all()):
            raise FloatingPointError(
                f"non-finite weights after epoch {epoch + 1}; "
                f"learning rate {cfg.initial_lr} is too high for this corpus"
            )
    return model


def sgns_pair_update(
    model: EmbeddingModel,
    center: Hashable,
    context: Hashable,
    negatives: Sequence[Hashable],
    lr: float,
) -> float:
    """Apply one SGNS gradient step in place; returns the pre-update loss.

    All dot products use pre-update rows, so the step is the exact gradient
    of the per-pair loss even when a negative repeats or equals the context.
    """
    if not lr > 0:
        raise ValueError("lr must be positive")
    c = np.int64(model.node_index(center))
    ctx = np.int64(model.node_index(context))
    neg = np.array([model.node_index(x) for x in negatives], dtype=np.int64)
    grad_h = np.empty(model.dim)
    return float(
        _kernels.sgns_pair_kernel(
            model.input_weights, model.output_weights, c, ctx, neg, lr, grad_h
        )
    )


def exact_log_likelihood(model: EmbeddingModel, corpus: NeighborhoodCorpus, k: int) -> float:
    """Full-softmax corpus log-likelihood with tied input vectors.

    Sum over context pairs of f_c . f_u - log sum_w exp(f_w . f_u), the
    monitoring oracle for small N; both roles use the input matrix, the
    symmetric form the aggregate's undirected neighborhoods imply.
    """
    n = model.num_nodes
    if n > EXACT_SOFTMAX_MAX_NODES:
        raise ValueError(
            f"exact softmax is guarded at N <= {EXACT_SOFTMAX_MAX_NODES} (got {n}); "
            "use a sampled estimate instead"
        )
    centers, contexts = corpus_pairs(corpus, k)
    if centers.size == 0:
        return 0.0
    f = model.input_weights
    gram = f @ f.T
    log_z = logsumexp(gram, axis=1)
    return float(np.sum(gram[centers, contexts] - log_z[centers]))
