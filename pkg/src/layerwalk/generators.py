"""Seeded synthetic multilayer networks: planted partition and Erdos-Renyi.

Planted partition (a multilayer stochastic block model special case): one
shared balanced random partition; each layer places unweighted edges
independently with probability p_in within communities and p_out across.
ER layers use a single probability for all pairs.  Layers contain no
self-loops, coupling is identity, and everything is reproducible from the
seed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Mapping

import numpy as np

from .graph import IDENTITY_COUPLING, MultilayerNetwork

# cap on random draws materialized at once when generating many layers
_CHUNK_DRAWS = 20_000_000


@dataclass(frozen=True)
class PlantedPartitionSpec:
    """n nodes, m layers, c communities, within/between edge probabilities."""

    nodes_n: int
    layers_m: int
    communities_c: int
    p_in: float
    p_out: float
    seed: int

    def __post_init__(self):
        if self.nodes_n < 1 or self.layers_m < 1 or self.communities_c < 1:
            raise ValueError("n, m and c must all be >= 1")
        if self.communities_c > self.nodes_n:
            raise ValueError("more communities than nodes")
        if not 0 <= self.p_out <= self.p_in <= 1:
            raise ValueError("need 0 <= p_out <= p_in <= 1")

    @property
    def snr(self) -> float:
        return self.p_in / self.p_out - 1.0 if self.p_out > 0 else float("inf")


@dataclass
class Partition:
    """Community assignment: parallel node list and integer label array."""

    nodes: list
    labels: np.ndarray

    def __post_init__(self):
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if len(self.nodes) != self.labels.size:
            raise ValueError("nodes and labels length mismatch")
        self._index = {node: i for i, node in enumerate(self.nodes)}

    @classmethod
    def from_mapping(cls, assignment: Mapping) -> "Partition":
        nodes = list(assignment.keys())
        raw = [assignment[u] for u in nodes]
        uniq = {lab: i for i, lab in enumerate(dict.fromkeys(raw))}
        return cls(nodes=nodes, labels=np.array([uniq[lab] for lab in raw], dtype=np.int64))

    def label_of(self, node: Hashable) -> int:
        return int(self.labels[self._index[node]])

    def sizes(self) -> np.ndarray:
        return np.bincount(self.labels)

    @property
    def num_communities(self) -> int:
        return int(self.labels.max()) + 1 if self.labels.size else 0


def _seeded(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy=seed)))


def _balanced_partition(n: int, c: int, rng: np.random.Generator) -> np.ndarray:
    # sizes differ by at most 1; remainder goes round-robin to the first
    # communities; placement is random via a permutation
    labels = np.empty(n, dtype=np.int64)
    labels[rng.permutation(n)] = np.arange(n, dtype=np.int64) % c
    return labels


def _bernoulli_layers(n, m, pair_probs, rng, first_layer=0):
    """Columnar (layer, u, v) arrays for m layers of independent edges."""
    iu, ju = np.triu_indices(n, k=1)
    npairs = iu.size
    layer_chunks, u_chunks, v_chunks = [], [], []
    chunk = max(1, _CHUNK_DRAWS // max(npairs, 1))
    done = 0
    while done < m:
        take = min(chunk, m - done)
        hits = rng.random((take, npairs)) < pair_probs
        lidx, pidx = np.nonzero(hits)
        layer_chunks.append((lidx + first_layer + done).astype(np.int32))
        u_chunks.append(iu[pidx].astype(np.int32))
        v_chunks.append(ju[pidx].astype(np.int32))
        done += take
    layer = np.concatenate(layer_chunks) if layer_chunks else np.empty(0, dtype=np.int32)
    u = np.concatenate(u_chunks) if u_chunks else np.empty(0, dtype=np.int32)
    v = np.concatenate(v_chunks) if v_chunks else np.empty(0, dtype=np.int32)
    return layer, u, v


def _assemble(n, m, layer, u, v) -> MultilayerNetwork:
    return MultilayerNetwork(
        num_layers=m,
        node_ids=list(range(n)),
        coupling_mode=IDENTITY_COUPLING,
        intra_layer=layer,
        intra_u=u,
        intra_v=v,
        intra_w=np.ones(u.size, dtype=np.float64),
    )


def gen_planted_partition(spec: PlantedPartitionSpec) -> tuple[MultilayerNetwork, Partition]:
    """Multilayer planted-partition network plus its shared partition."""
    rng = _seeded(spec.seed)
    labels = _balanced_partition(spec.nodes_n, spec.communities_c, rng)
    iu, ju = np.triu_indices(spec.nodes_n, k=1)
    pair_probs = np.where(labels[iu] == labels[ju], spec.p_in, spec.p_out)
    layer, u, v = _bernoulli_layers(spec.nodes_n, spec.layers_m, pair_probs, rng)
    net = _assemble(spec.nodes_n, spec.layers_m, layer, u, v)
    return net, Partition(nodes=list(range(spec.nodes_n)), labels=labels)


def gen_multilayer_er(n: int, m: int, p_edge: float, seed: int) -> MultilayerNetwork:
    """m independent G(n, p_edge) layers over a shared registry."""
    if not 0 <= p_edge <= 1:
        raise ValueError(f"p_edge must be in [0, 1], got {p_edge}")
    if n < 1 or m < 1:
        raise ValueError("n and m must be >= 1")
    rng = _seeded(seed)
    layer, u, v = _bernoulli_layers(n, m, p_edge, rng)
    return _assemble(n, m, layer, u, v)


def add_noise_layers(net: MultilayerNetwork, b: int, p_edge: float, seed: int) -> MultilayerNetwork:
    """Append b ER layers of the given density over the same registry."""
    if b < 0:
        raise ValueError("b must be >= 0")
    if not 0 <= p_edge <= 1:
        raise ValueError(f"p_edge must be in [0, 1], got {p_edge}")
    if not net.identity_coupling:
        raise ValueError("noise layers require identity coupling")
    if b == 0:
        return net
    rng = _seeded(seed)
    n = net.num_nodes
    layer, u, v = _bernoulli_layers(n, b, p_edge, rng, first_layer=net.num_layers)
    return MultilayerNetwork(
        num_layers=net.num_layers + b,
        node_ids=list(net.node_ids),
        coupling_mode=IDENTITY_COUPLING,
        intra_layer=np.concatenate([net.intra_layer, layer]),
        intra_u=np.concatenate([net.intra_u, u]),
        intra_v=np.concatenate([net.intra_v, v]),
        intra_w=np.concatenate([net.intra_w, np.ones(u.size, dtype=np.float64)]),
        duplicate_count=net.duplicate_count,
    )


def average_edge_density(net: MultilayerNetwork) -> float:
    """Mean fraction of unordered node pairs carrying an edge, over layers."""
    n = net.num_nodes
    pairs = n * (n - 1) / 2
    if pairs == 0 or net.num_layers == 0:
        return 0.0
    return net.num_intra_edges() / (net.num_layers * pairs)
