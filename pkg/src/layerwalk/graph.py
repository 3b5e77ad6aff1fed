"""Multilayer network data model and its r-adjusted aggregate matrix.

A multilayer network holds m weighted layers over a shared registry of
unique nodes, plus inter-layer coupling (either explicit weighted edges or
the identity convention: unit-weight edges between copies of the same node
in every pair of distinct layers).  The walk substrate is the N x N
aggregate whose entries sum intra-layer weights plus 1/r times inter-layer
weights, so the whole pipeline needs only O(N^2) storage regardless of m.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Iterable, Sequence

import numpy as np
import scipy.sparse as sp

IDENTITY_COUPLING = "identity"
EXPLICIT_COUPLING = "explicit"

# Aggregates denser than this are stored as plain ndarrays (correlation-style
# layers are near-dense; synthetic block-model layers are sparse).
DENSE_DENSITY_THRESHOLD = 0.25

# Below this node count the aggregate is accumulated into a dense buffer,
# which keeps duplicate summation order identical for (u,v) and (v,u).
_DENSE_ACCUMULATION_LIMIT = 2048


class NetworkFormatError(ValueError):
    """Malformed edge record or unsupported coupling usage."""


@dataclass
class MultilayerNetwork:
    """Registry of unique nodes plus columnar intra/inter edge storage.

    ``intra_*`` arrays hold one entry per stored undirected intra-layer edge
    (canonical node order, last write wins on duplicates).  ``inter_*``
    arrays are present only in explicit coupling mode and hold one entry per
    stored undirected inter-layer edge.  A finished network is immutable by
    convention and safe to share across threads.
    """

    num_layers: int
    node_ids: list
    coupling_mode: str
    intra_layer: np.ndarray
    intra_u: np.ndarray
    intra_v: np.ndarray
    intra_w: np.ndarray
    inter_layer_u: np.ndarray | None = None
    inter_layer_v: np.ndarray | None = None
    inter_u: np.ndarray | None = None
    inter_v: np.ndarray | None = None
    inter_w: np.ndarray | None = None
    duplicate_count: int = 0
    _index: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if not self._index:
            self._index = {node: i for i, node in enumerate(self.node_ids)}

    @property
    def num_nodes(self) -> int:
        return len(self.node_ids)

    def node_index(self, node: Hashable) -> int:
        try:
            return self._index[node]
        except KeyError:
            raise KeyError(f"unknown node {node!r}") from None

    @property
    def identity_coupling(self) -> bool:
        return self.coupling_mode == IDENTITY_COUPLING

    def num_intra_edges(self) -> int:
        return int(self.intra_w.shape[0])

    def num_inter_edges(self) -> int:
        if self.identity_coupling:
            # one implied edge per node per unordered layer pair
            m = self.num_layers
            return self.num_nodes * (m * (m - 1) // 2)
        return int(self.inter_w.shape[0])

    def intra_weight(self, layer: int, u: Hashable, v: Hashable) -> float:
        """Stored intra-layer weight, 0.0 when absent."""
        i, j = self.node_index(u), self.node_index(v)
        if i > j:
            i, j = j, i
        mask = (self.intra_layer == layer) & (self.intra_u == i) & (self.intra_v == j)
        hits = np.nonzero(mask)[0]
        return float(self.intra_w[hits[-1]]) if hits.size else 0.0


def build_network(
    edge_records: Iterable[tuple],
    coupling_mode: str = IDENTITY_COUPLING,
    num_layers: int | None = None,
) -> MultilayerNetwork:
    """Build a network from (layer_u, node_u, layer_v, node_v, weight) records.

    Records with equal layer endpoints are intra-layer edges; differing
    layers are explicit inter-layer edges (rejected under identity coupling,
    where the coupling is a flag and never materialized).  Symmetric and
    repeated duplicates are tolerated, last write wins, and the number of
    overwrites is surfaced on the result.  Node registry order is first
    appearance.
    """
    if coupling_mode not in (IDENTITY_COUPLING, EXPLICIT_COUPLING):
        raise NetworkFormatError(f"unknown coupling mode {coupling_mode!r}")
    records = list(edge_records)
    if num_layers is None:
        seen = [int(r[0]) for r in records] + [int(r[2]) for r in records]
        num_layers = max(seen) + 1 if seen else 1
    if num_layers < 1:
        raise NetworkFormatError("num_layers must be >= 1")

    node_ids: list = []
    index: dict = {}

    def _idx(node):
        i = index.get(node)
        if i is None:
            i = len(node_ids)
            index[node] = i
            node_ids.append(node)
        return i

    intra: dict = {}
    inter: dict = {}
    duplicates = 0
    for rec in records:
        lu, u, lv, v, w = rec
        lu, lv = int(lu), int(lv)
        w = float(w)
        if not np.isfinite(w):
            raise NetworkFormatError(f"non-finite weight in record {rec!r}")
        if w < 0:
            raise NetworkFormatError(f"negative weight {w!r} in record {rec!r}")
        for layer in (lu, lv):
            if not 0 <= layer < num_layers:
                raise NetworkFormatError(
                    f"layer index {layer} out of range [0, {num_layers}) in record {rec!r}"
                )
        i, j = _idx(u), _idx(v)
        if lu == lv:
            key = (lu, i, j) if i <= j else (lu, j, i)
            if key in intra:
                duplicates += 1
            intra[key] = w
        else:
            if coupling_mode == IDENTITY_COUPLING:
                raise NetworkFormatError(
                    f"explicit inter-layer record {rec!r} not allowed under identity coupling"
                )
            key = ((lu, i), (lv, j)) if (lu, i) <= (lv, j) else ((lv, j), (lu, i))
            if key in inter:
                duplicates += 1
            inter[key] = w

    intra_keys = list(intra.keys())
    net = MultilayerNetwork(
        num_layers=num_layers,
        node_ids=node_ids,
        coupling_mode=coupling_mode,
        intra_layer=np.array([k[0] for k in intra_keys], dtype=np.int32),
        intra_u=np.array([k[1] for k in intra_keys], dtype=np.int32),
        intra_v=np.array([k[2] for k in intra_keys], dtype=np.int32),
        intra_w=np.array([intra[k] for k in intra_keys], dtype=np.float64),
        duplicate_count=duplicates,
        _index=index,
    )
    if coupling_mode == EXPLICIT_COUPLING:
        inter_keys = list(inter.keys())
        net.inter_layer_u = np.array([k[0][0] for k in inter_keys], dtype=np.int32)
        net.inter_u = np.array([k[0][1] for k in inter_keys], dtype=np.int32)
        net.inter_layer_v = np.array([k[1][0] for k in inter_keys], dtype=np.int32)
        net.inter_v = np.array([k[1][1] for k in inter_keys], dtype=np.int32)
        net.inter_w = np.array([inter[k] for k in inter_keys], dtype=np.float64)
    return net


class AdjustedAggregate:
    """N x N walk substrate: intra-layer mass plus 1/r-scaled inter-layer mass.

    Symmetric with non-negative entries.  Stored sparse (CSR) at or below
    ``DENSE_DENSITY_THRESHOLD`` nonzero density and dense above it; either
    way `csr_arrays()` exposes canonical adjacency arrays (ascending column
    order per row) that the walk engine consumes.
    """

    def __init__(self, weights, node_ids: list, layer_walk_r: float):
        self.layer_walk_r = float(layer_walk_r)
        self.node_ids = node_ids
        self._index = {node: i for i, node in enumerate(node_ids)}
        n = len(node_ids)
        if sp.issparse(weights):
            weights = weights.tocsr()
            weights.sum_duplicates()
            weights.eliminate_zeros()
            weights.sort_indices()
            density = weights.nnz / (n * n) if n else 0.0
            if density > DENSE_DENSITY_THRESHOLD:
                self._dense = weights.toarray()
                self._sparse = None
            else:
                self._dense = None
                self._sparse = weights
        else:
            weights = np.asarray(weights, dtype=np.float64)
            density = np.count_nonzero(weights) / (n * n) if n else 0.0
            if density > DENSE_DENSITY_THRESHOLD:
                self._dense = weights
                self._sparse = None
            else:
                self._dense = None
                self._sparse = sp.csr_matrix(weights)
                self._sparse.sort_indices()
        if self._sparse is not None:
            self.degrees = np.asarray(self._sparse.sum(axis=1)).ravel()
        else:
            self.degrees = self._dense.sum(axis=1)
        self.volume = float(self.degrees.sum())
        self._csr_cache = None

    @property
    def num_nodes(self) -> int:
        return len(self.node_ids)

    @property
    def is_sparse(self) -> bool:
        return self._sparse is not None

    def node_index(self, node: Hashable) -> int:
        try:
            return self._index[node]
        except KeyError:
            raise KeyError(f"unknown node {node!r}") from None

    def dense(self) -> np.ndarray:
        if self._dense is not None:
            return self._dense
        return self._sparse.toarray()

    def weight(self, u: Hashable, v: Hashable) -> float:
        i, j = self.node_index(u), self.node_index(v)
        if self._dense is not None:
            return float(self._dense[i, j])
        return float(self._sparse[i, j])

    def csr_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(indptr, indices, data) with ascending indices per row."""
        if self._csr_cache is None:
            m = self._sparse if self._sparse is not None else sp.csr_matrix(self._dense)
            m.sort_indices()
            self._csr_cache = (
                m.indptr.astype(np.int64),
                m.indices.astype(np.int64),
                m.data.astype(np.float64),
            )
        return self._csr_cache

    def neighbors(self, u_idx: int) -> tuple[np.ndarray, np.ndarray]:
        indptr, indices, data = self.csr_arrays()
        lo, hi = indptr[u_idx], indptr[u_idx + 1]
        return indices[lo:hi], data[lo:hi]


def adjusted_aggregate(net: MultilayerNetwork, r: float) -> AdjustedAggregate:
    """Aggregate the network into the r-adjusted matrix.

    Entry (u, v) is 1/r times the sum of w(u, v) over ordered pairs of
    distinct layers, plus the sum of intra-layer weights.  Under identity
    coupling the inter-layer sum is m(m-1) on the diagonal and zero
    elsewhere.
    """
    if not r > 0:
        raise ValueError(f"layer walk parameter r must be > 0, got {r}")
    n = net.num_nodes
    r_inv = 1.0 / r

    rows, cols, vals = [], [], []

    iu, iv, iw = net.intra_u, net.intra_v, net.intra_w
    off = iu != iv
    rows.append(iu)
    cols.append(iv)
    vals.append(iw)
    rows.append(iv[off])
    cols.append(iu[off])
    vals.append(iw[off])

    if net.identity_coupling:
        if net.num_layers > 1 and n > 0:
            diag = np.arange(n, dtype=np.int64)
            rows.append(diag)
            cols.append(diag)
            vals.append(np.full(n, net.num_layers * (net.num_layers - 1) * r_inv))
    elif net.inter_w is not None and net.inter_w.size:
        ju, jv, jw = net.inter_u, net.inter_v, net.inter_w * r_inv
        same = ju == jv
        diff = ~same
        rows.append(ju[diff])
        cols.append(jv[diff])
        vals.append(jw[diff])
        rows.append(jv[diff])
        cols.append(ju[diff])
        vals.append(jw[diff])
        # a stored (l, u) -- (l', u) edge covers both ordered layer pairs
        rows.append(ju[same])
        cols.append(ju[same])
        vals.append(2.0 * jw[same])

    row = np.concatenate(rows) if rows else np.empty(0, dtype=np.int64)
    col = np.concatenate(cols) if cols else np.empty(0, dtype=np.int64)
    val = np.concatenate(vals) if vals else np.empty(0, dtype=np.float64)
    # zero-weight records must not register as structural support
    nz = val != 0.0
    if not nz.all():
        row, col, val = row[nz], col[nz], val[nz]

    if n <= _DENSE_ACCUMULATION_LIMIT:
        dense = np.zeros((n, n), dtype=np.float64)
        np.add.at(dense, (row.astype(np.int64), col.astype(np.int64)), val)
        return AdjustedAggregate(dense, net.node_ids, r)
    csr = sp.coo_matrix((val, (row, col)), shape=(n, n)).tocsr()
    # duplicate-summation order is unspecified in scipy; re-symmetrize so
    # (u, v) and (v, u) are bitwise equal (float addition is commutative)
    csr = (csr + csr.T.tocsr()) * 0.5
    return AdjustedAggregate(csr, net.node_ids, r)


def degree(agg: AdjustedAggregate, u: Hashable) -> float:
    """Row sum of the aggregate for node u."""
    return float(agg.degrees[agg.node_index(u)])


def volume(agg: AdjustedAggregate) -> float:
    """Sum of all aggregate degrees."""
    return agg.volume
