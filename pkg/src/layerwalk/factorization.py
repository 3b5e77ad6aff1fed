"""Closed-form co-occurrence limits of the biased walk (verification oracles).

For a connected non-bipartite aggregate, the ratio #(w,c)|D|/(#(w)#(c))
accumulated from one infinite walk converges to a matrix computable from
the second-order transition kernel and its edge-state stationary
distribution; at p = q = 1 it collapses to (vol/k) (sum_x P^x) D^-1 for the
first-order chain.  These oracles characterize what SGNS implicitly
factorizes (log of the ratio minus log b) and let tests verify the walk
engine against exact limits.  Everything here is desk-scale by design.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .graph import AdjustedAggregate
from .skipgram import corpus_pairs
from .walks import NeighborhoodCorpus

SECOND_ORDER_MAX_NODES = 200
DEFAULT_LOG_FLOOR = 1e-12


class ResourceCapError(RuntimeError):
    """Requested computation exceeds a guarded size cap."""


def _support_components(agg: AdjustedAggregate) -> list:
    """Connected components over positive-degree nodes of the support."""
    indptr, indices, data = agg.csr_arrays()
    n = agg.num_nodes
    seen = np.zeros(n, dtype=bool)
    components = []
    for s in range(n):
        if seen[s] or agg.degrees[s] <= 0:
            continue
        comp = []
        queue = deque([s])
        seen[s] = True
        while queue:
            v = queue.popleft()
            comp.append(v)
            for k in range(indptr[v], indptr[v + 1]):
                u = indices[k]
                if data[k] > 0 and not seen[u]:
                    seen[u] = True
                    queue.append(u)
        components.append(comp)
    return components


def _require_connected(agg: AdjustedAggregate) -> None:
    comps = _support_components(agg)
    if len(comps) > 1:
        names = [[agg.node_ids[i] for i in comp[:10]] for comp in comps[:4]]
        raise ValueError(
            f"aggregate support is disconnected: {len(comps)} components, e.g. {names}"
        )
    if not comps:
        raise ValueError("aggregate has no positive-degree nodes")


def _is_bipartite(agg: AdjustedAggregate) -> bool:
    indptr, indices, data = agg.csr_arrays()
    n = agg.num_nodes
    color = np.full(n, -1, dtype=np.int8)
    for s in range(n):
        if color[s] >= 0 or agg.degrees[s] <= 0:
            continue
        color[s] = 0
        queue = deque([s])
        while queue:
            v = queue.popleft()
            for k in range(indptr[v], indptr[v + 1]):
                if data[k] <= 0:
                    continue
                u = indices[k]
                if u == v:
                    return False  # self-loop is an odd cycle
                if color[u] < 0:
                    color[u] = 1 - color[v]
                    queue.append(u)
                elif color[u] == color[v]:
                    return False
    return True


@dataclass
class SecondOrderKernel:
    """Row-stochastic chain over directed edge states (current, previous)."""

    node_ids: list
    states: np.ndarray  # (E, 2) int64 rows (current, previous)
    matrix: sp.csr_matrix  # E x E, entry (s, s') = P(next state s' | s)
    state_index: dict

    @property
    def num_states(self) -> int:
        return int(self.states.shape[0])

    def prob(self, nxt, cur, prev) -> float:
        """P(next u | current v, previous w) by node identifiers."""
        lookup = {node: i for i, node in enumerate(self.node_ids)}
        u, v, w = lookup[nxt], lookup[cur], lookup[prev]
        s = self.state_index.get((v, w))
        if s is None:
            raise KeyError(f"state (current={cur!r}, previous={prev!r}) not reachable")
        t = self.state_index.get((u, v))
        if t is None:
            return 0.0
        return float(self.matrix[s, t])


@dataclass
class EdgeStationary:
    """Stationary mass over edge states; residual is the final L1 gap."""

    node_ids: list
    states: np.ndarray
    masses: np.ndarray
    state_index: dict
    residual: float

    def mass(self, cur, prev) -> float:
        lookup = {node: i for i, node in enumerate(self.node_ids)}
        s = self.state_index.get((lookup[cur], lookup[prev]))
        return float(self.masses[s]) if s is not None else 0.0

    def node_marginals(self) -> np.ndarray:
        """X_w = total stationary mass of states with current node w."""
        out = np.zeros(len(self.node_ids))
        np.add.at(out, self.states[:, 0], self.masses)
        return out


def second_order_kernel(agg: AdjustedAggregate, p: float, q: float) -> SecondOrderKernel:
    """Exact transition kernel of the biased walk on edge states.

    State (v, w) means the walk sits at v having arrived from w.  Guarded
    at N <= 200 nodes: the state space is every directed support edge.
    """
    n = agg.num_nodes
    if n > SECOND_ORDER_MAX_NODES:
        raise ResourceCapError(
            f"second-order kernel is guarded at N <= {SECOND_ORDER_MAX_NODES} (got {n})"
        )
    if not (p > 0 and q > 0):
        raise ValueError("p and q must be positive")
    _require_connected(agg)
    indptr, indices, data = agg.csr_arrays()

    states = []
    state_index = {}
    for v in range(n):
        for k in range(indptr[v], indptr[v + 1]):
            w = indices[k]
            state_index[(v, w)] = len(states)
            states.append((v, w))
    states = np.array(states, dtype=np.int64).reshape(-1, 2)
    n_states = states.shape[0]

    rows, cols, vals = [], [], []
    inv_p, inv_q = 1.0 / p, 1.0 / q
    neighbor_sets = [set(indices[indptr[v]: indptr[v + 1]].tolist()) for v in range(n)]
    for s in range(n_states):
        v, w = states[s]
        lo, hi = indptr[v], indptr[v + 1]
        succ = indices[lo:hi]
        wts = data[lo:hi].copy()
        bias = np.where(np.isin(succ, list(neighbor_sets[w])), 1.0, inv_q)
        bias[succ == w] = inv_p
        pi = bias * wts
        z = pi.sum()
        for u, mass in zip(succ, pi):
            if mass <= 0:
                continue
            rows.append(s)
            cols.append(state_index[(int(u), int(v))])
            vals.append(mass / z)
    matrix = sp.csr_matrix(
        (np.array(vals), (np.array(rows), np.array(cols))), shape=(n_states, n_states)
    )
    return SecondOrderKernel(
        node_ids=agg.node_ids, states=states, matrix=matrix, state_index=state_index
    )


def edge_stationary(
    kernel: SecondOrderKernel, tol: float = 1e-10, max_iter: int = 100_000
) -> EdgeStationary:
    """Power-iterate x <- xP to the stationary edge distribution."""
    t = kernel.matrix
    e = kernel.num_states
    # perturb the start (fixed seed): a uniform start can sit exactly on the
    # stationary vector of a periodic chain and mask non-convergence
    wiggle = np.random.Generator(np.random.PCG64(np.random.SeedSequence(0xA77E57)))
    x = 1.0 + 0.1 * wiggle.random(e)
    x /= x.sum()
    for _ in range(max_iter):
        nxt = t.T @ x
        nxt /= nxt.sum()
        residual = float(np.abs(nxt - x).sum())
        x = nxt
        if residual < tol:
            return EdgeStationary(
                node_ids=kernel.node_ids,
                states=kernel.states,
                masses=x,
                state_index=kernel.state_index,
                residual=residual,
            )
    raise ValueError(
        f"edge-state power iteration did not reach residual {tol} in {max_iter} "
        "iterations; the aggregate is likely bipartite (periodic chain)"
    )


def _cur_indicator(states: np.ndarray, n: int) -> sp.csr_matrix:
    e = states.shape[0]
    return sp.csr_matrix((np.ones(e), (np.arange(e), states[:, 0])), shape=(e, n))


def limit_matrix_general(kernel: SecondOrderKernel, stationary: EdgeStationary, k: int) -> np.ndarray:
    """Limit of the windowed co-occurrence ratio for any p, q, r.

    Entry (w, c) averages, over step offsets j = 1..k, the stationary
    probability of seeing w then c j steps later (plus the reverse), divided
    by the product of node marginals.  Unreachable nodes yield NaN.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    n = len(kernel.node_ids)
    b_cur = _cur_indicator(kernel.states, n)
    x = stationary.masses
    xm = np.asarray(b_cur.T @ x).ravel()

    reach = b_cur.toarray()  # row s, col c: P(current after j steps = c | s)
    num = np.zeros((n, n))
    for _ in range(k):
        reach = kernel.matrix @ reach
        y = b_cur.T @ (x[:, None] * reach)
        num += y + y.T
    with np.errstate(divide="ignore", invalid="ignore"):
        limit = num / (2.0 * k) / np.outer(xm, xm)
    limit[xm == 0, :] = np.nan
    limit[:, xm == 0] = np.nan
    return limit


def limit_matrix_dw(agg: AdjustedAggregate, k: int) -> np.ndarray:
    """First-order (p = q = 1) limit: (vol/k) (sum_x P^x) D^-1."""
    if k < 1:
        raise ValueError("k must be >= 1")
    _require_connected(agg)
    if np.any(agg.degrees <= 0):
        isolated = [agg.node_ids[i] for i in np.flatnonzero(agg.degrees <= 0)[:10]]
        raise ValueError(f"aggregate has isolated nodes {isolated}; limit undefined")
    if _is_bipartite(agg):
        raise ValueError("aggregate is bipartite; the walk has no stationary limit")
    a = agg.dense()
    deg = agg.degrees
    p = a / deg[:, None]
    acc = np.zeros_like(p)
    step = np.eye(a.shape[0])
    for _ in range(k):
        step = step @ p
        acc += step
    return (agg.volume / k) * acc / deg[None, :]


def factorization_target(limit: np.ndarray, negative_b: int, floor: float = DEFAULT_LOG_FLOOR) -> np.ndarray:
    """SGNS implicit factorization target: log(limit) - log(b), floored.

    Zero (or tiny) limit entries are clamped at `floor` before the log, the
    standard dodge for log(0) in implicit-factorization targets.
    """
    if negative_b < 1:
        raise ValueError("negative_b must be >= 1")
    if not 0 < floor:
        raise ValueError("floor must be positive")
    return np.log(np.maximum(limit, floor)) - np.log(float(negative_b))


@dataclass
class CooccurrenceStats:
    """Windowed co-occurrence counts: joint #(w,c), marginals, total |D|.

    #(w,c) counts center-context incidences in both directions, so it is
    symmetric and sums to twice the ordered windowed-pair count.
    """

    node_ids: list
    window_k: int
    pair_counts: np.ndarray
    node_counts: np.ndarray
    total: float


def empirical_cooccurrence(corpus: NeighborhoodCorpus, k: int) -> tuple[CooccurrenceStats, np.ndarray]:
    """Count windowed pairs over the corpus and form the co-occurrence ratio.

    Returns (stats, ratio) with ratio[w, c] = #(w,c) |D| / (#(w) #(c)),
    NaN where a marginal vanishes.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    n = len(corpus.node_ids)
    centers, contexts = corpus_pairs(corpus, k)
    ordered = np.zeros((n, n))
    np.add.at(ordered, (centers, contexts), 1.0)
    counts = ordered + ordered.T
    node_counts = counts.sum(axis=1)
    total = float(counts.sum())
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = counts * total / np.outer(node_counts, node_counts)
    ratio[node_counts == 0, :] = np.nan
    ratio[:, node_counts == 0] = np.nan
    stats = CooccurrenceStats(
        node_ids=corpus.node_ids,
        window_k=k,
        pair_counts=counts,
        node_counts=node_counts,
        total=total,
    )
    return stats, ratio
