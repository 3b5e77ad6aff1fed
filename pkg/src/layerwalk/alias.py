"""Alias-method sampling for O(1) walk transitions.

Vose construction: O(n) build, two uniforms per draw.  First-order tables
(one per node) cover initial steps; second-order tables (one per directed
edge, conditioning on the previous node) are built lazily and cached under
a byte budget, because edge-conditioned tables over dense aggregates cost
O(N * degree^2) memory.  Uncached edges fall back to a linear scan.
"""

from __future__ import annotations

import numpy as np

from .graph import AdjustedAggregate


class AliasTable:
    """Sampler over indices 0..n-1 proportional to non-negative weights."""

    __slots__ = ("prob", "alias", "_weights_sum", "n")

    def __init__(self, weights: np.ndarray):
        w = np.asarray(weights, dtype=np.float64)
        if w.ndim != 1 or w.size == 0:
            raise ValueError("weights must be a non-empty 1-D array")
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite and non-negative")
        total = float(w.sum())
        if total <= 0:
            raise ValueError("weights must have positive total mass")
        n = w.size
        self.n = n
        self._weights_sum = total
        scaled = w * (n / total)
        prob = np.ones(n)
        alias = np.arange(n, dtype=np.int64)
        small = [i for i in range(n) if scaled[i] < 1.0]
        large = [i for i in range(n) if scaled[i] >= 1.0]
        while small and large:
            s = small.pop()
            l = large.pop()
            prob[s] = scaled[s]
            alias[s] = l
            scaled[l] = (scaled[l] + scaled[s]) - 1.0
            if scaled[l] < 1.0:
                small.append(l)
            else:
                large.append(l)
        # leftovers are 1.0 up to rounding
        for i in small:
            prob[i] = 1.0
        for i in large:
            prob[i] = 1.0
        self.prob = prob
        self.alias = alias

    def sample(self, rng: np.random.Generator) -> int:
        i = int(rng.random() * self.n)
        if rng.random() < self.prob[i]:
            return i
        return int(self.alias[i])

    def reconstructed_probabilities(self) -> np.ndarray:
        """Probability mass the table actually samples, for round-trip checks."""
        p = self.prob / self.n
        np.add.at(p, self.alias, (1.0 - self.prob) / self.n)
        return p

    @property
    def nbytes(self) -> int:
        return int(self.prob.nbytes + self.alias.nbytes)


class AliasTableSet:
    """First-order tables per node plus budget-capped second-order cache."""

    def __init__(self, agg: AdjustedAggregate, cfg, max_bytes: int = 1 << 30):
        self._agg = agg
        self._indptr, self._indices, self._data = agg.csr_arrays()
        self._inv_p = 1.0 / cfg.return_p
        self._inv_q = 1.0 / cfg.inout_q
        self.max_bytes = int(max_bytes)
        self.bytes_used = 0
        self.budget_exceeded = False
        self._edge_cache: dict = {}
        self._first_order: list = []
        for v in range(agg.num_nodes):
            lo, hi = self._indptr[v], self._indptr[v + 1]
            w = self._data[lo:hi]
            self._first_order.append(AliasTable(w) if w.size and w.sum() > 0 else None)

    def _successors(self, v: int):
        lo, hi = self._indptr[v], self._indptr[v + 1]
        return self._indices[lo:hi], self._data[lo:hi]

    def _biased_weights(self, t: int, v: int) -> np.ndarray:
        nbrs, w = self._successors(v)
        t_nbrs, _ = self._successors(t)
        bias = np.where(np.isin(nbrs, t_nbrs), 1.0, self._inv_q)
        bias[nbrs == t] = self._inv_p
        return bias * w

    def node_table(self, v: int) -> AliasTable | None:
        return self._first_order[v]

    def edge_table(self, t: int, v: int) -> AliasTable | None:
        """Cached table for steps out of v conditioned on predecessor t.

        Returns None once the byte budget is exhausted; callers then sample
        by linear scan instead.
        """
        key = (t, v)
        table = self._edge_cache.get(key)
        if table is not None:
            return table
        if self.budget_exceeded:
            return None
        weights = self._biased_weights(t, v)
        table = AliasTable(weights)
        if self.bytes_used + table.nbytes > self.max_bytes:
            self.budget_exceeded = True
            return None
        self.bytes_used += table.nbytes
        self._edge_cache[key] = table
        return table

    def _linear_draw(self, weights: np.ndarray, rng: np.random.Generator) -> int:
        cdf = np.cumsum(weights)
        return int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right").clip(0, weights.size - 1))

    def sample_walk_indices(self, start: int, length: int, rng: np.random.Generator) -> list:
        """Walk of registry indices using alias draws (same law as the CDF walker)."""
        seq = [start]
        cur = start
        prev = -1
        for _ in range(length - 1):
            nbrs, w = self._successors(cur)
            if nbrs.size == 0 or w.sum() <= 0:
                break
            if prev < 0:
                table = self._first_order[cur]
                pick = table.sample(rng)
            else:
                table = self.edge_table(prev, cur)
                if table is not None:
                    pick = table.sample(rng)
                else:
                    pick = self._linear_draw(self._biased_weights(prev, cur), rng)
            nxt = int(nbrs[pick])
            seq.append(nxt)
            prev, cur = cur, nxt
        return seq


def build_alias_tables(agg: AdjustedAggregate, cfg, max_bytes: int = 1 << 30) -> AliasTableSet:
    """Table collection for O(1) transition sampling under a memory cap."""
    return AliasTableSet(agg, cfg, max_bytes=max_bytes)
