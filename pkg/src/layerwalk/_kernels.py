"""Numba-jitted inner loops for walk sampling and skip-gram training.

Every kernel is plain nopython-compatible Python so the module still works
(slowly) if numba is absent.  Kernels are RNG-free: callers pre-draw all
uniforms and negative samples with numpy Generators, which pins down the
random stream contract and keeps jitted and fallback paths token-identical.
No fastmath: float semantics must match a pure-Python reference bitwise.
"""

from __future__ import annotations

import math

import numpy as np

try:
    from numba import config as _numba_config
    from numba import njit, prange, set_num_threads

    HAVE_NUMBA = True

    def max_threads() -> int:
        return int(_numba_config.NUMBA_NUM_THREADS)

except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(func):
            return func

        return wrap

    def prange(n):
        return range(n)

    def set_num_threads(n):
        pass

    def max_threads() -> int:
        return 1


@njit(cache=True)
def _sigmoid(s):
    # below -709 exp overflows; the true value underflows to 0 anyway
    if s <= -709.0:
        return 0.0
    return 1.0 / (1.0 + math.exp(-s))


@njit(cache=True)
def _softplus(s):
    # log(1 + e^s), stable at both tails
    if s > 0.0:
        return s + math.log1p(math.exp(-s))
    return math.log1p(math.exp(s))


@njit(cache=True)
def _has_edge(indptr, indices, data, u, v):
    lo = indptr[u]
    hi = indptr[u + 1]
    while lo < hi:
        mid = (lo + hi) // 2
        c = indices[mid]
        if c == v:
            return data[mid] > 0.0
        if c < v:
            lo = mid + 1
        else:
            hi = mid
    return False


@njit(cache=True)
def walk_kernel(indptr, indices, data, start, inv_p, inv_q, uniforms, out):
    """Sample one biased second-order walk; returns the token count.

    Successors are scanned in ascending node-index order.  Each emitted step
    consumes exactly one uniform u and picks the first successor whose
    running cumulative biased weight exceeds u * total.  The first step is
    biased by edge weight alone; later steps multiply the weight by 1/p when
    the candidate is the previous node, 1 when it neighbors the previous
    node, and 1/q otherwise.  The walk truncates when no positive-mass
    successor exists.
    """
    out[0] = start
    cur = start
    prev = np.int64(-1)
    count = 1
    for step in range(uniforms.shape[0]):
        lo = indptr[cur]
        hi = indptr[cur + 1]
        total = 0.0
        for k in range(lo, hi):
            w = data[k]
            if w <= 0.0:
                continue
            if prev < 0:
                total += w
            else:
                x = indices[k]
                if x == prev:
                    total += inv_p * w
                elif _has_edge(indptr, indices, data, prev, x):
                    total += w
                else:
                    total += inv_q * w
        if total <= 0.0:
            break
        threshold = uniforms[step] * total
        acc = 0.0
        chosen = np.int64(-1)
        for k in range(lo, hi):
            w = data[k]
            if w <= 0.0:
                continue
            x = indices[k]
            if prev < 0:
                acc += w
            elif x == prev:
                acc += inv_p * w
            elif _has_edge(indptr, indices, data, prev, x):
                acc += w
            else:
                acc += inv_q * w
            chosen = x
            if acc > threshold:
                break
        out[count] = chosen
        count += 1
        prev = cur
        cur = chosen
    return count


@njit(cache=True)
def first_order_kernel(indptr, indices, data, start, uniforms, out):
    """Unbiased weighted walk: every step proportional to edge weight."""
    out[0] = start
    cur = start
    count = 1
    for step in range(uniforms.shape[0]):
        lo = indptr[cur]
        hi = indptr[cur + 1]
        total = 0.0
        for k in range(lo, hi):
            if data[k] > 0.0:
                total += data[k]
        if total <= 0.0:
            break
        threshold = uniforms[step] * total
        acc = 0.0
        chosen = np.int64(-1)
        for k in range(lo, hi):
            if data[k] <= 0.0:
                continue
            acc += data[k]
            chosen = indices[k]
            if acc > threshold:
                break
        out[count] = chosen
        count += 1
        cur = chosen
    return count


@njit(cache=True)
def sgns_pair_kernel(w_in, w_out, center, context, negatives, lr, grad_h):
    """One skip-gram negative-sampling update; returns the pre-update loss.

    The gradient is exact for the per-pair loss: all dot products read
    pre-update rows, output-row increments accumulate (so a repeated
    negative contributes twice), and the input row updates last.
    """
    dim = w_in.shape[1]
    for d in range(dim):
        grad_h[d] = 0.0
    loss = 0.0

    s = 0.0
    for d in range(dim):
        s += w_in[center, d] * w_out[context, d]
    f = _sigmoid(s)
    loss += _softplus(-s)
    g = f - 1.0
    for d in range(dim):
        grad_h[d] += g * w_out[context, d]

    nneg = negatives.shape[0]
    gneg = np.empty(nneg)
    for j in range(nneg):
        nrow = negatives[j]
        s = 0.0
        for d in range(dim):
            s += w_in[center, d] * w_out[nrow, d]
        f = _sigmoid(s)
        loss += _softplus(s)
        gneg[j] = f
        for d in range(dim):
            grad_h[d] += f * w_out[nrow, d]

    for d in range(dim):
        w_out[context, d] -= lr * g * w_in[center, d]
    for j in range(nneg):
        nrow = negatives[j]
        gj = gneg[j]
        for d in range(dim):
            w_out[nrow, d] -= lr * gj * w_in[center, d]
    # grad_h was read from pre-update output rows; now update the input row
    for d in range(dim):
        w_in[center, d] -= lr * grad_h[d]
    return loss


@njit(cache=True)
def sgns_epoch_kernel(w_in, w_out, centers, contexts, negatives, lr0, t_start, total_updates):
    """Run sequential pair updates with a linearly decaying learning rate.

    The rate at global update t is lr0 * (1 - 0.99 * t / (total_updates-1)),
    so the first update uses lr0 and the last lr0 / 100.  Returns summed
    pre-update loss for monitoring.
    """
    n_pairs = centers.shape[0]
    n_neg = negatives.shape[1]
    grad_h = np.empty(w_in.shape[1])
    loss = 0.0
    for i in range(n_pairs):
        t = t_start + i
        if total_updates > 1:
            lr = lr0 * (1.0 - 0.99 * t / (total_updates - 1.0))
        else:
            lr = lr0
        loss += sgns_pair_kernel(
            w_in, w_out, centers[i], contexts[i], negatives[i, :n_neg], lr, grad_h
        )
    return loss


@njit(cache=True, parallel=True)
def sgns_epoch_kernel_parallel(
    w_in, w_out, centers, contexts, negatives, lr0, t_start, total_updates
):
    """Lock-free parallel variant (row updates may race, as in word2vec)."""
    n_pairs = centers.shape[0]
    n_neg = negatives.shape[1]
    loss = 0.0
    for i in prange(n_pairs):
        grad_h = np.empty(w_in.shape[1])
        t = t_start + i
        if total_updates > 1:
            lr = lr0 * (1.0 - 0.99 * t / (total_updates - 1.0))
        else:
            lr = lr0
        loss += sgns_pair_kernel(
            w_in, w_out, centers[i], contexts[i], negatives[i, :n_neg], lr, grad_h
        )
    return loss
