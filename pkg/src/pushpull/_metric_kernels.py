"""Hot loops behind :mod:`pushpull.metrics`.

Each kernel has a compiled loop form and a vectorized numpy form with the
same results; :data:`pushpull._jit.USE_NUMBA` picks one at import time.
"""

import numpy as np

from ._jit import USE_NUMBA, njit


@njit
def locality_counts_loop(offsets, targets, tb_size):
    n = offsets.shape[0] - 1
    local = 0
    remote = 0
    for v in range(n):
        bv = v // tb_size
        for k in range(offsets[v], offsets[v + 1]):
            u = targets[k]
            if u == v:
                continue
            if u // tb_size == bv:
                local += 1
            else:
                remote += 1
    return local, remote


def locality_counts_numpy(offsets, targets, tb_size):
    src = np.repeat(np.arange(len(offsets) - 1, dtype=np.int64), np.diff(offsets))
    keep = src != targets
    same = (src // tb_size) == (targets // tb_size)
    local = int(np.count_nonzero(same & keep))
    return local, int(np.count_nonzero(keep)) - local


@njit
def warp_maxima_loop(degrees, warp_size):
    n = degrees.shape[0]
    nwarps = (n + warp_size - 1) // warp_size
    out = np.zeros(nwarps, dtype=np.int64)
    for v in range(n):
        w = v // warp_size
        if degrees[v] > out[w]:
            out[w] = degrees[v]
    return out


def warp_maxima_numpy(degrees, warp_size):
    n = len(degrees)
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    starts = np.arange(0, n, warp_size)
    return np.maximum.reduceat(np.asarray(degrees, dtype=np.int64), starts)


@njit
def kmeans2_loop(values, max_iters):
    n = values.shape[0]
    lo = values[0]
    hi = values[0]
    for i in range(n):
        if values[i] < lo:
            lo = values[i]
        if values[i] > hi:
            hi = values[i]
    c_lo = float(lo)
    c_hi = float(hi)
    assign = np.zeros(n, dtype=np.bool_)
    for it in range(max_iters):
        changed = False
        for i in range(n):
            x = float(values[i])
            high = abs(x - c_lo) > abs(x - c_hi)
            if it == 0 or high != assign[i]:
                changed = True
            assign[i] = high
        if not changed:
            break
        s_lo = 0.0
        s_hi = 0.0
        n_lo = 0
        n_hi = 0
        for i in range(n):
            if assign[i]:
                s_hi += values[i]
                n_hi += 1
            else:
                s_lo += values[i]
                n_lo += 1
        if n_lo > 0:
            c_lo = s_lo / n_lo
        if n_hi > 0:
            c_hi = s_hi / n_hi
    if c_lo > c_hi:
        c_lo, c_hi = c_hi, c_lo
    return c_lo, c_hi


def kmeans2_numpy(values, max_iters):
    x = np.asarray(values, dtype=np.float64)
    c_lo, c_hi = float(x.min()), float(x.max())
    assign = None
    for _ in range(max_iters):
        high = np.abs(x - c_lo) > np.abs(x - c_hi)
        if assign is not None and np.array_equal(high, assign):
            break
        assign = high
        if (~high).any():
            c_lo = float(_seq_sum(x[~high]) / np.count_nonzero(~high))
        if high.any():
            c_hi = float(_seq_sum(x[high]) / np.count_nonzero(high))
    return (c_lo, c_hi) if c_lo <= c_hi else (c_hi, c_lo)


def _seq_sum(a):
    # left-to-right accumulation, matching the compiled loop bit for bit
    return np.add.accumulate(a)[-1]


@njit
def imbalance_marks_loop(degrees, warp_size, tb_size, delta, max_iters):
    wmax = warp_maxima_loop(degrees, warp_size)
    wpb = tb_size // warp_size
    nblocks = (wmax.shape[0] + wpb - 1) // wpb
    marked = 0
    for b in range(nblocks):
        lo = b * wpb
        hi = min(lo + wpb, wmax.shape[0])
        c_lo, c_hi = kmeans2_loop(wmax[lo:hi], max_iters)
        if c_hi - c_lo > delta:
            marked += 1
    return marked, nblocks


def imbalance_marks_numpy(degrees, warp_size, tb_size, delta, max_iters):
    wmax = warp_maxima_numpy(degrees, warp_size)
    wpb = tb_size // warp_size
    nblocks = (len(wmax) + wpb - 1) // wpb
    marked = 0
    for b in range(nblocks):
        block = wmax[b * wpb:(b + 1) * wpb]
        if block.max() - block.min() <= delta:
            continue  # centroid spread never exceeds the value range
        c_lo, c_hi = kmeans2_numpy(block, max_iters)
        if c_hi - c_lo > delta:
            marked += 1
    return marked, nblocks


if USE_NUMBA:
    locality_counts = locality_counts_loop
    warp_maxima = warp_maxima_loop
    imbalance_marks = imbalance_marks_loop
else:
    locality_counts = locality_counts_numpy
    warp_maxima = warp_maxima_numpy
    imbalance_marks = imbalance_marks_numpy
