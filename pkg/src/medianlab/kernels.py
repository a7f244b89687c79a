"""Hot numeric kernels.

Each kernel has a loop implementation compiled with numba (``*_jit``) and a
vectorised numpy implementation (``*_numpy``).  The public names dispatch on
:data:`medianlab._accel.USE_NUMBA`; both variants stay importable so tests and
the benchmark can compare them directly.

Kernels:

* ``axiom_scan``   first violating tuple of each median axiom in a table
* ``phi_iterate``  float iteration of the self-median operator
* ``walk_block``   one block of steps of the random walk on F2 x Z/2
"""
import numpy as np

from ._accel import USE_NUMBA, njit

NO_WITNESS = -1


# --------------------------------------------------------------------------
# axiom scan


@njit(cache=True)
def _first_symmetry_jit(t):
    n = t.shape[0]
    out = np.full(5, NO_WITNESS, np.int64)
    for x in range(n):
        for y in range(n):
            for z in range(n):
                v = t[x, y, z]
                if v != t[x, z, y] or v != t[y, x, z]:
                    out[0] = x
                    out[1] = y
                    out[2] = z
                    return out
    return out


@njit(cache=True)
def _first_absorption_jit(t):
    n = t.shape[0]
    out = np.full(5, NO_WITNESS, np.int64)
    for x in range(n):
        for y in range(n):
            if t[x, x, y] != x:
                out[0] = x
                out[1] = x
                out[2] = y
                return out
    return out


@njit(cache=True)
def _first_distributive_jit(t):
    n = t.shape[0]
    out = np.full(5, NO_WITNESS, np.int64)
    for x in range(n):
        for y in range(n):
            for z in range(n):
                m = t[x, y, z]
                for u in range(n):
                    for v in range(n):
                        if t[m, u, v] != t[x, t[y, u, v], t[z, u, v]]:
                            out[0] = x
                            out[1] = y
                            out[2] = z
                            out[3] = u
                            out[4] = v
                            return out
    return out


@njit(cache=True)
def axiom_scan_jit(t):
    out = np.empty((3, 5), np.int64)
    out[0] = _first_symmetry_jit(t)
    out[1] = _first_absorption_jit(t)
    out[2] = _first_distributive_jit(t)
    return out


def axiom_scan_numpy(t):
    n = t.shape[0]
    out = np.full((3, 5), NO_WITNESS, np.int64)

    bad = (t != t.transpose(0, 2, 1)) | (t != t.transpose(1, 0, 2))
    hits = np.flatnonzero(bad)
    if hits.size:
        out[0, :3] = np.unravel_index(hits[0], t.shape)

    idx = np.arange(n)
    bad = t[idx, idx, :] != idx[:, None]
    hits = np.flatnonzero(bad)
    if hits.size:
        x, y = np.unravel_index(hits[0], (n, n))
        out[1, :3] = (x, x, y)

    for x in range(n):
        tx = t[x]
        for y in range(n):
            lhs = t[t[x, y, :]]  # (z, u, v) -> m(m(x,y,z),u,v)
            rhs = tx[t[y][None, :, :], t]  # m(x, m(y,u,v), m(z,u,v))
            hits = np.flatnonzero(lhs != rhs)
            if hits.size:
                z, u, v = np.unravel_index(hits[0], lhs.shape)
                out[2] = (x, y, z, u, v)
                return out
    return out


# --------------------------------------------------------------------------
# self-median operator, float iteration


@njit(cache=True)
def phi_iterate_jit(table, etas, iters):
    count, n = etas.shape
    cur = etas.copy()
    step = np.zeros(count)
    nxt = np.empty(n)
    for s in range(count):
        for _ in range(iters):
            nxt[:] = 0.0
            for x in range(n):
                ex = cur[s, x]
                if ex == 0.0:
                    continue
                for y in range(n):
                    exy = ex * cur[s, y]
                    if exy == 0.0:
                        continue
                    for z in range(n):
                        nxt[table[x, y, z]] += exy * cur[s, z]
            # Phi maps total mass t to t^3; renormalise so float drift cannot grow
            total = 0.0
            for x in range(n):
                total += nxt[x]
            d = 0.0
            for x in range(n):
                nxt[x] /= total
                d += abs(nxt[x] - cur[s, x])
                cur[s, x] = nxt[x]
            step[s] = 0.5 * d
    return cur, step


def phi_iterate_numpy(table, etas, iters, max_batch_entries=1 << 22):
    count, n = etas.shape
    flat = table.reshape(-1)
    order = np.argsort(flat, kind="stable")
    starts = np.searchsorted(flat[order], np.arange(n))
    cur = np.array(etas, dtype=np.float64, copy=True)
    step = np.zeros(count)
    batch = max(1, max_batch_entries // flat.size)
    for lo in range(0, count, batch):
        c = cur[lo:lo + batch]
        for _ in range(iters):
            w = (c[:, :, None, None] * c[:, None, :, None] * c[:, None, None, :]).reshape(len(c), -1)
            nxt = np.add.reduceat(w[:, order], starts, axis=1)
            nxt /= nxt.sum(axis=1, keepdims=True)
            step[lo:lo + batch] = 0.5 * np.abs(nxt - c).sum(axis=1)
            c = nxt
        cur[lo:lo + batch] = c
    return cur, step


# --------------------------------------------------------------------------
# random walk on F2 x Z/2
#
# step code s in 0..7: letter = s & 3 (a, a^-1, b, b^-1), s >= 4 flips the sign.
# The inverse of letter l is l ^ 1.


@njit(cache=True)
def walk_block_jit(steps, words, lengths, depth):
    count, m = steps.shape
    out_words = np.full((count, depth), -1, np.int8)
    out_len = np.empty(count, np.int64)
    parity = np.empty(count, np.int8)
    run = np.empty(count, np.int64)
    stack = np.empty(m + depth, np.int8)
    for i in range(count):
        length = lengths[i]
        for j in range(length):
            stack[j] = words[i, j]
        p = 0
        r = 0
        for t in range(m):
            s = steps[i, t]
            letter = s & 3
            if s >= 4:
                p ^= 1
                r = 0
            else:
                r += 1
            if length > 0 and stack[length - 1] == (letter ^ 1):
                length -= 1
            else:
                stack[length] = letter
                length += 1
        for j in range(min(length, depth)):
            out_words[i, j] = stack[j]
        out_len[i] = length
        parity[i] = p
        run[i] = r
    return out_words, out_len, parity, run


def walk_block_numpy(steps, words, lengths, depth):
    count, m = steps.shape
    rows = np.arange(count)
    stack = np.full((count, m + depth), -1, np.int8)
    stack[:, :depth] = words
    length = np.array(lengths, dtype=np.int64, copy=True)
    parity = np.zeros(count, np.int8)
    run = np.zeros(count, np.int64)
    for t in range(m):
        s = steps[:, t]
        letter = (s & 3).astype(np.int8)
        flip = s >= 4
        parity ^= flip.astype(np.int8)
        run = np.where(flip, 0, run + 1)
        top = stack[rows, np.maximum(length - 1, 0)]
        cancel = (length > 0) & (top == (letter ^ 1))
        length -= cancel
        push = ~cancel
        stack[rows[push], length[push]] = letter[push]
        length += push
    out_words = np.where(np.arange(depth)[None, :] < length[:, None], stack[:, :depth], -1).astype(np.int8)
    return out_words, length, parity, run


if USE_NUMBA:
    axiom_scan = axiom_scan_jit
    phi_iterate = phi_iterate_jit
    walk_block = walk_block_jit
else:
    axiom_scan = axiom_scan_numpy
    phi_iterate = phi_iterate_numpy
    walk_block = walk_block_numpy


def interval_masks(table):
    """Bitmask of ``[x, y]`` for every pair, as a nested list of Python ints.

    Requires ``n <= 64`` so that a mask fits a uint64.
    """
    n = table.shape[0]
    fixed = table == np.arange(n)[None, None, :]
    weights = np.left_shift(np.uint64(1), np.arange(n, dtype=np.uint64))
    masks = (fixed.astype(np.uint64) * weights).sum(axis=2, dtype=np.uint64)
    return [[int(v) for v in row] for row in masks]
