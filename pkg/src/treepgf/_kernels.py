"""Compiled inner loops for enumeration and simulation.

Bit ``p`` of a key (least significant first) is the key's ``(p+1)``-th
digit, the one consulted after ``p+1`` comparisons.
"""

from __future__ import annotations

import numba as nb
import numpy as np

UNSUCCESSFUL = 0
SUCCESSFUL = 1
PATH_LENGTH = 2
PAIRS = 3


@nb.njit(nogil=True, cache=True)
def dst_walk(rows, n, x, probe, finite, width):
    """Comparisons made by probe ``x`` in the DST built from ``rows[:n]``.

    The node reached after ``p`` routing steps is the first remaining key
    (in insertion order) agreeing with ``x`` on its first ``p`` bits, so
    one pass over the keys suffices.  Returns -1 if routing needs a bit
    beyond ``width`` while keys remain.
    """
    k = 0
    p = 0
    for i in range(n):
        if ((rows[i] ^ x) & ((1 << p) - 1)) == 0:
            k += 1
            if finite:
                if rows[i] == x:
                    return k
            elif i == probe:
                return k
            p += 1
            if p > width and i < n - 1:
                return -1
    return k


@nb.njit(nogil=True, cache=True)
def enumerate_chunk(n, width, mode, finite, start, stop, stride, nbins):
    """Histogram of costs over matrix codes ``start*stride .. stop*stride``.

    Row ``i`` of a code occupies bits ``[i*width, (i+1)*width)``; in
    unsuccessful mode row ``n`` is the probe.  Returns the histogram and
    the number of width-exhausted walks.
    """
    nrows = n + 1 if mode == UNSUCCESSFUL else n
    mask = (np.int64(1) << width) - 1
    hist = np.zeros(nbins, np.int64)
    rows = np.zeros(nrows, np.int64)
    bad = 0
    for t in range(start, stop):
        c = t * stride
        for i in range(nrows):
            rows[i] = (c >> (i * width)) & mask
        if finite:
            used = np.int64(0)
            distinct = True
            for i in range(nrows):
                bit = np.int64(1) << rows[i]
                if used & bit:
                    distinct = False
                    break
                used |= bit
            if not distinct:
                continue
        if mode == UNSUCCESSFUL:
            k = dst_walk(rows, n, rows[n], -1, finite, width)
            if k < 0:
                bad += 1
            else:
                hist[k] += 1
        elif mode == SUCCESSFUL:
            for j in range(n):
                k = dst_walk(rows, n, rows[j], j, finite, width)
                if k < 0:
                    bad += 1
                else:
                    hist[k] += 1
        elif mode == PATH_LENGTH:
            total = 0
            for j in range(n):
                k = dst_walk(rows, n, rows[j], j, finite, width)
                if k < 0:
                    bad += 1
                total += k - 1
            hist[total] += 1
        else:
            # ordered pairs of distinct keys, flattened (n+1) x (n+1) table
            for a in range(n):
                ka = dst_walk(rows, n, rows[a], a, finite, width)
                for b in range(n):
                    if b != a:
                        kb = dst_walk(rows, n, rows[b], b, finite, width)
                        if ka < 0 or kb < 0:
                            bad += 1
                        else:
                            hist[ka * (n + 1) + kb] += 1
    return hist, bad


@nb.njit(nogil=True, cache=True)
def dst_walk_words(keys, t, n, x, probe, finite):
    """Multi-word variant of :func:`dst_walk` for simulated keys.

    ``keys[t, i, w]`` holds bits ``64*w .. 64*w+63`` of key ``i`` in trial
    ``t``; ``x`` is the probe's word array.
    """
    nwords = keys.shape[2]
    k = 0
    p = 0
    for i in range(n):
        agree = True
        full = p >> 6
        for w in range(full):
            if keys[t, i, w] != x[w]:
                agree = False
                break
        if agree and (p & 63) and full < nwords:
            m = (np.uint64(1) << np.uint64(p & 63)) - np.uint64(1)
            if (keys[t, i, full] ^ x[full]) & m:
                agree = False
        if agree:
            k += 1
            if finite:
                same = True
                for w in range(nwords):
                    if keys[t, i, w] != x[w]:
                        same = False
                        break
                if same:
                    return k
            elif i == probe:
                return k
            p += 1
    return k


@nb.njit(nogil=True, cache=True)
def bst_costs(perms, probes, mode):
    """Per-trial cost of the recursive BST search.

    ``perms[t]`` is the insertion order of the keys 1, 3, ..., 2n-1 and
    ``probes[t]`` the searched value.  In path-length mode the probe is
    ignored and every key is searched.
    """
    trials, n = perms.shape
    out = np.zeros(trials, np.int64)
    for t in range(trials):
        if mode == PATH_LENGTH:
            total = 0
            for j in range(n):
                total += _bst_search(perms, t, n, 2 * j + 1) - 1
            out[t] = total
        else:
            out[t] = _bst_search(perms, t, n, probes[t])
    return out


@nb.njit(nogil=True, cache=True)
def _bst_search(perms, t, n, x):
    # keys strictly between lo and hi are the ones left after filtering
    lo = -1
    hi = 2 * n + 1
    k = 0
    for i in range(n):
        u = perms[t, i]
        if lo < u < hi:
            k += 1
            if u == x:
                break
            if x < u:
                hi = u
            else:
                lo = u
    return k


@nb.njit(nogil=True, cache=True)
def dst_costs(keys, probes, probe_index, n, mode, finite):
    """Per-trial DST costs for simulated key arrays.

    ``keys`` has shape ``(trials, n, words)``; ``probes`` ``(trials, words)``.
    """
    trials = keys.shape[0]
    out = np.zeros(trials, np.int64)
    for t in range(trials):
        if mode == PATH_LENGTH:
            total = 0
            for j in range(n):
                total += dst_walk_words(keys, t, n, keys[t, j], j, finite) - 1
            out[t] = total
        else:
            out[t] = dst_walk_words(keys, t, n, probes[t], probe_index[t], finite)
    return out


@nb.njit(nogil=True, cache=True)
def dst_pair_costs(keys, first, second, n):
    """Successful costs of two distinct keys of the same infinite-key tree."""
    trials = keys.shape[0]
    out = np.zeros((trials, 2), np.int64)
    for t in range(trials):
        out[t, 0] = dst_walk_words(keys, t, n, keys[t, first[t]], first[t], False)
        out[t, 1] = dst_walk_words(keys, t, n, keys[t, second[t]], second[t], False)
    return out
