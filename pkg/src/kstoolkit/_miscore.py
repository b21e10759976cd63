"""Compiled core of the maximum-independent-set search.

Same search discipline as the pure-Python path in graphs.independence_number
(greedy clique cover bound, branching in reverse cover order) plus the
standard exactness-preserving reductions that make sparse instances
tractable: vertices of candidate degree <= 1 are taken outright, a degree-2
vertex with adjacent neighbors is taken outright, and a degree-2 vertex with
non-adjacent neighbors is folded (the triple contracts into one merged
vertex, adding one to the final count).  Folds mutate a per-depth copy of the
adjacency, and witnesses are rebuilt by unwinding the fold trail, then
re-validated against the original graph by the caller.  Deterministic
throughout; numba is an optional dependency loaded lazily.
"""

from __future__ import annotations

import numpy as np
from numba import int64, njit, uint64

_M1 = uint64(0x5555555555555555)
_M2 = uint64(0x3333333333333333)
_M4 = uint64(0x0F0F0F0F0F0F0F0F)
_H01 = uint64(0x0101010101010101)


@njit(cache=True, inline="always")
def _popcnt(x):
    x = x - ((x >> uint64(1)) & _M1)
    x = (x & _M2) + ((x >> uint64(2)) & _M2)
    x = (x + (x >> uint64(4))) & _M4
    return int64((x * _H01) >> uint64(56))


@njit(cache=True, inline="always")
def _ctz(x):
    return _popcnt((x & (~x + uint64(1))) - uint64(1))


@njit(cache=True)
def _expand_folds(cur, fold_rec, n_folds, n_words):
    """Original-graph vertex set from slot set ``cur`` via the fold trail."""
    out = cur.copy()
    for i in range(n_folds - 1, -1, -1):
        slot = fold_rec[i, 0]
        v = fold_rec[i, 1]
        u = fold_rec[i, 2]
        w = fold_rec[i, 3]
        sbit = uint64(1) << uint64(slot & 63)
        if out[slot >> 6] & sbit:
            out[slot >> 6] &= ~sbit
            out[u >> 6] |= uint64(1) << uint64(u & 63)
            out[w >> 6] |= uint64(1) << uint64(w & 63)
        else:
            out[v >> 6] |= uint64(1) << uint64(v & 63)
    return out


@njit(cache=True)
def _dfs(adj_stack, level, n_words, cand_in, cur, offset, fold_rec, n_folds, best_box, best_set):
    """Branch and bound below one node; returns nothing, updates best_box/best_set.

    ``adj_stack[level]`` is this node's adjacency view; a first fold copies it
    to ``level + 1`` before mutating, so siblings keep the parent's view.
    ``offset`` counts the folds on the current path (each is worth +1).
    """
    cand = cand_in.copy()
    adj = adj_stack[level]
    own_adj = False
    n = adj.shape[0]
    trail = np.empty(n, dtype=np.int64)
    taken = 0
    folds_here = 0

    # reduction loop: take degree <= 1, take triangle degree-2, fold path degree-2
    changed = True
    while changed:
        changed = False
        for wd in range(n_words):
            bits = cand[wd]
            while bits:
                lsb = bits & (~bits + uint64(1))
                bits ^= lsb
                if (cand[wd] & lsb) == uint64(0):
                    continue
                v = wd * 64 + _ctz(lsb)
                deg = 0
                for w2 in range(n_words):
                    deg += _popcnt(adj[v, w2] & cand[w2])
                if deg <= 1:
                    for w2 in range(n_words):
                        cand[w2] &= ~adj[v, w2]
                    cand[wd] &= ~lsb
                    cur[wd] |= lsb
                    trail[taken] = v
                    taken += 1
                    changed = True
                elif deg == 2:
                    u = -1
                    w = -1
                    for w2 in range(n_words):
                        rest = adj[v, w2] & cand[w2]
                        while rest:
                            l2 = rest & (~rest + uint64(1))
                            rest ^= l2
                            if u < 0:
                                u = w2 * 64 + _ctz(l2)
                            else:
                                w = w2 * 64 + _ctz(l2)
                    if adj[u, w >> 6] & (uint64(1) << uint64(w & 63)):
                        # neighbors adjacent: some maximum set contains v
                        cand[wd] &= ~lsb
                        cand[u >> 6] &= ~(uint64(1) << uint64(u & 63))
                        cand[w >> 6] &= ~(uint64(1) << uint64(w & 63))
                        cur[wd] |= lsb
                        trail[taken] = v
                        taken += 1
                        changed = True
                    else:
                        # fold: v's slot becomes the merged vertex
                        if not own_adj:
                            for r in range(n):
                                for w2 in range(n_words):
                                    adj_stack[level + 1, r, w2] = adj[r, w2]
                            adj = adj_stack[level + 1]
                            own_adj = True
                        ubit = uint64(1) << uint64(u & 63)
                        wbit = uint64(1) << uint64(w & 63)
                        cand[u >> 6] &= ~ubit
                        cand[w >> 6] &= ~wbit
                        for w2 in range(n_words):
                            merged = (adj[u, w2] | adj[w, w2]) & cand[w2]
                            adj[v, w2] = merged
                        adj[v, wd] &= ~lsb
                        # reflect the merged row in its neighbors' rows
                        for w2 in range(n_words):
                            rest = adj[v, w2]
                            while rest:
                                l2 = rest & (~rest + uint64(1))
                                rest ^= l2
                                x = w2 * 64 + _ctz(l2)
                                adj[x, wd] |= lsb
                                adj[x, u >> 6] &= ~ubit
                                adj[x, w >> 6] &= ~wbit
                        fold_rec[n_folds + folds_here, 0] = v
                        fold_rec[n_folds + folds_here, 1] = v
                        fold_rec[n_folds + folds_here, 2] = u
                        fold_rec[n_folds + folds_here, 3] = w
                        folds_here += 1
                        offset += 1
                        changed = True

    size = offset
    for w2 in range(n_words):
        size += _popcnt(cur[w2])

    empty = True
    for w2 in range(n_words):
        if cand[w2] != uint64(0):
            empty = False
            break
    if empty:
        if size > best_box[0]:
            best_box[0] = size
            expanded = _expand_folds(cur, fold_rec, n_folds + folds_here, n_words)
            for w2 in range(n_words):
                best_set[w2] = expanded[w2]
    else:
        # greedy clique cover order with running counts
        order_v = np.empty(n, dtype=np.int64)
        order_b = np.empty(n, dtype=np.int64)
        rest_set = cand.copy()
        avail = np.empty(n_words, dtype=np.uint64)
        count = 0
        total = 0
        while True:
            v = -1
            for w2 in range(n_words):
                if rest_set[w2] != uint64(0):
                    lsb = rest_set[w2] & (~rest_set[w2] + uint64(1))
                    v = w2 * 64 + _ctz(lsb)
                    rest_set[w2] ^= lsb
                    break
            if v < 0:
                break
            count += 1
            order_v[total] = v
            order_b[total] = count
            total += 1
            for w2 in range(n_words):
                avail[w2] = rest_set[w2] & adj[v, w2]
            while True:
                u = -1
                for w2 in range(n_words):
                    if avail[w2] != uint64(0):
                        lsb = avail[w2] & (~avail[w2] + uint64(1))
                        u = w2 * 64 + _ctz(lsb)
                        avail[w2] ^= lsb
                        rest_set[w2] ^= lsb
                        break
                if u < 0:
                    break
                order_v[total] = u
                order_b[total] = count
                total += 1
                for w2 in range(n_words):
                    avail[w2] &= adj[u, w2]

        next_level = level + 1 if own_adj else level
        child = np.empty(n_words, dtype=np.uint64)
        for i in range(total - 1, -1, -1):
            if size + order_b[i] <= best_box[0]:
                break
            v = order_v[i]
            vw = v >> 6
            bit = uint64(1) << uint64(v & 63)
            for w2 in range(n_words):
                child[w2] = cand[w2] & ~adj[v, w2]
            child[vw] &= ~bit
            cur[vw] |= bit
            _dfs(adj_stack, next_level, n_words, child, cur,
                 offset, fold_rec, n_folds + folds_here, best_box, best_set)
            cur[vw] &= ~bit
            cand[vw] &= ~bit

    for i in range(taken):
        v = trail[i]
        cur[v >> 6] &= ~(uint64(1) << uint64(v & 63))


def solve(adj_rows, n, seed_size, seed_vertices):
    """Exact MIS size and witness; seeded with a known independent set."""
    n_words = max(1, (n + 63) // 64)
    mask = (1 << 64) - 1
    # levels: every recursion step may add one adjacency copy (branch + fold)
    adj_stack = np.zeros((2 * n + 3, n, n_words), dtype=np.uint64)
    for v, row in enumerate(adj_rows):
        for w in range(n_words):
            adj_stack[0, v, w] = (row >> (64 * w)) & mask
    best_set = np.zeros(n_words, dtype=np.uint64)
    for v in seed_vertices:
        best_set[v >> 6] |= np.uint64(1) << np.uint64(v & 63)
    best_box = np.array([seed_size], dtype=np.int64)
    cand = np.empty(n_words, dtype=np.uint64)
    full = (1 << n) - 1
    for w in range(n_words):
        cand[w] = (full >> (64 * w)) & mask
    cur = np.zeros(n_words, dtype=np.uint64)
    fold_rec = np.zeros((2 * n + 3, 4), dtype=np.int64)
    _dfs(adj_stack, 0, n_words, cand, cur, 0, fold_rec, 0, best_box, best_set)
    witness = [
        w * 64 + b for w in range(n_words) for b in range(64) if (int(best_set[w]) >> b) & 1
    ]
    return int(best_box[0]), tuple(witness)
