"""Compiled evaluation of the truncated tree for formulas with n <= 63.

Same recursion, ordering, child construction and arithmetic order as
``comptree.TreeEvaluator.truncated``; clauses are uint64 bitmasks.  The memo
is keyed by a 128-bit hash of (component clauses, query variable) plus the
remaining depth, so entries cost a few dozen bytes instead of a Python tuple
per clause.  Collisions are possible in principle; at 10^7 entries the
chance is about 10^-25.
"""
from __future__ import annotations

import numpy as np
from numba import njit, types
from numba.typed import Dict

KEY = types.UniTuple(types.int64, 3)
_ONE = np.uint64(1)
_ZERO = np.uint64(0)
EXACT_L = -(1 << 62)  # memo slot for values that never hit the depth cut
NO_LIMIT = 1 << 62    # depth that is never exhausted


@njit(cache=True)
def _pop(v):
    v = v - ((v >> np.uint64(1)) & np.uint64(0x5555555555555555))
    v = (v & np.uint64(0x3333333333333333)) + ((v >> np.uint64(2)) & np.uint64(0x3333333333333333))
    v = (v + (v >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
    return np.int64((v * np.uint64(0x0101010101010101)) >> np.uint64(56))


@njit(cache=True)
def _mix(h):
    h = (h ^ (h >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    h = (h ^ (h >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return h ^ (h >> np.uint64(31))


@njit(cache=True)
def _hash(masks, x):
    h1 = np.uint64(0x9E3779B97F4A7C15) ^ np.uint64(x)
    h2 = np.uint64(0xC2B2AE3D27D4EB4F) + np.uint64(x)
    for i in range(masks.shape[0]):
        h1 = _mix(h1 ^ masks[i])
        h2 = _mix(h2 + masks[i] * np.uint64(0x165667B19E3779F9))
    return np.int64(h1 >> np.uint64(1)), np.int64(h2 >> np.uint64(1))


@njit(cache=True)
def _component(masks, x):
    m = masks.shape[0]
    taken = np.zeros(m, dtype=np.bool_)
    reach = _ONE << np.uint64(x)
    grew = True
    cnt = 0
    while grew:
        grew = False
        for i in range(m):
            if not taken[i] and (masks[i] & reach) != _ZERO:
                taken[i] = True
                reach |= masks[i]
                grew = True
                cnt += 1
    out = np.empty(cnt, dtype=np.uint64)
    k = 0
    for i in range(m):
        if taken[i]:
            out[k] = masks[i]
            k += 1
    return out


@njit(cache=True)
def _order(masks, x):
    bit = _ONE << np.uint64(x)
    occ = np.empty(masks.shape[0], dtype=np.int64)
    keys = np.empty(masks.shape[0], dtype=np.int64)
    d = 0
    for i in range(masks.shape[0]):
        if (masks[i] & bit) != _ZERO:
            p = _pop(masks[i])
            occ[d] = i
            # (arity == 2, arity, index) packed into one sortable integer
            keys[d] = ((1 if p == 2 else 0) << 40) | (p << 20) | i
            d += 1
    for a in range(1, d):  # insertion sort, d <= max degree
        kk, oo = keys[a], occ[a]
        b = a - 1
        while b >= 0 and keys[b] > kk:
            keys[b + 1] = keys[b]
            occ[b + 1] = occ[b]
            b -= 1
        keys[b + 1] = kk
        occ[b + 1] = oo
    return occ[:d]


@njit(cache=True)
def _child(masks, x, occ, i, j):
    bit = _ONE << np.uint64(x)
    rest = masks[occ[i]] & ~bit
    pin0 = bit
    xij = -1
    seen = 0
    while rest != _ZERO:
        low = rest & (~rest + _ONE)
        if seen == j:
            xij = _pop(low - _ONE)
            break
        pin0 |= low
        rest ^= low
        seen += 1
    m = masks.shape[0]
    dropped = np.zeros(m, dtype=np.bool_)
    for t in range(i + 1):
        dropped[occ[t]] = True
    out = np.empty(m, dtype=np.uint64)
    changed = np.zeros(m, dtype=np.bool_)
    k = 0
    for idx in range(m):
        if dropped[idx]:
            continue
        nm = masks[idx] & ~pin0
        if nm != masks[idx]:
            changed[k] = True
        out[k] = nm
        k += 1
    alive = np.ones(k, dtype=np.bool_)
    for ci in range(k):
        if not changed[ci] or not alive[ci]:
            continue
        s = out[ci]
        for t in range(k):
            if t == ci or not alive[t] or (out[t] & s) != s:
                continue
            if out[t] != s or t > ci:
                alive[t] = False
            else:
                alive[ci] = False
                break
    cnt = 0
    for t in range(k):
        if alive[t] and (out[t] & (out[t] - _ONE)) != _ZERO:
            cnt += 1
    res = np.empty(cnt, dtype=np.uint64)
    c = 0
    for t in range(k):
        if alive[t] and (out[t] & (out[t] - _ONE)) != _ZERO:
            res[c] = out[t]
            c += 1
    return res, xij


@njit(cache=True)
def _cost(w):
    l = 0
    p = 1
    while p < w + 1:
        p *= 6
        l += 1
    return l


@njit(cache=True)
def truncated(masks, x, L, memo, stats):
    """Returns (value, exact).  ``stats[0]`` counts expansions, ``stats[1]`` is the budget."""
    masks = _component(masks, x)
    if masks.shape[0] == 0:
        return 1.0, True
    if L <= 0:
        return 1.0, False
    h1, h2 = _hash(masks, x)
    ke = (h1, h2, EXACT_L)
    if ke in memo:
        return memo[ke], True
    kt = (h1, h2, L)
    if kt in memo:
        return memo[kt], False
    stats[0] += 1
    if stats[1] >= 0 and stats[0] > stats[1]:
        return -1.0, False
    occ = _order(masks, x)
    value = 1.0
    all_exact = True
    for i in range(occ.shape[0]):
        w = _pop(masks[occ[i]]) - 1
        sub = L - _cost(w) if L < NO_LIMIT else L
        prod = 1.0
        for j in range(w):
            cm, xij = _child(masks, x, occ, i, j)
            r, ex = truncated(cm, xij, sub, memo, stats)
            if r < 0.0:
                return -1.0, False
            all_exact = all_exact and ex
            prod *= r / (1.0 + r)
        value *= 1.0 - prod
    if all_exact:
        memo[ke] = value
    else:
        memo[kt] = value
    return value, all_exact


def new_memo():
    return Dict.empty(key_type=KEY, value_type=types.float64)
