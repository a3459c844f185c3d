"""Numba-compiled tree kernels, the default training backend.

Mirror of kernels_numpy: same traversal order, same splitmix64 draws,
same floating-point expression order, same strict-inequality tie breaks.
Keep both files in lockstep or byte-identical artifacts break. Import of
this module requires numba; backend.py guards that.
"""

from __future__ import annotations

import numpy as np
from numba import njit

BACKEND_NAME = "numba"

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX_1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX_2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)


@njit(cache=True, nogil=True)
def _sm64_next(state):
    state = state + _GAMMA
    z = state
    z = (z ^ (z >> _S30)) * _MIX_1
    z = (z ^ (z >> _S27)) * _MIX_2
    z = z ^ (z >> _S31)
    return state, z


@njit(cache=True, nogil=True)
def _scan_feature(sv, cum, nn, n_yes, parent_gini, min_leaf):
    best = 0.0
    thr = 0.0
    for i in range(nn - 1):
        if sv[i] < sv[i + 1]:
            nl = i + 1
            nr = nn - nl
            if nl >= min_leaf and nr >= min_leaf:
                yl = cum[i]
                yr = n_yes - yl
                p_l = yl / nl
                q_l = (nl - yl) / nl
                g_l = 1.0 - p_l * p_l - q_l * q_l
                p_r = yr / nr
                q_r = (nr - yr) / nr
                g_r = 1.0 - p_r * p_r - q_r * q_r
                weighted = (nl * g_l + nr * g_r) / nn
                dec = parent_gini - weighted
                if dec > best:
                    best = dec
                    thr = (sv[i] + sv[i + 1]) * 0.5
    return best, thr


@njit(cache=True, nogil=True)
def grow(X, y, boot_idx, max_depth, min_leaf, k_features, state):
    n = boot_idx.shape[0]
    m = X.shape[1]
    cap = 2 * n + 2

    feature = np.full(cap, -1, dtype=np.int32)
    threshold = np.zeros(cap, dtype=np.float64)
    left = np.full(cap, -1, dtype=np.int32)
    right = np.full(cap, -1, dtype=np.int32)
    prob = np.zeros(cap, dtype=np.float64)
    count = np.zeros(cap, dtype=np.int64)

    samples = boot_idx.astype(np.int64)
    scratch = np.empty(n, dtype=np.int64)
    perm = np.empty(m, dtype=np.int64)

    stack_node = np.empty(cap, dtype=np.int64)
    stack_lo = np.empty(cap, dtype=np.int64)
    stack_hi = np.empty(cap, dtype=np.int64)
    stack_depth = np.empty(cap, dtype=np.int64)
    sp = 0
    stack_node[sp] = 0
    stack_lo[sp] = 0
    stack_hi[sp] = n
    stack_depth[sp] = 0
    sp += 1
    n_nodes = 1

    while sp > 0:
        sp -= 1
        nid = stack_node[sp]
        lo = stack_lo[sp]
        hi = stack_hi[sp]
        depth = stack_depth[sp]

        nn = hi - lo
        n_yes = 0
        for i in range(lo, hi):
            n_yes += y[samples[i]]
        p = n_yes / nn
        prob[nid] = p
        count[nid] = nn

        if n_yes == 0 or n_yes == nn or nn < 2 * min_leaf or nn < 2:
            continue
        if max_depth >= 0 and depth >= max_depth:
            continue

        q = (nn - n_yes) / nn
        parent_gini = 1.0 - p * p - q * q

        if k_features >= m:
            cand = np.arange(m)
        else:
            for j in range(m):
                perm[j] = j
            for j in range(k_features):
                state, z = _sm64_next(state)
                r = j + np.int64(z % np.uint64(m - j))
                tmp = perm[j]
                perm[j] = perm[r]
                perm[r] = tmp
            cand = np.sort(perm[:k_features])

        best_dec = 0.0
        best_f = -1
        best_thr = 0.0
        vals = np.empty(nn, dtype=np.float64)
        labels = np.empty(nn, dtype=np.int64)
        for ci in range(cand.shape[0]):
            f = cand[ci]
            for i in range(nn):
                row = samples[lo + i]
                vals[i] = X[row, f]
                labels[i] = y[row]
            order = np.argsort(vals)
            sv = vals[order]
            cum = np.empty(nn, dtype=np.int64)
            acc = 0
            for i in range(nn):
                acc += labels[order[i]]
                cum[i] = acc
            dec, thr = _scan_feature(sv, cum, nn, n_yes, parent_gini, min_leaf)
            if dec > best_dec:
                best_dec = dec
                best_f = f
                best_thr = thr

        if best_f < 0:
            continue

        # Stable partition: both halves keep their relative order.
        n_left = 0
        for i in range(lo, hi):
            if X[samples[i], best_f] <= best_thr:
                scratch[n_left] = samples[i]
                n_left += 1
        n_right = 0
        for i in range(lo, hi):
            if not (X[samples[i], best_f] <= best_thr):
                scratch[n_left + n_right] = samples[i]
                n_right += 1
        for i in range(nn):
            samples[lo + i] = scratch[i]

        lid = n_nodes
        rid = n_nodes + 1
        n_nodes += 2
        feature[nid] = best_f
        threshold[nid] = best_thr
        left[nid] = lid
        right[nid] = rid

        stack_node[sp] = rid
        stack_lo[sp] = lo + n_left
        stack_hi[sp] = hi
        stack_depth[sp] = depth + 1
        sp += 1
        stack_node[sp] = lid
        stack_lo[sp] = lo
        stack_hi[sp] = lo + n_left
        stack_depth[sp] = depth + 1
        sp += 1

    return (feature[:n_nodes].copy(), threshold[:n_nodes].copy(),
            left[:n_nodes].copy(), right[:n_nodes].copy(),
            prob[:n_nodes].copy(), count[:n_nodes].copy(), n_nodes)


@njit(cache=True, nogil=True)
def predict(feature, threshold, left, right, prob, X):
    out = np.empty(X.shape[0], dtype=np.float64)
    for i in range(X.shape[0]):
        node = 0
        while feature[node] >= 0:
            if X[i, feature[node]] <= threshold[node]:
                node = left[node]
            else:
                node = right[node]
        out[i] = prob[node]
    return out


@njit(cache=True, nogil=True)
def path_deltas(feature, threshold, left, right, prob, x):
    m = x.shape[0]
    deltas = np.zeros(m, dtype=np.float64)
    node = 0
    bias = prob[0]
    while feature[node] >= 0:
        f = feature[node]
        if x[f] <= threshold[node]:
            nxt = left[node]
        else:
            nxt = right[node]
        deltas[f] += prob[nxt] - prob[node]
        node = nxt
    return bias, deltas
