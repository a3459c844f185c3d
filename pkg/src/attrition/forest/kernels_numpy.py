"""Pure-numpy tree kernels, the fallback when numba is unavailable.

The grow loop here and the one in kernels_numba must stay expression-for-
expression identical: same traversal order, same random draws, same
floating-point operation order, same strict-inequality tie breaks. Any
divergence breaks the byte-identical-artifacts guarantee.
"""

from __future__ import annotations

import numpy as np

from .rng import sm64_next

BACKEND_NAME = "numpy"


def scan_feature(values: np.ndarray, labels: np.ndarray, n_yes: int,
                 parent_gini: float, min_leaf: int) -> tuple[float, float]:
    """Best (decrease, threshold) for one feature; decrease 0.0 means none.

    Candidate thresholds are midpoints between consecutive distinct sorted
    values. Ties on decrease keep the lowest threshold.
    """
    n = values.shape[0]
    order = np.argsort(values)
    sv = values[order]
    sy = np.cumsum(labels[order])

    boundary = sv[:-1] < sv[1:]
    if not boundary.any():
        return 0.0, 0.0

    n_left = np.arange(1, n, dtype=np.int64)
    n_right = n - n_left
    ok = boundary & (n_left >= min_leaf) & (n_right >= min_leaf)
    if not ok.any():
        return 0.0, 0.0

    yes_left = sy[:-1]
    yes_right = n_yes - yes_left
    p_l = yes_left / n_left
    q_l = (n_left - yes_left) / n_left
    g_l = 1.0 - p_l * p_l - q_l * q_l
    p_r = yes_right / n_right
    q_r = (n_right - yes_right) / n_right
    g_r = 1.0 - p_r * p_r - q_r * q_r
    weighted = (n_left * g_l + n_right * g_r) / n
    decrease = parent_gini - weighted

    masked = np.where(ok, decrease, -np.inf)
    at = int(np.argmax(masked))
    best = float(masked[at])
    if best <= 0.0:
        return 0.0, 0.0
    thr = (sv[at] + sv[at + 1]) * 0.5
    return best, float(thr)


def grow(X: np.ndarray, y: np.ndarray, boot_idx: np.ndarray,
         max_depth: int, min_leaf: int, k_features: int, state: int):
    """Grow one tree; returns flat node arrays plus the node count.

    Nodes are numbered in creation order from a preorder walk (left child
    visited before right). feature == -1 marks a leaf. prob holds the
    Yes-fraction at every node, split nodes included, because path
    attribution reads probabilities along internal nodes too.
    """
    state = int(state)  # python-int arithmetic; the caller may pass uint64
    n = boot_idx.shape[0]
    m = X.shape[1]
    cap = 2 * n + 2

    feature = np.full(cap, -1, dtype=np.int32)
    threshold = np.zeros(cap, dtype=np.float64)
    left = np.full(cap, -1, dtype=np.int32)
    right = np.full(cap, -1, dtype=np.int32)
    prob = np.zeros(cap, dtype=np.float64)
    count = np.zeros(cap, dtype=np.int64)

    samples = boot_idx.astype(np.int64).copy()
    perm = np.empty(m, dtype=np.int64)

    stack_node = np.empty(cap, dtype=np.int64)
    stack_lo = np.empty(cap, dtype=np.int64)
    stack_hi = np.empty(cap, dtype=np.int64)
    stack_depth = np.empty(cap, dtype=np.int64)
    sp = 0
    stack_node[sp], stack_lo[sp], stack_hi[sp], stack_depth[sp] = 0, 0, n, 0
    sp += 1
    n_nodes = 1

    while sp > 0:
        sp -= 1
        nid = stack_node[sp]
        lo = stack_lo[sp]
        hi = stack_hi[sp]
        depth = stack_depth[sp]

        seg = samples[lo:hi]
        nn = hi - lo
        n_yes = int(y[seg].sum())
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
            cand = np.arange(m, dtype=np.int64)
        else:
            # Partial Fisher-Yates over a fresh identity permutation; the
            # chosen subset is sorted so features are scanned ascending.
            perm[:] = np.arange(m)
            for j in range(k_features):
                state, z = sm64_next(state)
                r = j + z % (m - j)
                perm[j], perm[r] = perm[r], perm[j]
            cand = np.sort(perm[:k_features])

        best_dec = 0.0
        best_f = -1
        best_thr = 0.0
        for f in cand:
            vals = X[seg, f]
            dec, thr = scan_feature(vals, y[seg], n_yes, parent_gini, min_leaf)
            if dec > best_dec:
                best_dec = dec
                best_f = int(f)
                best_thr = thr

        if best_f < 0:
            continue

        goes_left = X[seg, best_f] <= best_thr
        n_left = int(goes_left.sum())
        # Stable partition: both halves keep their relative order.
        samples[lo:hi] = np.concatenate([seg[goes_left], seg[~goes_left]])

        lid = n_nodes
        rid = n_nodes + 1
        n_nodes += 2
        feature[nid] = best_f
        threshold[nid] = best_thr
        left[nid] = lid
        right[nid] = rid

        stack_node[sp], stack_lo[sp], stack_hi[sp], stack_depth[sp] = \
            rid, lo + n_left, hi, depth + 1
        sp += 1
        stack_node[sp], stack_lo[sp], stack_hi[sp], stack_depth[sp] = \
            lid, lo, lo + n_left, depth + 1
        sp += 1

    return (feature[:n_nodes].copy(), threshold[:n_nodes].copy(),
            left[:n_nodes].copy(), right[:n_nodes].copy(),
            prob[:n_nodes].copy(), count[:n_nodes].copy(), n_nodes)


def predict(feature: np.ndarray, threshold: np.ndarray, left: np.ndarray,
            right: np.ndarray, prob: np.ndarray, X: np.ndarray) -> np.ndarray:
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


def path_deltas(feature: np.ndarray, threshold: np.ndarray, left: np.ndarray,
                right: np.ndarray, prob: np.ndarray,
                x: np.ndarray) -> tuple[float, np.ndarray]:
    """Walk one sample down the tree, crediting each probability change
    to the feature tested at that node. bias is the root probability, so
    bias + sum(deltas) equals the leaf probability exactly.
    """
    m = x.shape[0]
    deltas = np.zeros(m, dtype=np.float64)
    node = 0
    bias = float(prob[0])
    while feature[node] >= 0:
        f = feature[node]
        if x[f] <= threshold[node]:
            nxt = left[node]
        else:
            nxt = right[node]
        deltas[f] += prob[nxt] - prob[node]
        node = nxt
    return bias, deltas
