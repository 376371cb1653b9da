"""Compiled tree growing and traversal.

Trees are stored as flat arrays in pre-order. A node with ``feature == -1``
is a leaf; internal nodes send ``x[feature] < threshold`` left. Leaf class
distributions live in a per-tree table whose first ``n_classes`` rows are the
one-hot vectors, so pure leaves share them; ``value_index`` maps a leaf to its
table row and is -1 on internal nodes.
Features are passed transposed (``XT[f, row]``) so column gathers are contiguous.
"""

import numpy as np
from numba import njit

GINI = 0
RANDOM = 1


@njit(cache=True, nogil=True)
def _gini_best_split(XT, RT, uniq, uoff, y, idx, start, end, n_classes, max_features,
                     vals, perm, left_counts, right_counts, total_counts, hist):
    """Best Gini split over ``max_features`` non-constant features.

    Features are drawn without replacement; constant ones do not count
    towards ``max_features`` so a split is found whenever one exists.
    Returns (feature, threshold) or (-1, 0.0).

    ``RT[f, row]`` is the dense rank of ``XT[f, row]`` among the distinct
    values ``uniq[uoff[f]:uoff[f + 1]]``. When the node's rank span is small
    the sweep runs over a class histogram per rank instead of a sort.
    """
    m = end - start
    d = XT.shape[0]
    for j in range(d):
        perm[j] = j
    best_score = -1.0
    best_f = -1
    best_thr = 0.0
    evaluated = 0
    drawn = 0
    sq_total = 0.0
    for c in range(n_classes):
        sq_total += total_counts[c] * total_counts[c]
    while drawn < d and evaluated < max_features:
        k = drawn + np.random.randint(d - drawn)
        f = perm[k]
        perm[k] = perm[drawn]
        perm[drawn] = f
        drawn += 1

        ranks = RT[f]
        rmin = ranks[idx[start]]
        rmax = rmin
        for i in range(start + 1, end):
            r = ranks[idx[i]]
            if r < rmin:
                rmin = r
            elif r > rmax:
                rmax = r
        if rmax == rmin:
            continue
        evaluated += 1
        u = uniq[uoff[f]:uoff[f + 1]]
        for c in range(n_classes):
            left_counts[c] = 0
            right_counts[c] = total_counts[c]
        sq_left = 0.0
        sq_right = sq_total
        span = rmax - rmin + 1

        if span <= m:
            hist[:span] = 0
            for i in range(start, end):
                row = idx[i]
                hist[ranks[row] - rmin, y[row]] += 1
            nl = 0
            prev = -1
            for r in range(span):
                moved = 0
                for c in range(n_classes):
                    moved += hist[r, c]
                if moved == 0:
                    continue
                if prev >= 0:
                    score = sq_left / nl + sq_right / (m - nl)
                    if score >= best_score:
                        a = u[prev + rmin]
                        b = u[r + rmin]
                        thr = a + (b - a) / 2.0
                        if thr <= a or thr > b:
                            thr = b
                        if score > best_score or f < best_f or (f == best_f and thr < best_thr):
                            best_score = score
                            best_f = f
                            best_thr = thr
                for c in range(n_classes):
                    kc = hist[r, c]
                    if kc:
                        lc = left_counts[c]
                        rc = right_counts[c]
                        sq_left += 2 * lc * kc + kc * kc
                        sq_right -= 2 * rc * kc - kc * kc
                        left_counts[c] = lc + kc
                        right_counts[c] = rc - kc
                nl += moved
                prev = r
            continue

        row_x = XT[f]
        for i in range(m):
            vals[i] = row_x[idx[start + i]]
        srt = np.argsort(vals[:m], kind="quicksort")
        for i in range(m - 1):
            c = y[idx[start + srt[i]]]
            lc = left_counts[c]
            rc = right_counts[c]
            sq_left += 2 * lc + 1
            sq_right -= 2 * rc - 1
            left_counts[c] = lc + 1
            right_counts[c] = rc - 1
            a = vals[srt[i]]
            b = vals[srt[i + 1]]
            if a == b:
                continue
            nl = i + 1
            score = sq_left / nl + sq_right / (m - nl)
            if score < best_score:
                continue
            thr = a + (b - a) / 2.0
            if thr <= a or thr > b:
                thr = b
            if score > best_score or f < best_f or (f == best_f and thr < best_thr):
                best_score = score
                best_f = f
                best_thr = thr
    return best_f, best_thr


@njit(cache=True, nogil=True)
def _random_split(XT, idx, start, end, perm):
    """Uniform random non-constant feature, uniform threshold in (min, max)."""
    m = end - start
    d = XT.shape[0]
    for j in range(d):
        perm[j] = j
    drawn = 0
    while drawn < d:
        k = drawn + np.random.randint(d - drawn)
        f = perm[k]
        perm[k] = perm[drawn]
        perm[drawn] = f
        drawn += 1
        row = XT[f]
        mn = row[idx[start]]
        mx = mn
        for i in range(1, m):
            v = row[idx[start + i]]
            if v < mn:
                mn = v
            elif v > mx:
                mx = v
        if mx <= mn:
            continue
        thr = mn
        while thr <= mn:
            thr = mn + np.random.random() * (mx - mn)
        return f, thr
    return -1, 0.0


@njit(cache=True, nogil=True)
def grow_tree(XT, RT, uniq, uoff, y, rows, n_classes, kind, max_features, max_depth, seed):
    """Grow one unpruned tree on ``rows`` (duplicates allowed).

    ``RT``/``uniq``/``uoff`` are the column rank encoding used by the Gini
    search (ignored for completely-random trees). ``max_depth < 0`` means
    unlimited. Returns pre-order arrays
    (feature, threshold, left, right, value_index, distributions).
    """
    np.random.seed(seed)
    d = XT.shape[0]
    n = rows.shape[0]
    idx = rows.copy()
    cap = 2 * n + 1
    feature = np.full(cap, -1, dtype=np.int32)
    threshold = np.zeros(cap)
    left = np.full(cap, -1, dtype=np.int32)
    right = np.full(cap, -1, dtype=np.int32)
    value_index = np.full(cap, -1, dtype=np.int32)
    dist = np.zeros((n + n_classes, n_classes))
    for c in range(n_classes):
        dist[c, c] = 1.0
    n_dist = n_classes

    vals = np.empty(n)
    perm = np.empty(d, dtype=np.int64)
    left_counts = np.zeros(n_classes, dtype=np.int64)
    right_counts = np.zeros(n_classes, dtype=np.int64)
    counts = np.zeros(n_classes, dtype=np.int64)
    hist = np.zeros((n if kind == GINI else 1, n_classes), dtype=np.int64)

    # stack of (start, end, depth, parent, is_left)
    st_start = np.empty(cap, dtype=np.int64)
    st_end = np.empty(cap, dtype=np.int64)
    st_depth = np.empty(cap, dtype=np.int64)
    st_parent = np.empty(cap, dtype=np.int64)
    st_isleft = np.empty(cap, dtype=np.bool_)
    top = 0
    st_start[0] = 0
    st_end[0] = n
    st_depth[0] = 0
    st_parent[0] = -1
    st_isleft[0] = False
    top = 1
    n_nodes = 0

    while top > 0:
        top -= 1
        start = st_start[top]
        end = st_end[top]
        depth = st_depth[top]
        parent = st_parent[top]
        node = n_nodes
        n_nodes += 1
        if parent >= 0:
            if st_isleft[top]:
                left[parent] = node
            else:
                right[parent] = node

        m = end - start
        for c in range(n_classes):
            counts[c] = 0
        for i in range(start, end):
            counts[y[idx[i]]] += 1
        nonzero = 0
        only = 0
        for c in range(n_classes):
            if counts[c] > 0:
                nonzero += 1
                only = c

        leaf = nonzero <= 1 or (max_depth >= 0 and depth >= max_depth)
        f = -1
        thr = 0.0
        if not leaf:
            if kind == GINI:
                f, thr = _gini_best_split(XT, RT, uniq, uoff, y, idx, start, end, n_classes,
                                          max_features, vals, perm, left_counts,
                                          right_counts, counts, hist)
            else:
                f, thr = _random_split(XT, idx, start, end, perm)
            leaf = f < 0
        if leaf:
            if nonzero == 1:
                value_index[node] = only
            else:
                for c in range(n_classes):
                    dist[n_dist, c] = counts[c] / m
                value_index[node] = n_dist
                n_dist += 1
            continue

        # partition idx[start:end] so that rows with x < thr come first
        row = XT[f]
        i = start
        j = end - 1
        while i <= j:
            if row[idx[i]] < thr:
                i += 1
            else:
                tmp = idx[i]
                idx[i] = idx[j]
                idx[j] = tmp
                j -= 1
        mid = i
        feature[node] = f
        threshold[node] = thr

        # push right first so the left subtree is numbered next (pre-order)
        st_start[top] = mid
        st_end[top] = end
        st_depth[top] = depth + 1
        st_parent[top] = node
        st_isleft[top] = False
        top += 1
        st_start[top] = start
        st_end[top] = mid
        st_depth[top] = depth + 1
        st_parent[top] = node
        st_isleft[top] = True
        top += 1

    return (feature[:n_nodes].copy(), threshold[:n_nodes].copy(),
            left[:n_nodes].copy(), right[:n_nodes].copy(),
            value_index[:n_nodes].copy(), dist[:n_dist].copy())


@njit(cache=True, nogil=True)
def apply_packed(X, feature, threshold, left, right, offsets, out_leaf):
    """Leaf index (global into the packed arrays) of every row for every tree."""
    n = X.shape[0]
    n_trees = offsets.shape[0] - 1
    for t in range(n_trees):
        base = offsets[t]
        for i in range(n):
            node = base
            while feature[node] >= 0:
                if X[i, feature[node]] < threshold[node]:
                    node = base + left[node]
                else:
                    node = base + right[node]
            out_leaf[i, t] = node


@njit(cache=True, nogil=True)
def predict_packed(X, feature, threshold, left, right, value_index, offsets,
                   dists, dist_offsets, n_classes):
    """Mean leaf distribution over all packed trees for every row of ``X``."""
    n = X.shape[0]
    n_trees = offsets.shape[0] - 1
    out = np.zeros((n, n_classes))
    for t in range(n_trees):
        base = offsets[t]
        dbase = dist_offsets[t]
        for i in range(n):
            node = base
            while feature[node] >= 0:
                if X[i, feature[node]] < threshold[node]:
                    node = base + left[node]
                else:
                    node = base + right[node]
            row = dbase + value_index[node]
            for c in range(n_classes):
                out[i, c] += dists[row, c]
    for i in range(n):
        for c in range(n_classes):
            out[i, c] /= n_trees
    return out
