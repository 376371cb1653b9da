"""Brute-force reference implementations, written for clarity not speed."""

import numpy as np


def sort_records(conf, correct, ids):
    """Descending confidence, ties by ascending id, via a plain Python sort."""
    rows = sorted(zip(conf, correct, ids), key=lambda r: (-r[0], r[2]))
    return ([r[0] for r in rows], [bool(r[1]) for r in rows], [r[2] for r in rows])


def prefix_gate(conf_sorted, correct_sorted, ta):
    best = None
    for k in range(1, len(conf_sorted) + 1):
        acc = sum(correct_sorted[:k]) / k
        if acc >= ta:
            p = conf_sorted[k - 1]
            best = p if best is None else min(best, p)
    return best


def bins(n, s):
    out, start = [], 0
    while start < n:
        out.append((start, min(start + s, n)))
        start += s
    return out


def binning_gate(conf_sorted, correct_sorted, s, ta):
    gate = None
    for a, b in bins(len(conf_sorted), s):
        acc = sum(correct_sorted[a:b]) / (b - a)
        if acc < ta:
            return gate
        gate = conf_sorted[b - 1]
    return gate


def screened_ids(conf, ids, gate):
    if gate is None:
        return set()
    return {i for c, i in zip(conf, ids) if c >= gate}


def gini(counts):
    total = sum(counts)
    return 1.0 - sum((c / total) ** 2 for c in counts)


def average_ranks(row):
    """1 = largest value, ties share the mean of the positions they occupy."""
    ranks = []
    for v in row:
        greater = sum(1 for u in row if u > v)
        equal = sum(1 for u in row if u == v)
        ranks.append(greater + (equal + 1) / 2.0)
    return ranks


def scanned_width(d, windows, C, stride=1):
    total = 0
    for w in windows:
        total += len(range(0, d - w + 1, stride)) * 2 * C
    return total


def tree_leaf(tree, x):
    node = 0
    while tree.left[node] >= 0:
        node = tree.left[node] if x[tree.feature[node]] < tree.threshold[node] \
            else tree.right[node]
    return node
