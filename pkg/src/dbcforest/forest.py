"""CART trees, random forests and completely-random forests."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from . import _kernels

RANDOM = "random"
COMPLETELY_RANDOM = "completely_random"
KINDS = (RANDOM, COMPLETELY_RANDOM)


def gini_impurity(counts) -> float:
    """``1 - sum_c p_c**2`` for a vector of per-class counts."""
    counts = np.asarray(counts, dtype=np.float64)
    if counts.ndim != 1 or np.any(counts < 0):
        raise ValueError("counts must be a 1-D vector of non-negative numbers")
    total = counts.sum()
    if total <= 0:
        raise ValueError("gini impurity undefined for an empty node")
    p = counts / total
    return float(1.0 - np.dot(p, p))


@dataclass
class Tree:
    """One tree as pre-order node arrays.

    ``feature[i] == -1`` marks a leaf. For internal nodes, rows with
    ``x[feature] < threshold`` go to ``left[i]``, the rest to ``right[i]``.
    A leaf's class distribution is ``distributions[value_index[i]]``; the
    first ``class_count`` table rows are one-hot vectors shared by pure leaves.
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value_index: np.ndarray
    distributions: np.ndarray

    @property
    def node_count(self) -> int:
        return int(self.feature.shape[0])

    @property
    def class_count(self) -> int:
        return int(self.distributions.shape[1])

    @property
    def is_leaf(self) -> np.ndarray:
        return self.feature < 0

    def leaf_distribution(self, node: int) -> np.ndarray:
        if self.feature[node] >= 0:
            raise ValueError(f"node {node} is not a leaf")
        return self.distributions[self.value_index[node]]

    def depth(self) -> int:
        depth = np.zeros(self.node_count, dtype=np.int64)
        for i in range(self.node_count):
            if self.feature[i] >= 0:
                depth[self.left[i]] = depth[self.right[i]] = depth[i] + 1
        return int(depth.max())

    def apply(self, X) -> np.ndarray:
        """Leaf node index reached by each row."""
        X = _as_rows(X)
        leaves = np.empty((X.shape[0], 1), dtype=np.int64)
        _kernels.apply_packed(X, self.feature, self.threshold, self.left, self.right,
                              np.array([0, self.node_count], dtype=np.int64), leaves)
        return leaves[:, 0]

    def predict_proba(self, X) -> np.ndarray:
        return self.distributions[self.value_index[self.apply(X)]]


@dataclass
class Forest:
    trees: List[Tree]
    kind: str
    class_count: int
    feature_count: int
    _packed: Optional[tuple] = field(default=None, repr=False, compare=False)

    @property
    def tree_count(self) -> int:
        return len(self.trees)

    @property
    def node_count(self) -> int:
        return sum(t.node_count for t in self.trees)

    def _pack(self):
        if self._packed is None:
            def offsets(sizes):
                return np.concatenate([[0], np.cumsum(sizes)]).astype(np.int64)
            self._packed = (
                np.concatenate([t.feature for t in self.trees]),
                np.concatenate([t.threshold for t in self.trees]),
                np.concatenate([t.left for t in self.trees]),
                np.concatenate([t.right for t in self.trees]),
                np.concatenate([t.value_index for t in self.trees]),
                offsets([t.node_count for t in self.trees]),
                np.concatenate([t.distributions for t in self.trees]),
                offsets([t.distributions.shape[0] for t in self.trees]),
            )
            # let the trees share the packed buffers instead of holding copies
            feature, threshold, left, right, vidx, node_off, dists, dist_off = self._packed
            for k, t in enumerate(self.trees):
                a, b = node_off[k], node_off[k + 1]
                t.feature, t.threshold = feature[a:b], threshold[a:b]
                t.left, t.right, t.value_index = left[a:b], right[a:b], vidx[a:b]
                t.distributions = dists[dist_off[k]:dist_off[k + 1]]
        return self._packed

    def predict_proba(self, X) -> np.ndarray:
        """Mean of the trees' leaf distributions, one row per instance."""
        X = _as_rows(X)
        if X.shape[1] != self.feature_count:
            raise ValueError(f"expected {self.feature_count} features, got {X.shape[1]}")
        return _kernels.predict_packed(X, *self._pack(), self.class_count)

    def predict(self, X) -> np.ndarray:
        return np.argmax(self.predict_proba(X), axis=1)


def _as_rows(X) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[None, :]
    return np.ascontiguousarray(X)


def default_max_features(d: int) -> int:
    return max(1, math.ceil(math.sqrt(d)))


def _rank_columns(XT):
    """Dense per-feature ranks plus the distinct values of every feature."""
    order = np.argsort(XT, axis=1, kind="stable")
    srt = np.take_along_axis(XT, order, axis=1)
    new = np.ones_like(srt, dtype=bool)
    new[:, 1:] = srt[:, 1:] != srt[:, :-1]
    dense = np.cumsum(new, axis=1, dtype=np.int64) - 1
    ranks = np.empty_like(dense)
    np.put_along_axis(ranks, order, dense, axis=1)
    offsets = np.concatenate([[0], np.cumsum(new.sum(axis=1))]).astype(np.int64)
    return ranks, np.ascontiguousarray(srt[new]), offsets


_NO_RANKS = (np.zeros((1, 1), dtype=np.int64), np.zeros(1), np.zeros(2, dtype=np.int64))


def _encoding(XT, kind):
    if kind not in KINDS:
        raise ValueError(f"unknown forest kind {kind!r}")
    return _rank_columns(XT) if kind == RANDOM else _NO_RANKS


def _tree_from_arrays(XT, enc, y, rows, class_count, kind, max_features, max_depth, seed):
    code = _kernels.GINI if kind == RANDOM else _kernels.RANDOM
    arrays = _kernels.grow_tree(XT, *enc, y, rows, class_count, code, max_features,
                                -1 if max_depth is None else max_depth, seed)
    return Tree(*arrays)


def train_tree(X, y, class_count: int, rows=None, kind: str = RANDOM,
               max_features: Optional[int] = None, seed: int = 0,
               max_depth: Optional[int] = None) -> Tree:
    """Grow a single unpruned tree on ``rows`` of ``X`` (all rows by default).

    ``kind="random"`` picks the Gini-best midpoint split among
    ``max_features`` sampled features (default ``ceil(sqrt(d))``);
    ``kind="completely_random"`` picks a random feature and a uniform
    random threshold, never looking at the labels.
    """
    X = _as_rows(X)
    y = np.ascontiguousarray(y, dtype=np.int64)
    rows = np.arange(X.shape[0], dtype=np.int64) if rows is None else \
        np.ascontiguousarray(rows, dtype=np.int64)
    if rows.size == 0:
        raise ValueError("cannot grow a tree on zero rows")
    mf = default_max_features(X.shape[1]) if max_features is None else int(max_features)
    XT = np.ascontiguousarray(X.T)
    return _tree_from_arrays(XT, _encoding(XT, kind), y, rows, class_count, kind,
                             mf, max_depth, _seed32(seed))


def tree_seeds(seed: int, count: int) -> np.ndarray:
    """Independent 32-bit seeds for ``count`` trees, derived from ``seed``."""
    return np.random.SeedSequence(int(seed)).generate_state(count, dtype=np.uint32)


def _seed32(seed) -> int:
    return int(seed) & 0xFFFFFFFF


def train_forest(X, y, class_count: int, rows=None, kind: str = RANDOM,
                 tree_count: int = 50, seed: int = 0,
                 max_features: Optional[int] = None,
                 max_depth: Optional[int] = None) -> Forest:
    """Train ``tree_count`` trees of one kind.

    Random forests draw a bootstrap sample of ``rows`` per tree;
    completely-random forests grow every tree on all of ``rows``.
    """
    if tree_count < 1:
        raise ValueError("tree_count must be >= 1")
    X = _as_rows(X)
    XT = np.ascontiguousarray(X.T)
    y = np.ascontiguousarray(y, dtype=np.int64)
    rows = np.arange(X.shape[0], dtype=np.int64) if rows is None else \
        np.ascontiguousarray(rows, dtype=np.int64)
    if rows.size == 0:
        raise ValueError("cannot train a forest on zero rows")
    mf = default_max_features(X.shape[1]) if max_features is None else int(max_features)
    enc = _encoding(XT, kind)
    trees = []
    for s in tree_seeds(seed, tree_count):
        if kind == RANDOM:
            boot = np.random.default_rng(int(s)).integers(0, rows.size, rows.size)
            sample = rows[boot]
        else:
            sample = rows
        trees.append(_tree_from_arrays(XT, enc, y, sample, class_count, kind, mf,
                                       max_depth, int(s)))
    forest = Forest(trees, kind, class_count, X.shape[1])
    forest._pack()
    return forest


def predict_proba(forest: Forest, X) -> np.ndarray:
    return forest.predict_proba(X)
