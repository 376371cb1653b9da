"""Multi-grained scanning over the flattened feature vector.

Each window size gets a random forest and a completely-random forest trained
on every window-length slice of the training rows. A row is re-described by
the class vectors its slices receive.

With ``folds > 1`` (the default) the training rows are split into folds and
each fold's slices are scored only by forests trained on the other folds, so
the cascade never sees features computed by forests that memorized the very
row they describe. New rows are scored by the mean of the fold forests.
``folds=1`` trains a single forest pair on everything.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .data import stratified_folds
from .forest import COMPLETELY_RANDOM, RANDOM, Forest, train_forest


def default_window_sizes(d: int) -> List[int]:
    return [d // 4, d // 6, d // 8]


def slice_count(d: int, window: int, stride: int = 1) -> int:
    return (d - window) // stride + 1


def transformed_width(d: int, window_sizes: Sequence[int], class_count: int,
                      stride: int = 1) -> int:
    return sum(slice_count(d, w, stride) for w in window_sizes) * 2 * class_count


def extract_slices(X, window: int, stride: int = 1) -> np.ndarray:
    """``(n, slices, window)`` view; slice ``i`` covers columns ``[i*stride, i*stride + window)``."""
    X = np.asarray(X, dtype=np.float64)
    return np.lib.stride_tricks.sliding_window_view(X, window, axis=1)[:, ::stride]


@dataclass
class MultiGrainScanner:
    window_sizes: List[int]
    feature_count: int
    class_count: int
    stride: int = 1
    trees: int = 30
    # forests[k] holds one (rf, crf) pair per fold for window_sizes[k]
    forests: List[List[Tuple[Forest, Forest]]] = field(default_factory=list)

    @property
    def output_width(self) -> int:
        return transformed_width(self.feature_count, self.window_sizes,
                                 self.class_count, self.stride)

    @property
    def folds(self) -> int:
        return len(self.forests[0]) if self.forests else 0

    def transform(self, X) -> np.ndarray:
        return transform(self, X)


def _check_windows(d, window_sizes):
    if window_sizes is None:
        window_sizes = default_window_sizes(d)
        if min(window_sizes) < 1:
            raise ValueError(f"default windows d/4, d/6, d/8 need d >= 8 (d={d}); "
                             "pass window_sizes explicitly")
    window_sizes = [int(w) for w in window_sizes]
    if not window_sizes or any(not 1 <= w <= d for w in window_sizes):
        raise ValueError(f"window sizes must lie in [1, {d}], got {window_sizes}")
    return window_sizes


def _score(pair, S, n, C):
    rf, crf = pair
    flat = S.reshape(-1, S.shape[2])
    ns = S.shape[1]
    return np.concatenate([rf.predict_proba(flat).reshape(n, ns, C),
                           crf.predict_proba(flat).reshape(n, ns, C)], axis=2)


def fit_transform_scanner(X, y, class_count: int,
                          window_sizes: Optional[Sequence[int]] = None,
                          stride: int = 1, trees: int = 30, folds: int = 3,
                          seed: int = 0, max_depth: Optional[int] = None):
    """Fit a scanner and return it with the transformed training rows.

    With ``folds > 1`` the returned training features are out-of-fold.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    n, d = X.shape
    window_sizes = _check_windows(d, window_sizes)
    if stride < 1 or folds < 1:
        raise ValueError("stride and folds must be >= 1")
    C = class_count
    if folds == 1:
        splits = [(np.arange(n), np.arange(n))]
    else:
        splits = list(stratified_folds(y, folds, int(
            np.random.SeedSequence([int(seed), 1]).generate_state(1)[0])))

    scanner = MultiGrainScanner(window_sizes, d, C, stride, trees)
    parts = []
    for k, w in enumerate(window_sizes):
        S = extract_slices(X, w, stride)
        ns = S.shape[1]
        block = np.zeros((n, ns, 2 * C))
        pairs = []
        seeds = np.random.SeedSequence([int(seed), 2, k]).generate_state(2 * len(splits))
        for f, (train_rows, test_rows) in enumerate(splits):
            sub_X = S[train_rows].reshape(-1, w)
            sub_y = np.repeat(y[train_rows], ns)
            rf = train_forest(sub_X, sub_y, C, kind=RANDOM, tree_count=trees,
                              seed=int(seeds[2 * f]), max_depth=max_depth)
            crf = train_forest(sub_X, sub_y, C, kind=COMPLETELY_RANDOM, tree_count=trees,
                               seed=int(seeds[2 * f + 1]), max_depth=max_depth)
            pairs.append((rf, crf))
            block[test_rows] = _score((rf, crf), S[test_rows], test_rows.size, C)
        scanner.forests.append(pairs)
        parts.append(block.reshape(n, ns * 2 * C))
    return scanner, np.hstack(parts)


def fit_scanner(X, y, class_count: int, window_sizes: Optional[Sequence[int]] = None,
                stride: int = 1, trees: int = 30, folds: int = 3, seed: int = 0,
                max_depth: Optional[int] = None) -> MultiGrainScanner:
    return fit_transform_scanner(X, y, class_count, window_sizes, stride, trees,
                                 folds, seed, max_depth)[0]


def transform(scanner: MultiGrainScanner, X) -> np.ndarray:
    """Concatenate, window by window and slice by slice, the RF then CRF class vectors."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != scanner.feature_count:
        raise ValueError(f"scanner expects {scanner.feature_count} features, "
                         f"got {X.shape[-1]}")
    n = X.shape[0]
    parts = []
    for w, pairs in zip(scanner.window_sizes, scanner.forests):
        S = extract_slices(X, w, scanner.stride)
        both = np.mean([_score(p, S, n, scanner.class_count) for p in pairs], axis=0)
        parts.append(both.reshape(n, -1))
    return np.hstack(parts) if parts else np.empty((n, 0))
