"""One cascade level: a random forest and a completely-random forest per CV fold."""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .data import DataError, FoldAssignment, stratified_folds
from .forest import COMPLETELY_RANDOM, RANDOM, Forest, train_forest


@dataclass
class LevelOutput:
    rf_vectors: np.ndarray
    crf_vectors: np.ndarray
    out_of_fold: bool

    @property
    def mean_vectors(self) -> np.ndarray:
        return (self.rf_vectors + self.crf_vectors) / 2.0

    @property
    def n(self) -> int:
        return self.rf_vectors.shape[0]


@dataclass
class CascadeLevel:
    rf_fold_models: List[Forest]
    crf_fold_models: List[Forest]
    fold_assignment: Optional[FoldAssignment]
    level_index: int

    @property
    def feature_count(self) -> int:
        return self.rf_fold_models[0].feature_count

    @property
    def class_count(self) -> int:
        return self.rf_fold_models[0].class_count


def train_level(X, y, class_count: int, level_index: int = 0, seed: int = 0,
                folds: int = 3, trees: int = 50,
                max_depth: Optional[int] = None):
    """Train a level with ``folds``-fold cross-validation.

    Row ``i`` of the returned :class:`LevelOutput` comes only from the fold
    models that held ``i`` out.
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    n = X.shape[0]
    if n < folds:
        raise DataError(f"level {level_index}: {n} instances cannot fill {folds} folds")
    ss = np.random.SeedSequence([int(seed), int(level_index)])
    fold_seed, *forest_seeds = ss.generate_state(1 + 2 * folds)
    assignment = stratified_folds(y, folds, int(fold_seed))

    rf_vec = np.zeros((n, class_count))
    crf_vec = np.zeros((n, class_count))
    rf_models, crf_models = [], []
    for f, (train_rows, test_rows) in enumerate(assignment):
        rf = train_forest(X, y, class_count, rows=train_rows, kind=RANDOM,
                          tree_count=trees, seed=int(forest_seeds[2 * f]),
                          max_depth=max_depth)
        crf = train_forest(X, y, class_count, rows=train_rows, kind=COMPLETELY_RANDOM,
                           tree_count=trees, seed=int(forest_seeds[2 * f + 1]),
                           max_depth=max_depth)
        rf_vec[test_rows] = rf.predict_proba(X[test_rows])
        crf_vec[test_rows] = crf.predict_proba(X[test_rows])
        rf_models.append(rf)
        crf_models.append(crf)
    level = CascadeLevel(rf_models, crf_models, assignment, level_index)
    return level, LevelOutput(rf_vec, crf_vec, out_of_fold=True)


def predict_level(level: CascadeLevel, X) -> LevelOutput:
    """Average each forest kind over the level's fold models."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != level.feature_count:
        raise ValueError(f"level {level.level_index} expects {level.feature_count} "
                         f"features, got {X.shape[-1]}")
    rf = np.mean([m.predict_proba(X) for m in level.rf_fold_models], axis=0)
    crf = np.mean([m.predict_proba(X) for m in level.crf_fold_models], axis=0)
    return LevelOutput(rf, crf, out_of_fold=False)


def augment_features(original, output: LevelOutput) -> np.ndarray:
    """``original ++ rf_vectors ++ crf_vectors``, row by row."""
    original = np.asarray(original, dtype=np.float64)
    if original.shape[0] != output.n:
        raise ValueError(f"row count mismatch: {original.shape[0]} vs {output.n}")
    return np.hstack([original, output.rf_vectors, output.crf_vectors])
