"""Datasets, CSV ingestion, stratified fold assignment and synthetic blobs."""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np


class DataError(ValueError):
    """Raised when a dataset cannot be built or read."""


@dataclass(frozen=True)
class Dataset:
    """Dense feature matrix with integer-encoded labels.

    ``label_names[k]`` is the original label that was encoded as ``k``.
    """

    features: np.ndarray
    labels: np.ndarray
    class_count: int
    label_names: tuple = field(default=())

    def __post_init__(self):
        X = np.ascontiguousarray(self.features, dtype=np.float64)
        y = np.ascontiguousarray(self.labels, dtype=np.int64)
        if X.ndim != 2:
            raise DataError(f"features must be 2-D, got shape {X.shape}")
        if y.ndim != 1 or y.shape[0] != X.shape[0]:
            raise DataError(
                f"labels length {y.shape[0] if y.ndim == 1 else y.shape} "
                f"does not match {X.shape[0]} feature rows")
        if X.shape[1] < 1:
            raise DataError("need at least one feature column")
        if self.class_count < 2:
            raise DataError(f"need at least 2 classes, got {self.class_count}")
        if y.size and (y.min() < 0 or y.max() >= self.class_count):
            raise DataError(f"labels must lie in [0, {self.class_count})")
        if not np.all(np.isfinite(X)):
            r, c = np.argwhere(~np.isfinite(X))[0]
            raise DataError(f"non-finite feature value at row {r}, column {c}")
        names = tuple(self.label_names) or tuple(str(k) for k in range(self.class_count))
        if len(names) != self.class_count:
            raise DataError("label_names length must equal class_count")
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "labels", y)
        object.__setattr__(self, "label_names", names)

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def feature_count(self) -> int:
        return self.features.shape[1]

    def subset(self, rows) -> "Dataset":
        rows = np.asarray(rows, dtype=np.int64)
        return Dataset(self.features[rows], self.labels[rows],
                       self.class_count, self.label_names)

    def decode(self, codes) -> list:
        return [self.label_names[int(k)] for k in codes]


@dataclass(frozen=True)
class FoldAssignment:
    fold_of: np.ndarray
    fold_count: int

    def test_rows(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.fold_of == fold)

    def train_rows(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.fold_of != fold)

    def __iter__(self):
        for f in range(self.fold_count):
            yield self.train_rows(f), self.test_rows(f)


def stratified_folds(labels, fold_count: int, seed: int) -> FoldAssignment:
    """Shuffle each class with ``seed`` and deal its members round-robin.

    The dealing position carries over from one class to the next so the
    total fold sizes also stay within one of each other.
    """
    y = np.asarray(labels.labels if isinstance(labels, Dataset) else labels)
    n = y.shape[0]
    if fold_count < 2:
        raise DataError(f"fold_count must be >= 2, got {fold_count}")
    if n < fold_count:
        raise DataError(f"cannot split {n} instances into {fold_count} folds")
    rng = np.random.default_rng(seed)
    fold_of = np.empty(n, dtype=np.int64)
    offset = 0
    for c in np.unique(y):
        members = np.flatnonzero(y == c)
        members = members[rng.permutation(members.size)]
        fold_of[members] = (offset + np.arange(members.size)) % fold_count
        offset = (offset + members.size) % fold_count
    return FoldAssignment(fold_of, fold_count)


def make_synthetic(n: int, d: int, C: int, separation: float = 10.0,
                   seed: int = 0) -> Dataset:
    """Gaussian blobs with unit variance, one per class.

    Class ``c`` is centred at ``c * separation`` along the unit diagonal, so
    adjacent class centres are exactly ``separation`` apart.
    """
    if C < 2 or n < C or d < 1:
        raise DataError(f"need C >= 2, n >= C and d >= 1 (got n={n}, d={d}, C={C})")
    rng = np.random.default_rng(seed)
    labels = rng.permutation(np.arange(n) % C)
    direction = np.ones(d) / math.sqrt(d)
    centers = separation * np.arange(C)[:, None] * direction[None, :]
    X = centers[labels] + rng.standard_normal((n, d))
    return Dataset(X, labels, C)


def load_csv(path: Union[str, os.PathLike], label_column: Union[int, str] = -1,
             has_header: bool = False,
             classes: Optional[Sequence[str]] = None) -> Dataset:
    """Read a comma-separated file into a :class:`Dataset`.

    Labels are encoded densely in order of first appearance unless
    ``classes`` fixes the encoding (used when scoring against a trained model).
    """
    if not os.path.exists(path):
        raise DataError(f"no such file: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r and any(cell.strip() for cell in r)]
    header = None
    if has_header:
        if not rows:
            raise DataError(f"{path}: empty file")
        header, rows = [h.strip() for h in rows[0]], rows[1:]
    if not rows:
        raise DataError(f"{path}: no data rows")
    width = len(rows[0])
    if isinstance(label_column, str) and not label_column.lstrip("-").isdigit():
        if header is None or label_column not in header:
            raise DataError(f"{path}: label column {label_column!r} not found")
        label_idx = header.index(label_column)
    else:
        label_idx = int(label_column)
        if not -width <= label_idx < width:
            raise DataError(f"{path}: label column {label_idx} out of range")
        label_idx %= width
    if width < 2:
        raise DataError(f"{path}: need a label column and at least one feature")

    mapping = {str(c): k for k, c in enumerate(classes)} if classes is not None else {}
    fixed = classes is not None
    X = np.empty((len(rows), width - 1))
    y = np.empty(len(rows), dtype=np.int64)
    line0 = 2 if has_header else 1
    for i, row in enumerate(rows):
        if len(row) != width:
            raise DataError(f"{path}: line {i + line0} has {len(row)} fields, expected {width}")
        raw = row[label_idx].strip()
        if raw not in mapping:
            if fixed:
                raise DataError(f"{path}: line {i + line0}: unknown label {raw!r}")
            mapping[raw] = len(mapping)
        y[i] = mapping[raw]
        j = 0
        for col, cell in enumerate(row):
            if col == label_idx:
                continue
            try:
                v = float(cell)
            except ValueError:
                raise DataError(f"{path}: line {i + line0}, column {col}: "
                                f"non-numeric value {cell!r}") from None
            if not math.isfinite(v):
                raise DataError(f"{path}: line {i + line0}, column {col}: "
                                f"non-finite value {cell!r}")
            X[i, j] = v
            j += 1
    names = tuple(mapping)
    if len(names) < 2:
        raise DataError(f"{path}: need at least 2 classes, found {len(names)}")
    return Dataset(X, y, len(names), names)


def save_csv(ds: Dataset, path: Union[str, os.PathLike], header: bool = False) -> None:
    """Write ``ds`` with the label as the last column; floats round-trip exactly."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        if header:
            w.writerow([f"x{j}" for j in range(ds.feature_count)] + ["label"])
        for x, lab in zip(ds.features, ds.labels):
            w.writerow([repr(float(v)) for v in x] + [ds.label_names[lab]])
