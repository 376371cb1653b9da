"""Model comparison statistics: paired t, Friedman and Nemenyi.

Critical values are passed in rather than computed from distributions.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

# t_{0.05,4}, F_{0.05,(6,48)} and q_{0.1,7}, the constants for 5-fold CV
# over nine datasets and seven models
T_CRITICAL = 2.132
F_CRITICAL = 2.295
Q_CRITICAL = 2.693


def paired_t_statistic(a: Sequence[float], b: Sequence[float]) -> float:
    """``|sqrt(m) * mean(D) / std(D)|`` for paired fold scores, ``D = a - b``.

    ``std`` is the population standard deviation (divide by ``m``).
    Returns ``inf`` when every difference is the same non-zero value
    and 0 when all differences are zero.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1 or a.size == 0:
        raise ValueError("paired scores must be equal-length non-empty vectors")
    D = a - b
    mu = D.mean()
    sigma = D.std()
    if sigma == 0.0:
        return 0.0 if mu == 0.0 else math.inf
    return float(abs(math.sqrt(D.size) * mu / sigma))


def rank_rows(scores) -> np.ndarray:
    """Rank models within each row, 1 = highest score; ties share the average rank."""
    scores = np.asarray(scores, dtype=np.float64)
    ranks = np.empty_like(scores)
    for i, row in enumerate(scores):
        order = np.argsort(-row, kind="stable")
        r = np.empty(row.size)
        r[order] = np.arange(1, row.size + 1)
        for v in np.unique(row):
            tied = row == v
            r[tied] = r[tied].mean()
        ranks[i] = r
    return ranks


def mean_ranks(scores) -> np.ndarray:
    return rank_rows(scores).mean(axis=0)


def friedman_chi2(scores) -> float:
    scores = np.asarray(scores, dtype=np.float64)
    N, k = scores.shape
    r = mean_ranks(scores)
    return float(12.0 * N / (k * (k + 1)) * (np.sum(r ** 2) - k * (k + 1) ** 2 / 4.0))


def friedman_statistic(scores) -> float:
    """Iman-Davenport F form of the Friedman test on an N x k score grid.

    ``inf`` when every dataset ranks the models identically.
    """
    scores = np.asarray(getattr(scores, "accuracies", scores), dtype=np.float64)
    if scores.ndim != 2 or scores.shape[0] < 2 or scores.shape[1] < 2:
        raise ValueError("need at least 2 datasets and 2 models")
    N, k = scores.shape
    tau = friedman_chi2(scores)
    denom = N * (k - 1) - tau
    if math.isclose(denom, 0.0, abs_tol=1e-9):
        return math.inf
    return float((N - 1) * tau / denom)


def nemenyi_cd(k: int, N: int, q: float = Q_CRITICAL) -> float:
    """Critical difference between mean ranks: ``q * sqrt(k(k+1) / 6N)``."""
    if k < 2 or N < 1 or q <= 0:
        raise ValueError("need k >= 2, N >= 1 and q > 0")
    return q * math.sqrt(k * (k + 1) / (6.0 * N))


@dataclass
class AccuracyTable:
    """Accuracies in percent, one row per dataset and one column per model."""

    model_names: List[str]
    dataset_names: List[str]
    accuracies: np.ndarray

    def __post_init__(self):
        self.accuracies = np.asarray(self.accuracies, dtype=np.float64)
        if self.accuracies.shape != (len(self.dataset_names), len(self.model_names)):
            raise ValueError(f"table shape {self.accuracies.shape} does not match "
                             f"{len(self.dataset_names)} datasets x {len(self.model_names)} models")
        if np.any((self.accuracies < 0) | (self.accuracies > 100)):
            raise ValueError("accuracies must be percentages in [0, 100]")

    def ranks(self) -> np.ndarray:
        return rank_rows(self.accuracies)


def read_grid(path):
    """``(column names, row names, values)`` from a CSV whose first column names the row."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if len(rows) < 2:
        raise ValueError(f"{path}: need a header and at least one row")
    header = [h.strip() for h in rows[0]]
    names, values = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise ValueError(f"{path}: line {lineno} has {len(row)} fields, "
                             f"expected {len(header)} (ragged table)")
        names.append(row[0].strip())
        try:
            values.append([float(v) for v in row[1:]])
        except ValueError:
            raise ValueError(f"{path}: line {lineno}: non-numeric value") from None
    return header[1:], names, np.array(values)


def read_table(path) -> AccuracyTable:
    """CSV with a header of model names; the first column names the dataset."""
    return AccuracyTable(*read_grid(path))


def write_table(table: AccuracyTable, path, corner: str = "dataset") -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow([corner] + list(table.model_names))
        for name, row in zip(table.dataset_names, table.accuracies):
            w.writerow([name] + [repr(float(v)) for v in row])
