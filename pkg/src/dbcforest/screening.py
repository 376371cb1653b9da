"""Confidence screening: ranking, prefix and binning thresholds, routing.

Two rules decide the confidence ``gate`` above which training instances are
finalized at the current level:

* prefix screening takes the smallest confidence ``P_k`` whose prefix of the
  ranking (ranks ``1..k``) still has accuracy ``>= TA``;
* binning screening cuts the ranking into fixed-size bins and stops at the
  first bin whose accuracy falls below ``TA``; the gate is the confidence of
  the last instance of the bin before it.

A gate of ``None`` means nothing is screened.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

PREFIX = "prefix"
BINNING = "binning"


def confidence(vectors) -> np.ndarray:
    """Largest class probability of each vector (a scalar for a single vector)."""
    v = np.asarray(vectors, dtype=np.float64)
    return v.max(axis=-1)


@dataclass(frozen=True)
class ConfidenceRecord:
    instance_id: int
    confidence: float
    correct: bool
    predicted_class: int


@dataclass
class RankedConfidences:
    """Records sorted by confidence, highest first; ties by ascending id."""

    ids: np.ndarray
    confidence: np.ndarray
    correct: np.ndarray
    predicted: np.ndarray

    def __len__(self):
        return int(self.ids.shape[0])

    def records(self) -> List[ConfidenceRecord]:
        return [ConfidenceRecord(int(i), float(c), bool(k), int(p))
                for i, c, k, p in zip(self.ids, self.confidence, self.correct, self.predicted)]


@dataclass
class Bin:
    start: int
    end: int
    accuracy: float = float("nan")

    @property
    def size(self) -> int:
        return self.end - self.start


@dataclass
class ScreeningOutcome:
    gate: Optional[float]
    screened: np.ndarray
    remaining: np.ndarray
    # number of bins examined by the binning scan; 0 for prefix screening
    bins_inspected: int = field(default=0, compare=False)

    @property
    def screened_count(self) -> int:
        return int(self.screened.shape[0])


def confidence_records(vectors, labels, ids=None) -> List[ConfidenceRecord]:
    v = np.asarray(vectors, dtype=np.float64)
    pred = v.argmax(axis=1)
    conf = v.max(axis=1)
    ok = pred == np.asarray(labels)
    ids = np.arange(v.shape[0]) if ids is None else np.asarray(ids)
    return [ConfidenceRecord(int(i), float(c), bool(k), int(p))
            for i, c, k, p in zip(ids, conf, ok, pred)]


def rank_by_confidence(records=None, *, confidence=None, correct=None,
                       predicted=None, ids=None) -> RankedConfidences:
    """Stable descending sort by confidence.

    Accepts a list of :class:`ConfidenceRecord` or parallel arrays.
    """
    if records is not None:
        ids = np.array([r.instance_id for r in records], dtype=np.int64)
        confidence = np.array([r.confidence for r in records], dtype=np.float64)
        correct = np.array([r.correct for r in records], dtype=bool)
        predicted = np.array([r.predicted_class for r in records], dtype=np.int64)
    else:
        confidence = np.asarray(confidence, dtype=np.float64)
        correct = np.asarray(correct, dtype=bool)
        n = confidence.shape[0]
        ids = np.arange(n, dtype=np.int64) if ids is None else np.asarray(ids, dtype=np.int64)
        predicted = np.zeros(n, dtype=np.int64) if predicted is None else \
            np.asarray(predicted, dtype=np.int64)
    order = np.lexsort((ids, -confidence))
    return RankedConfidences(ids[order], confidence[order], correct[order], predicted[order])


def _outcome(ranked: RankedConfidences, gate: Optional[float], bins_inspected=0):
    if gate is None:
        mask = np.zeros(len(ranked), dtype=bool)
    else:
        mask = ranked.confidence >= gate
    return ScreeningOutcome(gate, ranked.ids[mask], ranked.ids[~mask], bins_inspected)


def prefix_accuracies(ranked: RankedConfidences) -> np.ndarray:
    """``L_k`` for k = 1..n: accuracy of the top-k ranked instances."""
    k = np.arange(1, len(ranked) + 1)
    return np.cumsum(ranked.correct) / k


def prefix_threshold(ranked: RankedConfidences, ta: float) -> ScreeningOutcome:
    """Gate = min{P_k : L_k >= TA}; ``None`` when no prefix qualifies."""
    _check_ta(ta)
    if len(ranked) == 0:
        return _outcome(ranked, None)
    ok = np.flatnonzero(prefix_accuracies(ranked) >= ta)
    gate = float(ranked.confidence[ok].min()) if ok.size else None
    return _outcome(ranked, gate)


def bin_partition(ranked, bin_size: int) -> List[Bin]:
    """Consecutive rank blocks of ``bin_size``; the last one keeps the remainder."""
    if bin_size < 1:
        raise ValueError("bin_size must be >= 1")
    n = ranked if isinstance(ranked, (int, np.integer)) else len(ranked)
    return [Bin(s, min(s + bin_size, n)) for s in range(0, n, bin_size)]


def bin_accuracies(bins: List[Bin], ranked: RankedConfidences) -> List[Bin]:
    return [Bin(b.start, b.end, float(np.mean(ranked.correct[b.start:b.end])))
            for b in bins]


def binning_threshold(ranked: RankedConfidences, bin_size: int, ta: float) -> ScreeningOutcome:
    """Scan bins in rank order up to the first one with accuracy below TA.

    The gate is the confidence of the last instance of the preceding bin;
    ``None`` if the first bin already fails, and the lowest confidence if
    every bin passes. Bins after the first failing one are never evaluated.
    """
    _check_ta(ta)
    bins = bin_partition(ranked, bin_size)
    inspected = 0
    last_pass = None
    for b in bins:
        inspected += 1
        acc = np.count_nonzero(ranked.correct[b.start:b.end]) / b.size
        if acc < ta:
            break
        last_pass = b
    gate = None if last_pass is None else float(ranked.confidence[last_pass.end - 1])
    return _outcome(ranked, gate, inspected)


def screen(ranked: RankedConfidences, strategy: str, ta: float,
           bin_size: int = 100) -> ScreeningOutcome:
    if strategy == PREFIX:
        return prefix_threshold(ranked, ta)
    if strategy == BINNING:
        return binning_threshold(ranked, bin_size, ta)
    if strategy == "none":
        _check_ta(ta)
        return _outcome(ranked, None)
    raise ValueError(f"unknown screening strategy {strategy!r}")


def route(confidences, predictions, gate: Optional[float], ids=None):
    """Split instances at ``gate``.

    Returns ``(finalized, forwarded)``: a dict ``id -> prediction`` for the
    instances with confidence ``>= gate`` and the list of the other ids.
    """
    conf = np.asarray(confidences, dtype=np.float64)
    pred = np.asarray(predictions)
    ids = np.arange(conf.shape[0]) if ids is None else np.asarray(ids)
    if gate is None:
        mask = np.zeros(conf.shape[0], dtype=bool)
    else:
        mask = conf >= gate
    finalized = {int(i): int(p) for i, p in zip(ids[mask], pred[mask])}
    forwarded = [int(i) for i in ids[~mask]]
    if len(finalized) + len(forwarded) != conf.shape[0] or finalized.keys() & set(forwarded):
        raise ValueError("instance ids must be unique")
    return finalized, forwarded


def _check_ta(ta):
    if not 0.0 < ta <= 1.0:
        raise ValueError(f"target accuracy must lie in (0, 1], got {ta}")


def compare_thresholds(ranked: RankedConfidences, ta: float, bin_size: int) -> dict:
    """Both gates side by side, plus the instances only prefix screening admits."""
    pre = prefix_threshold(ranked, ta)
    bn = binning_threshold(ranked, bin_size, ta)
    correct = dict(zip(ranked.ids.tolist(), ranked.correct.tolist()))

    def acc(ids):
        return float(np.mean([correct[i] for i in ids])) if len(ids) else float("nan")

    extra = np.setdiff1d(pre.screened, bn.screened)
    return {
        "ta": ta,
        "bin_size": bin_size,
        "n": len(ranked),
        "prefix_gate": pre.gate,
        "binning_gate": bn.gate,
        "prefix_screened": pre.screened_count,
        "binning_screened": bn.screened_count,
        "prefix_accuracy": acc(pre.screened),
        "binning_accuracy": acc(bn.screened),
        "mis_partitioned": int(sum(not correct[i] for i in extra.tolist())),
    }


TRACE_HEADER = ["id", "confidence", "correct", "predicted"]


def write_trace(path, ranked: RankedConfidences) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(TRACE_HEADER)
        for i, c, k, p in zip(ranked.ids, ranked.confidence, ranked.correct, ranked.predicted):
            w.writerow([int(i), repr(float(c)), int(k), int(p)])


def read_trace(path) -> RankedConfidences:
    if not os.path.exists(path):
        raise ValueError(f"no such trace file: {path}")
    ids, conf, ok, pred = [], [], [], []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != TRACE_HEADER:
            raise ValueError(f"{path}: expected header {','.join(TRACE_HEADER)}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                i, c, k, p = row
                i, c, k, p = int(i), float(c), int(k), int(p)
            except ValueError:
                raise ValueError(f"{path}: malformed trace row at line {lineno}: {row}") from None
            if k not in (0, 1) or not 0.0 <= c <= 1.0:
                raise ValueError(f"{path}: malformed trace row at line {lineno}: {row}")
            ids.append(i)
            conf.append(c)
            ok.append(bool(k))
            pred.append(p)
    return rank_by_confidence(confidence=conf, correct=ok, predicted=pred, ids=ids)
