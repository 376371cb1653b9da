"""Cascade growth with per-level confidence screening, and cascade prediction."""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass, field, asdict
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .data import DataError, Dataset
from .level import CascadeLevel, augment_features, predict_level, train_level
from .scanning import MultiGrainScanner, fit_transform_scanner
from .screening import (BINNING, PREFIX, RankedConfidences, ScreeningOutcome,
                        rank_by_confidence, screen)

NONE = "none"
STRATEGIES = (NONE, PREFIX, BINNING)
# the names the three published models go by
STRATEGY_ALIASES = {"gcforest": NONE, "gccs": PREFIX, "gcforestcs": PREFIX,
                    "dbc": BINNING, "dbc-forest": BINNING}

HALVE_ERROR = "halve_error"              # TA recomputed at every level
HALVE_ERROR_FIXED = "halve_error_fixed"  # TA taken from level 1 and kept
TA_MODES = (HALVE_ERROR, HALVE_ERROR_FIXED)


def resolve_strategy(name: str) -> str:
    key = name.lower()
    key = STRATEGY_ALIASES.get(key, key)
    if key not in STRATEGIES:
        raise ValueError(f"unknown strategy {name!r}; choose from "
                         f"{sorted(set(STRATEGIES) | set(STRATEGY_ALIASES))}")
    return key


@dataclass
class CascadeConfig:
    strategy: str = BINNING
    trees_per_forest: int = 50
    folds: int = 3
    bin_size: int = 100
    ta_mode: str = HALVE_ERROR
    target_accuracy: Optional[float] = None  # overrides ta_mode when set
    max_levels: int = 50
    min_remaining: Optional[int] = None      # defaults to ``folds``
    max_depth: Optional[int] = None
    scan: bool = False
    scan_windows: Optional[List[int]] = None
    scan_trees: int = 30
    scan_stride: int = 1
    scan_folds: int = 3
    seed: int = 0

    def __post_init__(self):
        self.strategy = resolve_strategy(self.strategy)
        if self.ta_mode not in TA_MODES:
            raise ValueError(f"ta_mode must be one of {TA_MODES}")
        if self.bin_size < 1 or self.trees_per_forest < 1 or self.folds < 2:
            raise ValueError("need bin_size >= 1, trees_per_forest >= 1, folds >= 2")
        if self.max_levels < 1:
            raise ValueError("max_levels must be >= 1")
        if self.target_accuracy is not None and not 0 < self.target_accuracy <= 1:
            raise ValueError("target_accuracy must lie in (0, 1]")
        if self.min_remaining is None:
            self.min_remaining = self.folds

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class LevelDiagnostics:
    level: int
    remaining_count: int
    out_of_fold_accuracy: float
    cumulative_accuracy: float
    target_accuracy: float
    gate: Optional[float]
    screened_count: int
    seconds: float = field(default=0.0, compare=False)


@dataclass
class LevelState:
    """What a level saw and decided; handed to the ``fit`` callback."""

    level: int
    ranked: RankedConfidences
    outcome: ScreeningOutcome
    target_accuracy: float
    final_predictions: np.ndarray
    finalized: np.ndarray


@dataclass
class CascadeModel:
    levels: List[CascadeLevel]
    gates: List[Optional[float]]
    config: CascadeConfig
    feature_count: int
    class_count: int
    label_names: tuple
    scanner: Optional[MultiGrainScanner] = None

    @property
    def depth(self) -> int:
        return len(self.levels)

    def predict(self, X):
        return predict(self, X)


def _halve_error(accuracy: float) -> float:
    return 1.0 - (1.0 - accuracy) / 2.0


def scan_dataset(ds: Dataset, config: CascadeConfig):
    """Fit the configured scanner on ``ds``; returns ``(scanner, training features)``."""
    return fit_transform_scanner(ds.features, ds.labels, ds.class_count,
                                 window_sizes=config.scan_windows,
                                 stride=config.scan_stride, trees=config.scan_trees,
                                 folds=config.scan_folds, seed=_scan_seed(config.seed),
                                 max_depth=config.max_depth)


def fit(ds: Dataset, config: Optional[CascadeConfig] = None,
        callback: Optional[Callable[[LevelState], None]] = None,
        scanned: Optional[Tuple[MultiGrainScanner, np.ndarray]] = None
        ) -> Tuple[CascadeModel, List[LevelDiagnostics]]:
    """Grow the cascade level by level.

    Each level is trained on the instances still remaining. Its out-of-fold
    class vectors give every remaining instance a confidence; the configured
    strategy turns these into a gate, and instances at or above the gate keep
    the level's prediction for good. Growth stops when cumulative training
    accuracy (frozen predictions plus the current level's out-of-fold ones)
    stops improving, when too few instances remain, or at ``max_levels``.
    The level that triggers the stop is kept and finalizes everything left.

    ``scanned`` lets several fits on the same rows share one scanner, as
    returned by :func:`scan_dataset`.
    """
    config = config or CascadeConfig()
    n, C = ds.n, ds.class_count
    if n < config.folds:
        raise DataError(f"{n} instances cannot fill {config.folds} folds")
    y = ds.labels
    scanner = None
    X0 = ds.features
    if config.scan:
        scanner, X0 = scanned if scanned is not None else scan_dataset(ds, config)
        if X0.shape[0] != n:
            raise ValueError("scanned features do not match the dataset rows")

    final_pred = np.full(n, -1, dtype=np.int64)
    finalized = np.zeros(n, dtype=bool)
    remaining = np.arange(n)
    prev_rf = prev_crf = None
    levels, gates, diags = [], [], []
    best_cum = -np.inf
    fixed_ta = None

    for li in range(1, config.max_levels + 1):
        t0 = time.perf_counter()
        X_in = X0[remaining]
        if prev_rf is not None:
            X_in = np.hstack([X_in, prev_rf[remaining], prev_crf[remaining]])
        level, out = train_level(X_in, y[remaining], C, level_index=li, seed=config.seed,
                                 folds=config.folds, trees=config.trees_per_forest,
                                 max_depth=config.max_depth)
        mean = out.mean_vectors
        pred = mean.argmax(axis=1)
        conf = mean.max(axis=1)
        correct = pred == y[remaining]
        oof_acc = float(correct.mean())
        cum_acc = float((np.count_nonzero(final_pred[finalized] == y[finalized])
                         + np.count_nonzero(correct)) / n)

        if config.target_accuracy is not None:
            ta = config.target_accuracy
        elif config.ta_mode == HALVE_ERROR_FIXED:
            fixed_ta = _halve_error(oof_acc) if fixed_ta is None else fixed_ta
            ta = fixed_ta
        else:
            ta = _halve_error(oof_acc)

        ranked = rank_by_confidence(confidence=conf, correct=correct, predicted=pred,
                                    ids=remaining)
        outcome = screen(ranked, config.strategy, ta, config.bin_size)
        screened = np.sort(outcome.screened)
        final_pred[screened] = pred[np.searchsorted(remaining, screened)]
        finalized[screened] = True

        if prev_rf is None:
            prev_rf = np.zeros((n, C))
            prev_crf = np.zeros((n, C))
        prev_rf[remaining] = out.rf_vectors
        prev_crf[remaining] = out.crf_vectors

        entering_ids = remaining
        remaining = np.sort(outcome.remaining)
        improved = cum_acc > best_cum
        best_cum = max(best_cum, cum_acc)
        stop = (not improved or remaining.size == 0
                or remaining.size < config.min_remaining or li == config.max_levels)
        if stop and remaining.size:
            final_pred[remaining] = pred[np.searchsorted(entering_ids, remaining)]
            finalized[remaining] = True

        levels.append(level)
        gates.append(outcome.gate)
        diags.append(LevelDiagnostics(li, entering_ids.size, oof_acc, cum_acc, ta, outcome.gate,
                                      outcome.screened_count, time.perf_counter() - t0))
        if callback is not None:
            callback(LevelState(li, ranked, outcome, ta, final_pred.copy(), finalized.copy()))
        if stop:
            break

    model = CascadeModel(levels, gates, config, ds.feature_count, C, ds.label_names, scanner)
    return model, diags


def _scan_seed(seed: int) -> int:
    return int(np.random.SeedSequence([int(seed), 0x5CA7]).generate_state(1)[0])


def predict(model: CascadeModel, X, return_confidence: bool = False):
    """Route each row down the cascade until its confidence meets a level's gate.

    Returns ``(classes, exit_levels)`` and, optionally, the exit confidences.
    Rows that never clear a gate take the last level's prediction.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.feature_count:
        raise ValueError(f"model expects {model.feature_count} features, got {X.shape[-1]}")
    n = X.shape[0]
    X0 = model.scanner.transform(X) if model.scanner is not None else X
    classes = np.full(n, -1, dtype=np.int64)
    exit_level = np.zeros(n, dtype=np.int64)
    exit_conf = np.zeros(n)
    active = np.arange(n)
    prev = None
    last = model.depth - 1
    for li, (level, gate) in enumerate(zip(model.levels, model.gates)):
        if active.size == 0:
            break
        X_in = X0[active]
        if prev is not None:
            X_in = augment_features(X_in, prev)
        out = predict_level(level, X_in)
        mean = out.mean_vectors
        conf = mean.max(axis=1)
        if li == last:
            done = np.ones(active.size, dtype=bool)
        elif gate is None:
            done = np.zeros(active.size, dtype=bool)
        else:
            done = conf >= gate
        ids = active[done]
        classes[ids] = mean[done].argmax(axis=1)
        exit_level[ids] = li + 1
        exit_conf[ids] = conf[done]
        active = active[~done]
        out.rf_vectors = out.rf_vectors[~done]
        out.crf_vectors = out.crf_vectors[~done]
        prev = out
    if return_confidence:
        return classes, exit_level, exit_conf
    return classes, exit_level


def training_accuracy_curve(diags: Sequence[LevelDiagnostics]) -> List[tuple]:
    """``(level, remaining, cumulative accuracy)`` rows for plotting."""
    if not diags:
        raise ValueError("no diagnostics")
    return [(d.level, d.remaining_count, d.cumulative_accuracy) for d in diags]


DIAGNOSTICS_HEADER = ["level", "remaining", "oof_accuracy", "cumulative_accuracy", "gate"]


def diagnostics_rows(diags: Sequence[LevelDiagnostics]) -> List[list]:
    return [[d.level, d.remaining_count, repr(d.out_of_fold_accuracy),
             repr(d.cumulative_accuracy), "" if d.gate is None else repr(d.gate)]
            for d in diags]


def write_diagnostics(path, diags: Sequence[LevelDiagnostics]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(DIAGNOSTICS_HEADER)
        w.writerows(diagnostics_rows(diags))
