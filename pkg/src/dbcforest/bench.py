"""Cross-validation harness and run reports."""

from __future__ import annotations

import dataclasses
import json
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from .cascade import (CascadeConfig, LevelDiagnostics, fit, predict, resolve_strategy,
                      scan_dataset)
from .data import Dataset, make_synthetic, stratified_folds


@dataclass
class FoldResult:
    fold: int
    accuracy: float                 # percent
    levels: int
    mean_exit_level: float
    diagnostics: List[LevelDiagnostics]
    scan_seconds: float = field(default=0.0, compare=False)
    cascade_seconds: float = field(default=0.0, compare=False)

    @property
    def train_seconds(self) -> float:
        return self.scan_seconds + self.cascade_seconds


@dataclass
class RunReport:
    dataset: str
    config: dict
    seed: int
    folds: List[FoldResult]

    @property
    def fold_accuracies(self) -> List[float]:
        return [f.accuracy for f in self.folds]

    @property
    def mean(self) -> float:
        return float(np.mean(self.fold_accuracies))

    @property
    def std(self) -> float:
        """Sample standard deviation over folds (the +/- in result tables)."""
        acc = self.fold_accuracies
        return float(np.std(acc, ddof=1)) if len(acc) > 1 else 0.0

    @property
    def train_seconds(self) -> float:
        return sum(f.train_seconds for f in self.folds)

    @property
    def cascade_seconds(self) -> float:
        return sum(f.cascade_seconds for f in self.folds)

    @property
    def mean_exit_level(self) -> float:
        return float(np.mean([f.mean_exit_level for f in self.folds]))

    def summary(self) -> str:
        return f"{self.mean:.2f}±{self.std:.2f}"

    def to_dict(self, timing: bool = False) -> dict:
        """Plain-data form. Timings are left out unless asked for, so that
        reports of the same seeded run compare byte for byte."""
        folds = []
        for f in self.folds:
            entry = {
                "fold": f.fold,
                "accuracy": f.accuracy,
                "levels": f.levels,
                "mean_exit_level": f.mean_exit_level,
                "diagnostics": [_diag_dict(d) for d in f.diagnostics],
            }
            if timing:
                entry["scan_seconds"] = f.scan_seconds
                entry["cascade_seconds"] = f.cascade_seconds
                entry["train_seconds"] = f.train_seconds
            folds.append(entry)
        out = {
            "dataset": self.dataset,
            "strategy": self.config["strategy"],
            "seed": self.seed,
            "config": self.config,
            "fold_accuracies": self.fold_accuracies,
            "mean": self.mean,
            "std": self.std,
            "mean_exit_level": self.mean_exit_level,
            "folds": folds,
        }
        if timing:
            out["train_seconds"] = self.train_seconds
            out["cascade_seconds"] = self.cascade_seconds
        return out

    def to_json(self, timing: bool = False) -> str:
        return json.dumps(self.to_dict(timing), indent=2, sort_keys=True)

    def timing_dict(self) -> dict:
        return {
            "train_seconds": self.train_seconds,
            "cascade_seconds": self.cascade_seconds,
            "folds": [{"fold": f.fold, "scan_seconds": f.scan_seconds,
                       "cascade_seconds": f.cascade_seconds,
                       "level_seconds": [d.seconds for d in f.diagnostics]}
                      for f in self.folds],
        }


def _diag_dict(d: LevelDiagnostics) -> dict:
    out = dataclasses.asdict(d)
    out.pop("seconds")
    return out


def fold_seed(seed: int, fold: int) -> int:
    return int(np.random.SeedSequence([int(seed), int(fold)]).generate_state(1)[0])


def cross_validate(ds: Dataset, config: Optional[CascadeConfig] = None, cv: int = 5,
                   seed: int = 0, strategies: Optional[Sequence[str]] = None,
                   dataset_name: str = "data") -> Dict[str, RunReport]:
    """Stratified ``cv``-fold evaluation of one or more screening strategies.

    All strategies see the same folds and fold seeds; when scanning is on,
    the scanner of each fold is fitted once and shared between strategies
    (its cost is charged to every strategy's ``scan_seconds``).
    """
    config = config or CascadeConfig()
    names = [resolve_strategy(s) for s in (strategies or [config.strategy])]
    folds = stratified_folds(ds, cv, seed)
    results: Dict[str, List[FoldResult]] = {s: [] for s in names}
    for k, (train_rows, test_rows) in enumerate(folds):
        train, test = ds.subset(train_rows), ds.subset(test_rows)
        base = dataclasses.replace(config, seed=fold_seed(seed, k))
        scanned, scan_seconds = None, 0.0
        if base.scan:
            t0 = time.perf_counter()
            scanned = scan_dataset(train, base)
            scan_seconds = time.perf_counter() - t0
        for s in names:
            cfg = dataclasses.replace(base, strategy=s)
            t0 = time.perf_counter()
            model, diags = fit(train, cfg, scanned=scanned)
            cascade_seconds = time.perf_counter() - t0
            pred, exit_level = predict(model, test.features)
            acc = 100.0 * float(np.mean(pred == test.labels))
            results[s].append(FoldResult(k, acc, model.depth, float(exit_level.mean()),
                                         diags, scan_seconds, cascade_seconds))
    cfg_dict = config.to_dict()
    return {s: RunReport(dataset_name, {**cfg_dict, "strategy": s}, seed, results[s])
            for s in names}


def builtin_dataset(name: str, seed: int = 0) -> Dataset:
    """``digits`` and ``iris`` (bundled with scikit-learn) or ``synthetic`` blobs."""
    name = name.lower()
    if name == "synthetic":
        return make_synthetic(600, 8, 4, separation=3.0, seed=seed)
    try:
        from sklearn import datasets
    except ImportError as exc:  # pragma: no cover
        raise RuntimeError(f"dataset {name!r} needs scikit-learn installed") from exc
    loaders = {"digits": datasets.load_digits, "iris": datasets.load_iris}
    if name not in loaders:
        raise ValueError(f"unknown builtin dataset {name!r}; choose from "
                         f"{sorted(loaders) + ['synthetic']}")
    bunch = loaders[name]()
    names = tuple(str(t) for t in bunch.target_names)
    return Dataset(bunch.data, bunch.target, len(names), names)


def comparison_table(reports: Dict[str, RunReport]) -> str:
    lines = [f"{'strategy':<10} {'accuracy':>14} {'levels':>7} {'exit':>6} {'cascade s':>10}"]
    for s, r in reports.items():
        lines.append(f"{s:<10} {r.summary():>14} "
                     f"{np.mean([f.levels for f in r.folds]):>7.2f} "
                     f"{r.mean_exit_level:>6.2f} {r.cascade_seconds:>10.2f}")
    return "\n".join(lines)
