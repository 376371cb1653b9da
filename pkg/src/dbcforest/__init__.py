"""Deep cascade forests with confidence screening.

A cascade of random and completely-random forests in which every level
freezes the predictions of instances it is confident about and forwards
the rest. Screening gates come either from prefix accuracies or from
fixed-size bins of confidence-ranked instances.
"""

from .bench import RunReport, builtin_dataset, cross_validate
from .cascade import (CascadeConfig, CascadeModel, LevelDiagnostics, fit, predict,
                      training_accuracy_curve)
from .data import DataError, Dataset, load_csv, make_synthetic, save_csv, stratified_folds
from .forest import Forest, Tree, train_forest, train_tree
from .level import CascadeLevel, augment_features, predict_level, train_level
from .persistence import ModelFormatError, load_model, save_model
from .scanning import MultiGrainScanner, fit_scanner, fit_transform_scanner, transform
from .screening import (binning_threshold, compare_thresholds, confidence,
                        prefix_threshold, rank_by_confidence, read_trace, route, screen,
                        write_trace)
from .stats import friedman_statistic, nemenyi_cd, paired_t_statistic

__version__ = "0.1.0"

__all__ = [
    "RunReport", "builtin_dataset", "cross_validate",
    "CascadeConfig", "CascadeModel", "LevelDiagnostics", "fit", "predict",
    "training_accuracy_curve",
    "DataError", "Dataset", "load_csv", "make_synthetic", "save_csv", "stratified_folds",
    "Forest", "Tree", "train_forest", "train_tree",
    "CascadeLevel", "augment_features", "predict_level", "train_level",
    "ModelFormatError", "load_model", "save_model",
    "MultiGrainScanner", "fit_scanner", "fit_transform_scanner", "transform",
    "binning_threshold", "compare_thresholds", "confidence", "prefix_threshold",
    "rank_by_confidence", "read_trace", "route", "screen", "write_trace",
    "friedman_statistic", "nemenyi_cd", "paired_t_statistic",
]
