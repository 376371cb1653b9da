"""JSON model files.

Every tree is written as its pre-order node arrays. Floats go through
``repr`` so a saved model predicts bit-identically after loading. Paths
ending in ``.gz`` are gzip-compressed.
"""

from __future__ import annotations

import gzip
import json
from typing import Any, Dict

import numpy as np

from .cascade import CascadeConfig, CascadeModel
from .forest import Forest, Tree
from .level import CascadeLevel
from .scanning import MultiGrainScanner

FORMAT = "dbcforest-model"
VERSION = 1


class ModelFormatError(ValueError):
    pass


def _tree_to_dict(t: Tree) -> Dict[str, Any]:
    return {
        "feature": t.feature.tolist(),
        "threshold": t.threshold.tolist(),
        "left": t.left.tolist(),
        "right": t.right.tolist(),
        "value_index": t.value_index.tolist(),
        "distributions": t.distributions.tolist(),
    }


def _tree_from_dict(d) -> Tree:
    C = len(d["distributions"][0])
    return Tree(np.array(d["feature"], dtype=np.int32),
                np.array(d["threshold"], dtype=np.float64),
                np.array(d["left"], dtype=np.int32),
                np.array(d["right"], dtype=np.int32),
                np.array(d["value_index"], dtype=np.int32),
                np.array(d["distributions"], dtype=np.float64).reshape(-1, C))


def _forest_to_dict(f: Forest):
    return {"kind": f.kind, "class_count": f.class_count,
            "feature_count": f.feature_count,
            "trees": [_tree_to_dict(t) for t in f.trees]}


def _forest_from_dict(d) -> Forest:
    forest = Forest([_tree_from_dict(t) for t in d["trees"]], d["kind"],
                    d["class_count"], d["feature_count"])
    forest._pack()
    return forest


def model_to_dict(model: CascadeModel) -> Dict[str, Any]:
    scanner = None
    if model.scanner is not None:
        s = model.scanner
        scanner = {
            "window_sizes": s.window_sizes, "feature_count": s.feature_count,
            "class_count": s.class_count, "stride": s.stride, "trees": s.trees,
            "forests": [[[_forest_to_dict(rf), _forest_to_dict(crf)] for rf, crf in pairs]
                        for pairs in s.forests],
        }
    return {
        "format": FORMAT,
        "version": VERSION,
        "config": model.config.to_dict(),
        "feature_count": model.feature_count,
        "class_count": model.class_count,
        "label_names": list(model.label_names),
        "scanner": scanner,
        "levels": [{
            "level": lvl.level_index,
            "gate": gate,
            "rf": [_forest_to_dict(f) for f in lvl.rf_fold_models],
            "crf": [_forest_to_dict(f) for f in lvl.crf_fold_models],
        } for lvl, gate in zip(model.levels, model.gates)],
    }


def model_from_dict(d: Dict[str, Any]) -> CascadeModel:
    if d.get("format") != FORMAT:
        raise ModelFormatError("not a dbcforest model file")
    if d.get("version") != VERSION:
        raise ModelFormatError(f"unsupported model file version {d.get('version')!r} "
                               f"(expected {VERSION})")
    scanner = None
    if d["scanner"] is not None:
        s = d["scanner"]
        scanner = MultiGrainScanner(list(s["window_sizes"]), s["feature_count"],
                                    s["class_count"], s["stride"], s["trees"])
        scanner.forests = [[(_forest_from_dict(rf), _forest_from_dict(crf)) for rf, crf in pairs]
                           for pairs in s["forests"]]
    levels = [CascadeLevel([_forest_from_dict(f) for f in lv["rf"]],
                           [_forest_from_dict(f) for f in lv["crf"]], None, lv["level"])
              for lv in d["levels"]]
    gates = [lv["gate"] for lv in d["levels"]]
    return CascadeModel(levels, gates, CascadeConfig(**d["config"]), d["feature_count"],
                        d["class_count"], tuple(d["label_names"]), scanner)


def _open(path, mode):
    if str(path).endswith(".gz"):
        return gzip.open(path, mode + "t", encoding="utf-8")
    return open(path, mode, encoding="utf-8")


def save_model(model: CascadeModel, path) -> None:
    with _open(path, "w") as fh:
        json.dump(model_to_dict(model), fh, separators=(",", ":"))


def load_model(path) -> CascadeModel:
    try:
        with _open(path, "r") as fh:
            d = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ModelFormatError(f"cannot read model file {path}: {exc}") from exc
    return model_from_dict(d)
