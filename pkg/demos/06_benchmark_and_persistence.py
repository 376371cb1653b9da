"""Cross-validate the three strategies side by side, then save and reload a model.

All strategies see the same folds and seeds, so their accuracies and
training times can be compared directly. Saved models are JSON and
predict bit-identically after loading.
"""

import os
import tempfile

import numpy as np

from dbcforest import (CascadeConfig, builtin_dataset, cross_validate, fit, load_model,
                       predict, save_model)
from dbcforest.bench import comparison_table

ds = builtin_dataset("synthetic")
reports = cross_validate(ds, CascadeConfig(trees_per_forest=20), cv=5, seed=0,
                         strategies=["gcforest", "gccs", "dbc"], dataset_name="synthetic")
print(comparison_table(reports))
print("\nfold accuracies of dbc:", [round(a, 2) for a in reports["binning"].fold_accuracies])

model, _ = fit(ds, CascadeConfig(trees_per_forest=20))
path = os.path.join(tempfile.mkdtemp(), "model.json.gz")
save_model(model, path)
back = load_model(path)
same = all(np.array_equal(a, b) for a, b in zip(predict(model, ds.features, True),
                                                predict(back, ds.features, True)))
print(f"\nsaved {os.path.getsize(path)} bytes to {path}; identical predictions after load: {same}")
