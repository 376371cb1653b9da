"""Grow a screened cascade on IRIS and follow instances through it.

Each level reports how many instances entered it, its out-of-fold
accuracy, the cumulative training accuracy and the gate it chose. At
prediction time every row leaves at the first level whose gate its
confidence meets.
"""

import numpy as np

from dbcforest import CascadeConfig, builtin_dataset, fit, predict, stratified_folds
from dbcforest.cascade import training_accuracy_curve

ds = builtin_dataset("iris")
train_rows, test_rows = next(iter(stratified_folds(ds, 5, seed=0)))
train, test = ds.subset(train_rows), ds.subset(test_rows)

for strategy in ("none", "prefix", "binning"):
    model, diags = fit(train, CascadeConfig(strategy=strategy, bin_size=20, seed=1))
    print(f"\nstrategy={strategy}: {model.depth} level(s)")
    print("level  remaining  oof acc  cumulative  TA      gate")
    for d in diags:
        gate = "NONE" if d.gate is None else f"{d.gate:.3f}"
        print(f"{d.level:>5}  {d.remaining_count:>9}  {d.out_of_fold_accuracy:>7.3f}  "
              f"{d.cumulative_accuracy:>10.3f}  {d.target_accuracy:.3f}  {gate}")
    classes, exit_level = predict(model, test.features)
    print(f"test accuracy {np.mean(classes == test.labels):.3f}, "
          f"exit levels {np.bincount(exit_level)[1:].tolist()}")

print("\n(level, remaining, cumulative accuracy):", training_accuracy_curve(diags))
