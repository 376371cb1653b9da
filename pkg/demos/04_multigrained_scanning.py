"""Multi-grained scanning turns each 64-pixel digit into 3220 features.

Windows of 16, 10 and 8 pixels slide over the flattened image. Every slice
is scored by a random forest and a completely-random forest, and the
class vectors of all slices are concatenated.
"""

import numpy as np

from dbcforest import builtin_dataset, fit_transform_scanner, transform
from dbcforest.scanning import default_window_sizes, slice_count, transformed_width

ds = builtin_dataset("digits")
d, C = ds.feature_count, ds.class_count
windows = default_window_sizes(d)
print(f"d={d}, windows={windows}, slices per row={[slice_count(d, w) for w in windows]}")
print(f"transformed width = {transformed_width(d, windows, C)}")

sub = ds.subset(np.arange(300))
scanner, train_features = fit_transform_scanner(sub.features, sub.labels, C, trees=5, seed=0)
print(f"out-of-fold training features: {train_features.shape}")

fresh = transform(scanner, ds.features[300:305])
chunks = fresh.reshape(5, -1, C)
print(f"every class-vector chunk sums to 1: {np.allclose(chunks.sum(-1), 1.0)}")
first_window = fresh[:, :slice_count(d, 16) * 2 * C].reshape(5, -1, 2 * C)
votes = first_window[:, :, :C].argmax(-1)
print("most common slice vote of the 16-pixel window per row:",
      [int(np.bincount(v, minlength=C).argmax()) for v in votes],
      "true labels:", ds.labels[300:305].tolist())
