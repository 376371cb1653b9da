"""Where do the two gates land on a real confidence ranking?

Train the first cascade level on DIGITS (raw pixels, no scanning), keep
its out-of-fold confidence trace and compare both screening rules across
a range of target accuracies. The trace is also written in the format
that ``dbcforest analyze`` reads.
"""

import os
import tempfile

from dbcforest import CascadeConfig, builtin_dataset, fit
from dbcforest.screening import compare_thresholds, read_trace, write_trace

ds = builtin_dataset("digits")
states = []
fit(ds, CascadeConfig(max_levels=1, trees_per_forest=20), callback=states.append)
ranked = states[0].ranked
print(f"level-1 out-of-fold accuracy {ranked.correct.mean():.4f} on {len(ranked)} rows")

path = os.path.join(tempfile.mkdtemp(), "digits_trace.csv")
write_trace(path, ranked)
ranked = read_trace(path)
print(f"trace written to {path}\n")

print("   TA   prefix gate  screened  acc      binning gate  screened  acc     mis")
for ta in (0.90, 0.95, 0.97, 0.98, 0.99, 0.995):
    t = compare_thresholds(ranked, ta, 100)
    fmt = lambda g: "NONE" if g is None else f"{g:.3f}"
    print(f"{ta:>6.3f}  {fmt(t['prefix_gate']):>10}  {t['prefix_screened']:>8}  "
          f"{t['prefix_accuracy']:.4f}   {fmt(t['binning_gate']):>10}  "
          f"{t['binning_screened']:>8}  {t['binning_accuracy']:.4f}  {t['mis_partitioned']:>4}")
