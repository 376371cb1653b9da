"""Prefix screening versus binning screening on twelve ranked instances.

Twelve instances are sorted by confidence. Instances at ranks 1, 2, 3, 4, 7
and 10 are predicted correctly, and the target accuracy is 0.7.

Prefix screening takes the lowest confidence whose top-k accuracy still
meets the target. Binning screening walks fixed-size bins from the top and
stops at the first bin whose accuracy falls below the target.
"""

import numpy as np

from dbcforest.screening import (bin_accuracies, bin_partition, binning_threshold,
                                 compare_thresholds, prefix_accuracies, prefix_threshold,
                                 rank_by_confidence)

correct = [1, 1, 1, 1, 0, 0, 1, 0, 0, 1, 0, 0]
conf = [0.99, 0.95, 0.92, 0.90, 0.85, 0.80, 0.78, 0.70, 0.65, 0.60, 0.55, 0.50]
ranked = rank_by_confidence(confidence=conf, correct=correct, ids=np.arange(1, 13))
TA = 0.7

print("rank  confidence  correct  top-k accuracy")
for k, (c, ok, acc) in enumerate(zip(ranked.confidence, ranked.correct,
                                     prefix_accuracies(ranked)), start=1):
    print(f"{k:>4}  {c:>10.2f}  {int(ok):>7}  {acc:>14.3f}")

pre = prefix_threshold(ranked, TA)
print(f"\nprefix gate {pre.gate} screens ranks {sorted(pre.screened.tolist())}")

print("\nbins of size 2:")
bins = bin_accuracies(bin_partition(ranked, 2), ranked)
first_fail = next(t for t, b in enumerate(bins, start=1) if b.accuracy < TA)
for t, b in enumerate(bins, start=1):
    flag = "  <- first bin below TA" if t == first_fail else ""
    print(f"  bin {t}: ranks {b.start + 1}-{b.end}  accuracy {b.accuracy:.2f}{flag}")

bn = binning_threshold(ranked, 2, TA)
print(f"binning gate {bn.gate} screens ranks {sorted(bn.screened.tolist())} "
      f"after inspecting {bn.bins_inspected} bins")

table = compare_thresholds(ranked, TA, 2)
print(f"\nscreened accuracy: prefix {table['prefix_accuracy']:.3f}, "
      f"binning {table['binning_accuracy']:.3f}")
print(f"incorrect instances admitted only by prefix screening: {table['mis_partitioned']}")
