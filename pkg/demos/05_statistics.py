"""Paired t statistics, the Friedman test and the Nemenyi critical difference.

The accuracy grid below is the published comparison of seven models on
nine datasets. The fold accuracies are those of two models on LETTER.
"""

import numpy as np

from dbcforest.stats import (AccuracyTable, F_CRITICAL, T_CRITICAL, friedman_statistic,
                             nemenyi_cd, paired_t_statistic)

models = ["XGBoost", "LightGBM", "mgrForest", "AWDF", "gcForest", "gcForestcs", "DBC-Forest"]
grid = {
    "MNIST": [97.75, 97.58, 97.61, 98.89, 98.77, 98.36, 99.03],
    "DIGITS": [96.83, 97.66, 95.54, 98.23, 97.72, 97.38, 97.88],
    "EMNIST": [81.05, 66.45, 81.41, 86.74, 86.55, 87.24, 87.32],
    "FASHION-MNIST": [90.30, 90.07, 87.71, 89.89, 89.99, 89.94, 90.57],
    "ADULT": [87.05, 87.45, 85.35, 85.86, 85.99, 86.04, 86.11],
    "BANK": [91.48, 91.77, 91.41, 91.45, 91.43, 91.53, 91.62],
    "YEAST": [59.63, 57.40, 58.55, 62.53, 62.06, 62.00, 62.13],
    "LETTER": [96.30, 96.73, 92.18, 96.65, 97.02, 96.83, 97.07],
    "IMDB": [86.43, 86.56, 83.20, 88.94, 88.81, 88.88, 89.39],
}
table = AccuracyTable(models, list(grid), np.array(list(grid.values())))

letter = {"DBC-Forest": [97.33, 96.97, 96.72, 97.33, 97.00],
          "gcForestcs": [97.22, 96.60, 96.47, 97.03, 96.83],
          "gcForest": [97.12, 97.00, 96.62, 97.28, 97.10]}
for other in ("gcForestcs", "gcForest"):
    t = paired_t_statistic(letter["DBC-Forest"], letter[other])
    verdict = "differ" if t > T_CRITICAL else "no significant difference"
    print(f"LETTER, DBC-Forest vs {other}: t = {t:.3f} -> {verdict}")

ranks = table.ranks().mean(axis=0)
print("\nmean ranks:", ", ".join(f"{m} {r:.2f}" for m, r in zip(models, ranks)))
F = friedman_statistic(table)
print(f"Friedman statistic {F:.3f} vs critical {F_CRITICAL}: "
      f"{'reject' if F > F_CRITICAL else 'accept'} equal performance")
cd = nemenyi_cd(len(models), len(grid))
best = models[int(ranks.argmin())]
beaten = [m for m, r in zip(models, ranks) if r - ranks.min() > cd]
print(f"Nemenyi CD {cd:.3f}: {best} is significantly better than {', '.join(beaten)}")
