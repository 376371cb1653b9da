from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dbcforest.data import make_synthetic
from dbcforest.forest import (COMPLETELY_RANDOM, RANDOM, Forest, Tree, gini_impurity,
                              predict_proba, train_forest, train_tree, tree_seeds)

from oracles import gini, tree_leaf


@pytest.mark.parametrize("counts, expected", [((5, 0), 0.0), ((2, 2), 0.5),
                                              ((1, 1, 1, 1), 0.75)])
def test_gini_examples(counts, expected):
    assert gini_impurity(counts) == pytest.approx(expected, abs=1e-15)


@given(st.lists(st.integers(0, 50), min_size=1, max_size=8).filter(lambda c: sum(c) > 0))
def test_gini_matches_oracle(counts):
    assert gini_impurity(counts) == pytest.approx(gini(counts), abs=1e-12)


def test_gini_errors():
    with pytest.raises(ValueError):
        gini_impurity([0, 0])
    with pytest.raises(ValueError):
        gini_impurity([1, -1])


def test_unique_gap_split():
    X = np.array([[0.0], [1.0], [10.0], [11.0]])
    t = train_tree(X, [0, 0, 1, 1], 2)
    assert t.feature[0] == 0 and 1.0 < t.threshold[0] < 10.0
    assert t.threshold[0] == 5.5
    assert (t.predict_proba(X).argmax(1) == [0, 0, 1, 1]).all()


@pytest.mark.parametrize("kind", [RANDOM, COMPLETELY_RANDOM])
def test_single_row_is_one_hot_leaf(kind):
    t = train_tree(np.array([[3.0, 4.0]]), [1], 3, kind=kind)
    assert t.node_count == 1 and t.is_leaf[0]
    assert t.leaf_distribution(0).tolist() == [0.0, 1.0, 0.0]


@pytest.mark.parametrize("kind", [RANDOM, COMPLETELY_RANDOM])
def test_separable_blobs_fit_exactly(kind):
    ds = make_synthetic(200, 4, 5, separation=10.0, seed=3)
    t = train_tree(ds.features, ds.labels, 5, kind=kind, seed=1)
    assert np.all(t.predict_proba(ds.features).argmax(1) == ds.labels)


def _unique_rows(X, y):
    _, keep = np.unique(X, axis=0, return_index=True)
    return X[keep], y[keep]


@given(st.integers(0, 2**32 - 1), st.integers(1, 60), st.integers(1, 4), st.integers(2, 4),
       st.sampled_from([RANDOM, COMPLETELY_RANDOM]))
def test_unlimited_depth_fits_any_consistent_data(seed, n, d, C, kind):
    rng = np.random.default_rng(seed)
    X, y = _unique_rows(rng.integers(0, 4, (n, d)).astype(float), rng.integers(0, C, n))
    t = train_tree(X, y, C, kind=kind, seed=seed)
    assert np.array_equal(t.predict_proba(X).argmax(1), y)
    dist = t.distributions[t.value_index[t.is_leaf]]
    assert np.all(dist >= 0) and np.allclose(dist.sum(1), 1.0, atol=1e-9)


@pytest.mark.parametrize("kind", [RANDOM, COMPLETELY_RANDOM])
@pytest.mark.parametrize("n", [1, 2])
def test_fewer_rows_than_classes_gives_a_pure_leaf_for_every_label(n, kind):
    C = 4
    for label in range(C):
        X = np.arange(n, dtype=float).reshape(n, 1)
        y = np.full(n, label)
        t = train_tree(X, y, C, kind=kind, seed=label)
        assert t.distributions.shape[0] >= C
        np.testing.assert_array_equal(t.predict_proba(X), np.eye(C)[y])

def _exact_best_splits(X, y, C):
    """All (feature, threshold) with the exactly minimal weighted Gini impurity."""
    n = len(y)
    best, argbest = None, []
    for f in range(X.shape[1]):
        vals = np.unique(X[:, f])
        for a, b in zip(vals[:-1], vals[1:]):
            thr = a + (b - a) / 2.0
            left = X[:, f] < thr
            score = Fraction(0)
            for side in (left, ~left):
                counts = np.bincount(y[side], minlength=C)
                m = int(side.sum())
                score += Fraction(m, n) * (1 - sum(Fraction(int(c), m) ** 2 for c in counts))
            if best is None or score < best:
                best, argbest = score, [(f, thr)]
            elif score == best:
                argbest.append((f, thr))
    return argbest


@given(st.integers(0, 2**32 - 1), st.integers(2, 40), st.integers(1, 4), st.integers(2, 3))
def test_root_split_is_gini_optimal(seed, n, d, C):
    rng = np.random.default_rng(seed)
    X = rng.integers(0, 5, (n, d)).astype(float)
    y = rng.integers(0, C, n)
    t = train_tree(X, y, C, kind=RANDOM, max_features=d, seed=seed)
    best = _exact_best_splits(X, y, C)
    if not best or len(np.unique(y)) == 1:
        assert t.node_count == 1
        return
    # lowest feature index first, then lowest threshold
    assert (int(t.feature[0]), float(t.threshold[0])) == min(best)


@given(st.integers(0, 2**32 - 1), st.integers(2, 30), st.integers(1, 3))
def test_completely_random_ignores_labels(seed, n, d):
    # with all-distinct labels no node is pure before it holds one row, so
    # any label permutation must leave the fitted structure untouched
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, d))
    y = np.arange(n)
    t1 = train_tree(X, y, n, kind=COMPLETELY_RANDOM, seed=seed)
    t2 = train_tree(X, rng.permutation(y), n, kind=COMPLETELY_RANDOM, seed=seed)
    for name in ("feature", "threshold", "left", "right"):
        assert np.array_equal(getattr(t1, name), getattr(t2, name))


@given(st.integers(0, 2**32 - 1), st.integers(1, 50))
def test_random_thresholds_lie_inside_node_range(seed, n):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, 2))
    t = train_tree(X, rng.integers(0, 2, n), 2, kind=COMPLETELY_RANDOM, seed=seed)
    lo, hi = X.min(0), X.max(0)
    inner = ~t.is_leaf
    assert np.all(t.threshold[inner] > lo[t.feature[inner]])
    assert np.all(t.threshold[inner] <= hi[t.feature[inner]])


@given(st.integers(0, 2**32 - 1))
def test_routing_matches_manual_descent(seed):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(40, 3))
    t = train_tree(X, rng.integers(0, 3, 40), 3, kind=RANDOM, seed=seed)
    probe = np.vstack([X, rng.normal(size=(20, 3))])
    assert t.apply(probe).tolist() == [tree_leaf(t, x) for x in probe]


def test_max_depth_caps_tree():
    ds = make_synthetic(300, 3, 3, separation=1.0, seed=0)
    t = train_tree(ds.features, ds.labels, 3, max_depth=2)
    assert t.depth() <= 2


def test_forest_size_and_determinism():
    train = make_synthetic(120, 3, 3, separation=4.0, seed=1)
    test = make_synthetic(60, 3, 3, separation=4.0, seed=2)
    for kind in (RANDOM, COMPLETELY_RANDOM):
        f1 = train_forest(train.features, train.labels, 3, kind=kind, tree_count=50, seed=9)
        f2 = train_forest(train.features, train.labels, 3, kind=kind, tree_count=50, seed=9)
        assert f1.tree_count == 50 and f1.kind == kind
        assert all(t.class_count == 3 for t in f1.trees)
        assert np.array_equal(f1.predict_proba(test.features), f2.predict_proba(test.features))


def test_one_tree_completely_random_forest_is_a_tree():
    ds = make_synthetic(50, 3, 2, separation=2.0, seed=4)
    f = train_forest(ds.features, ds.labels, 2, kind=COMPLETELY_RANDOM, tree_count=1, seed=11)
    t = train_tree(ds.features, ds.labels, 2, kind=COMPLETELY_RANDOM,
                   seed=int(tree_seeds(11, 1)[0]))
    assert np.array_equal(f.trees[0].feature, t.feature)
    assert np.array_equal(f.trees[0].threshold, t.threshold)
    probe = np.random.default_rng(0).normal(size=(30, 3))
    assert np.array_equal(f.predict_proba(probe), t.predict_proba(probe))


def _leaf_tree(dist):
    return Tree(np.array([-1], np.int32), np.zeros(1), np.array([-1], np.int32),
                np.array([-1], np.int32), np.array([0], np.int32), np.array([dist], float))


def test_mean_of_identical_leaves():
    f = Forest([_leaf_tree([0.6, 0.3, 0.1]) for _ in range(4)], RANDOM, 3, 2)
    np.testing.assert_allclose(predict_proba(f, [[0.0, 0.0]]), [[0.6, 0.3, 0.1]], atol=1e-15)


def test_mean_of_opposite_votes():
    f = Forest([_leaf_tree([1.0, 0.0]), _leaf_tree([0.0, 1.0])], RANDOM, 2, 1)
    assert predict_proba(f, [[5.0]]).tolist() == [[0.5, 0.5]]


def test_dimension_mismatch():
    ds = make_synthetic(20, 3, 2, seed=0)
    f = train_forest(ds.features, ds.labels, 2, tree_count=2)
    with pytest.raises(ValueError, match="features"):
        f.predict_proba(np.zeros((1, 4)))


def test_forest_generalizes_on_blobs():
    train = make_synthetic(300, 4, 3, separation=10.0, seed=5)
    fresh = make_synthetic(500, 4, 3, separation=10.0, seed=6)
    f = train_forest(train.features, train.labels, 3, tree_count=50, seed=0)
    assert np.mean(f.predict(fresh.features) == fresh.labels) >= 0.95


@given(st.integers(0, 2**32 - 1), st.sampled_from([RANDOM, COMPLETELY_RANDOM]),
       st.integers(1, 6))
def test_forest_outputs_are_distributions(seed, kind, trees):
    rng = np.random.default_rng(seed)
    n, d, C = int(rng.integers(2, 40)), int(rng.integers(1, 4)), int(rng.integers(2, 5))
    X = rng.normal(size=(n, d))
    f = train_forest(X, rng.integers(0, C, n), C, kind=kind, tree_count=trees, seed=seed)
    P = f.predict_proba(rng.normal(scale=3, size=(25, d)))
    assert P.shape == (25, C) and np.all(P >= 0)
    np.testing.assert_allclose(P.sum(1), 1.0, atol=1e-9)
