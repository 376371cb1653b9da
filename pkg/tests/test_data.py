import numpy as np
import pytest
from hypothesis import given, strategies as st

from dbcforest.data import (DataError, Dataset, load_csv, make_synthetic, save_csv,
                            stratified_folds)
from dbcforest.forest import train_tree


def write(path, text):
    path.write_text(text, encoding="utf-8")
    return str(path)


def test_first_appearance_encoding(tmp_path):
    p = write(tmp_path / "d.csv", "1,2,a\n3,4,b\n5,6,a\n7,8,b\n")
    ds = load_csv(p)
    assert ds.n == 4 and ds.class_count == 2 and ds.feature_count == 2
    assert ds.labels.tolist() == [0, 1, 0, 1]
    assert ds.label_names == ("a", "b")
    assert ds.decode([1, 0]) == ["b", "a"]


def test_encoding_is_not_lexicographic(tmp_path):
    p = write(tmp_path / "d.csv", "1,zeta\n2,alpha\n3,zeta\n")
    assert load_csv(p).label_names == ("zeta", "alpha")


def test_label_column_by_name_and_index(tmp_path):
    p = write(tmp_path / "d.csv", "cls,x,y\nu,1,2\nv,3,4\n")
    by_name = load_csv(p, "cls", has_header=True)
    by_index = load_csv(p, 0, has_header=True)
    np.testing.assert_array_equal(by_name.features, [[1, 2], [3, 4]])
    np.testing.assert_array_equal(by_name.features, by_index.features)
    assert by_name.label_names == ("u", "v")


def test_iris_shape():
    from dbcforest.bench import builtin_dataset
    ds = builtin_dataset("iris")
    assert (ds.n, ds.feature_count, ds.class_count) == (150, 4, 3)


def test_nan_cell_is_named(tmp_path):
    p = write(tmp_path / "d.csv", "1,2,a\n3,NaN,b\n")
    with pytest.raises(DataError, match=r"line 2, column 1"):
        load_csv(p)


def test_non_numeric_cell_is_named(tmp_path):
    p = write(tmp_path / "d.csv", "1,2,a\n3,x,b\n")
    with pytest.raises(DataError, match=r"line 2, column 1.*'x'"):
        load_csv(p)


@pytest.mark.parametrize("text, message", [
    ("1,a\n2,a\n", "2 classes"),
    ("1,2,a\n3,b\n", "fields"),
])
def test_bad_files(tmp_path, text, message):
    with pytest.raises(DataError, match=message):
        load_csv(write(tmp_path / "d.csv", text))


def test_missing_file(tmp_path):
    with pytest.raises(DataError, match="no such file"):
        load_csv(str(tmp_path / "absent.csv"))


def test_unknown_label_when_classes_fixed(tmp_path):
    p = write(tmp_path / "d.csv", "1,a\n2,c\n")
    with pytest.raises(DataError, match="unknown label"):
        load_csv(p, classes=("a", "b"))


def test_dataset_invariants():
    with pytest.raises(DataError):
        Dataset(np.zeros((3, 2)), [0, 1], 2)
    with pytest.raises(DataError):
        Dataset(np.zeros((2, 2)), [0, 2], 2)
    with pytest.raises(DataError):
        Dataset(np.array([[np.inf], [0.0]]), [0, 1], 2)
    with pytest.raises(DataError):
        Dataset(np.zeros((2, 1)), [0, 0], 1)
    ds = Dataset(np.zeros((2, 1)), [0, 1], 2)
    with pytest.raises(ValueError):
        ds.features[0, 0] = 1.0


@given(st.integers(2, 40), st.integers(1, 5), st.integers(2, 4), st.integers(0, 2**31))
def test_csv_round_trip_bit_exact(tmp_path_factory, n, d, C, seed):
    n = max(n, C)
    rng = np.random.default_rng(seed)
    ds = make_synthetic(n, d, C, separation=rng.uniform(0, 5), seed=seed)
    path = tmp_path_factory.mktemp("rt") / "d.csv"
    save_csv(ds, path, header=bool(seed % 2))
    back = load_csv(path, has_header=bool(seed % 2), classes=ds.label_names)
    assert np.array_equal(back.features, ds.features)
    assert np.array_equal(back.labels, ds.labels)


def test_folds_forced_stratification():
    fa = stratified_folds(np.array([0, 0, 0, 1, 1, 1]), 3, seed=5)
    y = np.array([0, 0, 0, 1, 1, 1])
    for f in range(3):
        assert sorted(y[fa.test_rows(f)].tolist()) == [0, 1]


def test_iris_folds_have_ten_per_class():
    from dbcforest.bench import builtin_dataset
    ds = builtin_dataset("iris")
    fa = stratified_folds(ds, 5, seed=0)
    hist = np.zeros((5, 3), dtype=int)
    for i, f in enumerate(fa.fold_of):
        hist[f, ds.labels[i]] += 1
    assert (hist == 10).all()


@given(st.lists(st.integers(0, 4), min_size=2, max_size=80), st.integers(2, 6),
       st.integers(0, 2**32 - 1))
def test_folds_partition_and_balance(labels, F, seed):
    y = np.array(labels)
    if y.size < F:
        with pytest.raises(DataError):
            stratified_folds(y, F, seed)
        return
    fa = stratified_folds(y, F, seed)
    assert fa.fold_of.shape == y.shape and set(fa.fold_of.tolist()) <= set(range(F))
    seen = np.concatenate([fa.test_rows(f) for f in range(F)])
    assert sorted(seen.tolist()) == list(range(y.size))
    for c in np.unique(y):
        per_fold = np.bincount(fa.fold_of[y == c], minlength=F)
        assert per_fold.max() - per_fold.min() <= 1
        if (y == c).sum() >= F:
            assert (per_fold > 0).all()
    sizes = np.bincount(fa.fold_of, minlength=F)
    assert sizes.max() - sizes.min() <= 1
    assert np.array_equal(stratified_folds(y, F, seed).fold_of, fa.fold_of)


def test_folds_errors():
    with pytest.raises(DataError):
        stratified_folds(np.array([0, 1]), 1, 0)
    with pytest.raises(DataError):
        stratified_folds(np.array([0, 1]), 3, 0)


def test_synthetic_balance_and_reproducibility():
    ds = make_synthetic(100, 3, 4, seed=7)
    assert np.bincount(ds.labels).tolist() == [25, 25, 25, 25]
    again = make_synthetic(100, 3, 4, seed=7)
    assert np.array_equal(ds.features, again.features)
    assert np.array_equal(ds.labels, again.labels)


def test_synthetic_separable_blobs_fit_exactly():
    ds = make_synthetic(30, 2, 3, separation=10.0, seed=0)
    tree = train_tree(ds.features, ds.labels, 3)
    assert np.mean(tree.predict_proba(ds.features).argmax(1) == ds.labels) == 1.0


def test_synthetic_zero_separation_is_chance():
    from dbcforest.forest import train_forest
    train = make_synthetic(600, 2, 3, separation=0.0, seed=1)
    test = make_synthetic(3000, 2, 3, separation=0.0, seed=2)
    f = train_forest(train.features, train.labels, 3, tree_count=20, seed=0)
    acc = np.mean(f.predict(test.features) == test.labels)
    assert abs(acc - 1 / 3) < 0.05


def test_synthetic_preconditions():
    with pytest.raises(DataError):
        make_synthetic(2, 2, 3)
    with pytest.raises(DataError):
        make_synthetic(10, 0, 2)
