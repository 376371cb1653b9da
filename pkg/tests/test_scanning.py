import numpy as np
import pytest
from hypothesis import given, strategies as st

from dbcforest.data import make_synthetic
from dbcforest.scanning import (default_window_sizes, extract_slices, fit_scanner,
                                fit_transform_scanner, slice_count, transform,
                                transformed_width)

import oracles


def test_digits_windows():
    assert default_window_sizes(64) == [16, 10, 8]
    assert [slice_count(64, w) for w in (16, 10, 8)] == [49, 55, 57]
    assert transformed_width(64, [16, 10, 8], 10) == 3220


@given(st.integers(1, 80), st.lists(st.integers(1, 80), min_size=1, max_size=4),
       st.integers(2, 10), st.integers(1, 4))
def test_width_formula(d, windows, C, stride):
    windows = [min(w, d) for w in windows]
    assert transformed_width(d, windows, C, stride) == oracles.scanned_width(d, windows, C, stride)


def test_slices_cover_consecutive_columns():
    X = np.arange(12.0).reshape(2, 6)
    S = extract_slices(X, 3)
    assert S.shape == (2, 4, 3)
    for i in range(4):
        assert np.array_equal(S[:, i], X[:, i:i + 3])
    assert np.array_equal(extract_slices(X, 3, stride=2)[:, 1], X[:, 2:5])


@pytest.fixture(scope="module")
def scanned():
    ds = make_synthetic(60, 12, 3, separation=2.0, seed=5)
    scanner, train = fit_transform_scanner(ds.features, ds.labels, 3, trees=4, seed=1)
    return ds, scanner, train


def test_output_layout(scanned):
    ds, scanner, train = scanned
    assert scanner.window_sizes == [3, 2, 1]
    assert train.shape == (60, scanner.output_width)
    assert scanner.output_width == oracles.scanned_width(12, [3, 2, 1], 3)
    out = transform(scanner, ds.features)
    assert out.shape == train.shape
    chunks = out.reshape(60, -1, 3)
    np.testing.assert_allclose(chunks.sum(-1), 1.0, atol=1e-9)
    np.testing.assert_allclose(out.reshape(60, -1, 6).sum(-1), 2.0, atol=1e-9)


def test_chunk_order_is_rf_then_crf_per_slice(scanned):
    ds, scanner, _ = scanned
    x = ds.features[:2]
    out = transform(scanner, x)
    w = scanner.window_sizes[0]
    pairs = scanner.forests[0]
    slice1 = x[:, 1:1 + w]
    rf = np.mean([p[0].predict_proba(slice1) for p in pairs], axis=0)
    crf = np.mean([p[1].predict_proba(slice1) for p in pairs], axis=0)
    np.testing.assert_allclose(out[:, 6:9], rf)
    np.testing.assert_allclose(out[:, 9:12], crf)


def test_constant_row_repeats_chunks(scanned):
    _, scanner, _ = scanned
    out = transform(scanner, np.full((1, 12), 0.3))
    first = out[0, :10 * 6].reshape(10, 6)
    assert np.all(first == first[0])


def test_full_width_window():
    ds = make_synthetic(30, 5, 2, seed=0)
    scanner = fit_scanner(ds.features, ds.labels, 2, window_sizes=[5], trees=2, folds=1)
    assert transform(scanner, ds.features).shape == (30, 4)


def test_determinism_and_folds():
    ds = make_synthetic(45, 8, 3, seed=2)
    a = fit_transform_scanner(ds.features, ds.labels, 3, trees=3, seed=9)
    b = fit_transform_scanner(ds.features, ds.labels, 3, trees=3, seed=9)
    assert np.array_equal(a[1], b[1])
    assert np.array_equal(transform(a[0], ds.features), transform(b[0], ds.features))
    assert a[0].folds == 3
    single = fit_scanner(ds.features, ds.labels, 3, trees=3, folds=1)
    assert single.folds == 1


def test_out_of_fold_training_features_differ_from_refit_scores():
    ds = make_synthetic(45, 8, 3, separation=0.5, seed=2)
    scanner, train = fit_transform_scanner(ds.features, ds.labels, 3, trees=3, seed=9)
    assert not np.allclose(train, transform(scanner, ds.features))


def test_errors():
    ds = make_synthetic(30, 6, 2, seed=0)
    with pytest.raises(ValueError, match="d >= 8"):
        fit_scanner(ds.features, ds.labels, 2)
    with pytest.raises(ValueError, match="window"):
        fit_scanner(ds.features, ds.labels, 2, window_sizes=[7])
    with pytest.raises(ValueError, match="window"):
        fit_scanner(ds.features, ds.labels, 2, window_sizes=[0])
    scanner = fit_scanner(ds.features, ds.labels, 2, window_sizes=[2], trees=1)
    with pytest.raises(ValueError, match="features"):
        transform(scanner, np.zeros((1, 5)))
