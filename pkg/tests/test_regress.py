import numpy as np
import pytest

from sevrank.features import SparseVector, sparse_vector
from sevrank.regress import (
    RidgeModel,
    fit_ridge,
    load_ridge,
    predict,
    predict_many,
    ridge_objective,
    save_ridge,
)


def dense_rows(matrix):
    """Turn a dense array into the sparse row vectors fit_ridge consumes."""
    rows = []
    dim = matrix.shape[1]
    for row in matrix:
        idx = np.flatnonzero(row)
        rows.append(sparse_vector(idx, row[idx], dim))
    return rows


def oracle_solve(matrix, y, alpha):
    """Closed-form solve of (X^T X + alpha I) w = X^T (y - mean(y))."""
    y = np.asarray(y, dtype=float)
    yc = y - y.mean()
    d = matrix.shape[1]
    return np.linalg.solve(matrix.T @ matrix + alpha * np.eye(d), matrix.T @ yc)


SINGLE_FEATURE = np.array([[1.0], [2.0], [3.0]])


class TestFitRidge:
    def test_small_alpha_limit(self):
        # with only y centered the limit weight is sum(x*(y-2))/sum(x^2) = 1/7
        model = fit_ridge(dense_rows(SINGLE_FEATURE), [1.0, 2.0, 3.0], alpha=1e-10)
        assert model.intercept == pytest.approx(2.0)
        assert model.weights[0] == pytest.approx(2.0 / 14.0, abs=1e-9)

    def test_large_alpha_limit(self):
        model = fit_ridge(dense_rows(SINGLE_FEATURE), [1.0, 2.0, 3.0], alpha=1e12)
        assert model.weights[0] == pytest.approx(0.0, abs=1e-9)
        preds = predict_many(model, dense_rows(SINGLE_FEATURE))
        np.testing.assert_allclose(preds, 2.0, atol=1e-9)

    def test_alpha_one_closed_form(self):
        # centered y = [-1, 0, 1], X uncentered: w = (-1 + 0 + 3)/(14 + 1)
        model = fit_ridge(dense_rows(SINGLE_FEATURE), [1.0, 2.0, 3.0], alpha=1.0)
        assert model.weights[0] == pytest.approx(2.0 / 15.0, abs=1e-12)
        assert model.intercept == pytest.approx(2.0)

    def test_matches_dense_oracle(self):
        rng = np.random.default_rng(42)
        for trial in range(100):
            n = int(rng.integers(1, 11))
            d = int(rng.integers(1, 11))
            X = rng.normal(size=(n, d))
            X[rng.random(size=X.shape) < 0.3] = 0.0
            y = rng.normal(size=n)
            alpha = float(rng.choice([0.1, 1.0, 10.0]))
            model = fit_ridge(dense_rows(X), y, alpha=alpha, tol=1e-12, max_iter=2000)
            np.testing.assert_allclose(
                model.weights, oracle_solve(X, y, alpha), atol=1e-6
            )

    def test_weight_norm_shrinks_with_alpha(self):
        rng = np.random.default_rng(7)
        for _ in range(30):
            n = int(rng.integers(2, 9))
            d = int(rng.integers(1, 9))
            X = rng.normal(size=(n, d))
            y = rng.normal(size=n)
            rows = dense_rows(X)
            norms = [
                np.linalg.norm(fit_ridge(rows, y, alpha=a, tol=1e-12).weights)
                for a in (0.01, 0.1, 1.0, 10.0, 100.0)
            ]
            for smaller, larger in zip(norms[1:], norms):
                assert smaller <= larger + 1e-9

    def test_objective_no_worse_than_zero_weights(self):
        rng = np.random.default_rng(3)
        X = rng.normal(size=(8, 5))
        y = rng.normal(size=8)
        model = fit_ridge(dense_rows(X), y, alpha=0.5)
        zero = RidgeModel(weights=np.zeros(5), intercept=float(np.mean(y)), alpha=0.5)
        assert ridge_objective(model, dense_rows(X), y) <= ridge_objective(
            zero, dense_rows(X), y
        ) + 1e-12

    def test_normal_equation_residual_below_tolerance(self):
        rng = np.random.default_rng(11)
        X = rng.normal(size=(9, 6))
        y = rng.normal(size=9)
        tol = 1e-10
        model = fit_ridge(dense_rows(X), y, alpha=1.0, tol=tol)
        yc = y - y.mean()
        b = X.T @ yc
        residual = b - (X.T @ (X @ model.weights) + model.weights)
        assert np.linalg.norm(residual) <= tol * np.linalg.norm(b)

    def test_dimension_mismatch_rejected(self):
        rows = [sparse_vector([0], [1.0], 3), sparse_vector([0], [1.0], 4)]
        with pytest.raises(ValueError):
            fit_ridge(rows, [1.0, 2.0])

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError):
            fit_ridge(dense_rows(SINGLE_FEATURE), [1.0, 2.0])

    def test_nonpositive_alpha_rejected(self):
        with pytest.raises(ValueError):
            fit_ridge(dense_rows(SINGLE_FEATURE), [1.0, 2.0, 3.0], alpha=0.0)

    def test_empty_data_rejected(self):
        with pytest.raises(ValueError):
            fit_ridge([], [])

    def test_constant_target_gives_zero_weights(self):
        model = fit_ridge(dense_rows(SINGLE_FEATURE), [5.0, 5.0, 5.0], alpha=1.0)
        np.testing.assert_array_equal(model.weights, 0.0)
        assert model.intercept == 5.0


class TestPredict:
    def test_zero_vector_gives_intercept(self):
        model = RidgeModel(weights=np.array([1.0, -2.0]), intercept=0.7, alpha=1.0)
        empty = SparseVector(np.empty(0, dtype=np.int32), np.empty(0), 2)
        assert predict(model, empty) == pytest.approx(0.7)

    def test_zero_weights_give_intercept(self):
        model = RidgeModel(weights=np.zeros(3), intercept=-1.5, alpha=1.0)
        x = sparse_vector([0, 2], [4.0, 9.0], 3)
        assert predict(model, x) == pytest.approx(-1.5)

    def test_hand_built_dot_product(self):
        model = RidgeModel(weights=np.array([0.5, -0.25]), intercept=0.1, alpha=1.0)
        x = sparse_vector([0, 1], [1.0, 2.0], 2)
        assert predict(model, x) == pytest.approx(0.1)

    def test_dimension_mismatch(self):
        model = RidgeModel(weights=np.zeros(3), intercept=0.0, alpha=1.0)
        with pytest.raises(ValueError):
            predict(model, sparse_vector([0], [1.0], 4))

    def test_predictions_not_clamped(self):
        model = RidgeModel(weights=np.array([10.0]), intercept=0.0, alpha=1.0)
        assert predict(model, sparse_vector([0], [1.0], 1)) == 10.0


class TestSerialization:
    def test_round_trip_bit_exact(self, tmp_path):
        rng = np.random.default_rng(2)
        model = RidgeModel(weights=rng.normal(size=17), intercept=0.123456789,
                           alpha=0.5)
        path = tmp_path / "m.ridge"
        save_ridge(model, path)
        loaded = load_ridge(path)
        assert loaded.alpha == model.alpha
        assert loaded.intercept == model.intercept
        np.testing.assert_array_equal(loaded.weights, model.weights)
        path2 = tmp_path / "m2.ridge"
        save_ridge(loaded, path2)
        assert path.read_bytes() == path2.read_bytes()

    def test_rejects_wrong_magic(self, tmp_path):
        path = tmp_path / "bad.ridge"
        path.write_bytes(b"something else entirely")
        with pytest.raises(ValueError):
            load_ridge(path)
