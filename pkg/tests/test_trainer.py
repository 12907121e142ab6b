import math
import warnings

import numpy as np
import pytest
from conftest import gd_least_squares
from hypothesis import given, settings
from hypothesis import strategies as st

from rbfface import (
    CenterSet,
    DimensionError,
    InvalidParameterError,
    LabeledDataset,
    NumericError,
    RankDeficientWarning,
    TrainConfig,
    build_design_matrix,
    evaluate,
    fit,
    forward,
    solve_weights,
    synth_dataset,
    train,
)


def objective(A, w, t, lam):
    r = A @ w - t
    return r @ r + lam * (w @ w)


def test_design_matrix_unit_diagonal():
    X = np.random.default_rng(0).normal(size=(5, 3))
    D = build_design_matrix(X, X, 0.7)
    assert (np.diag(D) == 1.0).all()
    assert ((D > 0) & (D <= 1)).all()


def test_design_matrix_wide_spread():
    X = np.random.default_rng(1).normal(size=(20, 4))
    D = build_design_matrix(X, X[:6], 1e6)
    np.testing.assert_allclose(D, 1.0, atol=1e-3)


def test_design_matrix_scalar_example():
    D = build_design_matrix(np.array([[0.0], [2.0]]), np.array([[0.0], [2.0]]), 2.0)
    e = math.exp(-1)
    np.testing.assert_allclose(D, [[1, e], [e, 1]], rtol=1e-15)


def test_design_matrix_accepts_dataset_and_centerset():
    ds = LabeledDataset([[0.0], [2.0]], [1, -1])
    cs = CenterSet(np.array([[0.0]]), 0.0)
    assert build_design_matrix(ds, cs, 1.0).shape == (2, 1)


def test_design_matrix_dimension_error():
    with pytest.raises(DimensionError):
        build_design_matrix(np.zeros((3, 2)), np.zeros((2, 3)), 1.0)


def test_solve_identity():
    t = np.array([0.5, -2.0, 3.0, 1.0])
    np.testing.assert_allclose(solve_weights(np.eye(4), t), t, rtol=1e-14)


def test_solve_duplicate_rows_fit_zero():
    A = np.array([[0.3, 0.7], [0.3, 0.7], [1.0, 0.1]])
    t = np.array([1.0, -1.0, 0.5])
    w = solve_weights(A, t)
    assert (A @ w)[0] == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("seed", range(5))
def test_solve_matches_gradient_descent(seed):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(10, 4))
    t = rng.normal(size=10)
    np.testing.assert_allclose(solve_weights(A, t), gd_least_squares(A, t), atol=1e-6)


def test_ridge_matches_gradient_descent():
    rng = np.random.default_rng(11)
    A = rng.normal(size=(10, 4))
    t = rng.normal(size=10)
    w = solve_weights(A, t, 0.5)
    np.testing.assert_allclose(w, gd_least_squares(A, t, lam=0.5), atol=1e-6)


def test_rank_deficient_returns_min_norm_and_warns():
    A = np.array([[1.0, 1.0], [1.0, 1.0], [1.0, 1.0]])
    t = np.array([1.0, 2.0, 3.0])
    with pytest.warns(RankDeficientWarning):
        w = solve_weights(A, t)
    np.testing.assert_allclose(w, [1.0, 1.0], rtol=1e-12)


def test_solve_rejects_non_finite():
    with pytest.raises(NumericError):
        solve_weights(np.array([[np.nan, 1.0]]), np.array([1.0]))
    with pytest.raises(DimensionError):
        solve_weights(np.ones((3, 2)), np.ones(2))


@settings(max_examples=40, deadline=None)
@given(
    n=st.integers(3, 25),
    s=st.integers(1, 8),
    lam=st.sampled_from([0.0, 1e-3, 0.5]),
    spread=st.floats(0.3, 5.0),
    seed=st.integers(0, 2**31),
)
def test_first_order_optimality_and_normal_equations(n, s, lam, spread, seed):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, 3))
    C = rng.normal(size=(s, 3))
    t = rng.choice([-1.0, 1.0], size=n)
    A = build_design_matrix(X, C, spread)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RankDeficientWarning)
        w = solve_weights(A, t, lam)
    # floating-point solvers are accurate to about eps * cond(A); beyond 1e8 the
    # unregularized optimum is not resolvable, even when A is nominally full rank
    if lam > 0 or np.linalg.cond(A) <= 1e8:
        base = objective(A, w, t, lam)
        for k in range(s):
            for d in (1e-3, -1e-3):
                w2 = w.copy()
                w2[k] += d
                assert objective(A, w2, t, lam) >= base - 1e-12 * max(1.0, base)
        lhs = (A.T @ A + lam * np.eye(s)) @ w - A.T @ t
        assert np.abs(lhs).max() <= 1e-8 * max(1.0, np.abs(A.T @ t).max())


def test_interpolation_when_centers_equal_inputs():
    rng = np.random.default_rng(3)
    X = rng.normal(size=(30, 5))
    t = rng.choice([-1.0, 1.0], size=30)
    A = build_design_matrix(X, X, 1.0)
    assert np.linalg.matrix_rank(A) == 30
    w = solve_weights(A, t)
    assert np.abs(A @ w - t).max() <= 1e-6


def test_row_permutation_invariance():
    rng = np.random.default_rng(4)
    X = rng.normal(size=(40, 3))
    C = X[:6]
    t = rng.choice([-1.0, 1.0], size=40)
    perm = rng.permutation(40)
    w1 = solve_weights(build_design_matrix(X, C, 1.5), t)
    w2 = solve_weights(build_design_matrix(X[perm], C, 1.5), t[perm])
    np.testing.assert_allclose(w1, w2, rtol=1e-10, atol=1e-12)


def test_two_point_near_interpolation():
    a, b = np.array([0.0, 0.0, 1.0]), np.array([3.0, 4.0, 1.0])
    ds = LabeledDataset([a, b], [1, -1])
    m = train(ds, TrainConfig(2, 0.1 * 5.0, "kmeans", seed=1))
    assert abs(forward(a, m) - 1) < 1e-3
    assert abs(forward(b, m) + 1) < 1e-3


@pytest.mark.parametrize("strategy", ["kmeans", "random_subset"])
def test_train_bit_identical(strategy):
    ds = synth_dataset(0, 50, 20, 6.0)
    cfg = TrainConfig(7, 5.0, strategy, seed=12)
    m1, m2 = train(ds, cfg), train(ds, cfg)
    assert np.array_equal(m1.centers, m2.centers)
    assert np.array_equal(m1.weights, m2.weights)


def test_two_blob_detection_rate():
    sep = 20.0
    tr = synth_dataset(0, 200, 361, sep)
    te = synth_dataset(1, 200, 361, sep)
    m = train(tr, TrainConfig(8, sep, "kmeans", seed=0))
    rep = evaluate(m, te)
    assert rep.face_rate >= 0.95 and rep.nonface_rate >= 0.95


def test_fit_reports_rank_and_time():
    ds = synth_dataset(2, 30, 5, 4.0)
    res = fit(ds, TrainConfig(5, 2.0, seed=0))
    assert res.solver_rank == 5
    assert res.train_seconds >= 0
    assert res.center_set.centers.shape == (5, 5)


def test_config_and_dataset_validation():
    with pytest.raises(InvalidParameterError):
        TrainConfig(0, 1.0)
    with pytest.raises(InvalidParameterError):
        TrainConfig(2, 0.0)
    with pytest.raises(InvalidParameterError):
        TrainConfig(2, 1.0, "bogus")
    with pytest.raises(InvalidParameterError):
        TrainConfig(2, 1.0, regularization=-1.0)
    with pytest.raises(InvalidParameterError):
        LabeledDataset([[0.0], [1.0]], [1, 0])
    with pytest.raises(InvalidParameterError):
        LabeledDataset([[0.0], [1.0]], [1])
    ds = LabeledDataset([[0.0], [1.0]], [1, -1])
    with pytest.raises(InvalidParameterError):
        train(ds, TrainConfig(3, 1.0))
