"""Recursive estimator oracles: ridge equivalence, directional forgetting bounds."""

import numpy as np
import pytest

from titrasim import ExponentialEstimator, RecursiveEstimator


def ridge_solution(phis, zs, p0_scale=1.0):
    """Batch solution of the same regularized problem the estimator starts from.

    With prior covariance p0*I and zero initial guess, the exact answer is
    (I/p0 + sum phi phi^T)^-1 sum phi z, computed here by direct solve.
    """
    dim = phis.shape[1]
    a = np.eye(dim) / p0_scale
    b = np.zeros(dim)
    for phi, z in zip(phis, zs):
        a += np.outer(phi, phi)
        b += phi * z
    return np.linalg.solve(a, b)


def test_lambda_one_matches_ridge_on_random_problems():
    rng = np.random.default_rng(42)
    worst = 0.0
    for _ in range(20):
        n = int(rng.integers(5, 40))
        phis = rng.normal(size=(n, 3)) * rng.uniform(0.5, 3.0)
        zs = phis @ rng.normal(size=3) + rng.normal(scale=0.3, size=n)
        est = RecursiveEstimator(dim=3, lam=1.0, check_consistency=True)
        for phi, z in zip(phis, zs):
            est.update(phi, z)
        full = np.append(est.psi_hat[:-1], est.psi_hat[-1])
        worst = max(worst, float(np.max(np.abs(full - ridge_solution(phis, zs)))))
    assert worst < 1e-9


def test_noiseless_model_recovered_with_weak_prior():
    # huge initial covariance makes the prior negligible, so the noiseless
    # coefficients come back almost exactly
    rng = np.random.default_rng(7)
    psi_true = np.array([1.7, -0.4, 2.2])
    est = RecursiveEstimator(dim=3, lam=1.0, p0_scale=1e12)
    for _ in range(10):
        phi = rng.normal(size=3)
        est.update(phi, float(phi @ psi_true))
    assert np.max(np.abs(est.psi_hat - psi_true)) < 1e-9


def test_directional_forgetting_keeps_covariance_bounded():
    rng = np.random.default_rng(3)
    phi = np.array([0.3, 1.0, 1.0])
    est = RecursiveEstimator(dim=3, lam=0.9, check_consistency=True)
    for _ in range(1000):
        est.update(phi, float(rng.normal()))
    assert np.linalg.cond(est.P) < 1e6
    assert est.max_cond < 1e6
    assert np.linalg.norm(est.P @ est.R - np.eye(3)) < 1e-6


def test_plain_exponential_forgetting_blows_up_without_excitation():
    # same repeated regressor, no directional split: covariance grows without
    # bound in the unexcited subspace
    rng = np.random.default_rng(3)
    phi = np.array([0.3, 1.0, 1.0])
    est = ExponentialEstimator(dim=3, lam=0.9)
    for _ in range(1000):
        est.update(phi, float(rng.normal()))
    assert np.linalg.cond(est.P) > 1e9
    assert est.max_cond >= np.linalg.cond(est.P)


def test_tiny_regressor_skips_update():
    est = RecursiveEstimator(dim=3, lam=0.9, eps_phi=1e-3)
    psi_before = est.psi_hat.copy()
    p_before = est.P.copy()
    est.update(np.zeros(3), 123.0)
    assert np.array_equal(est.psi_hat, psi_before)
    assert np.allclose(est.P, p_before, atol=0.0)


def test_covariance_stays_bounded_on_long_random_stream():
    rng = np.random.default_rng(11)
    est = RecursiveEstimator(dim=3, lam=0.9, check_consistency=True)
    for _ in range(10_000):
        phi = rng.uniform(-2.0, 2.0, size=3)
        est.update(phi, float(rng.normal()))
    assert est.max_cond < 1e6


def test_inverse_pair_maintained_through_mixed_stream():
    # alternating excited and degenerate regressors must keep P and R exact
    # mutual inverses; check_consistency enforces the bound every step
    rng = np.random.default_rng(19)
    est = RecursiveEstimator(dim=3, lam=0.9, check_consistency=True)
    phi_fixed = np.array([1.0, -0.5, 0.25])
    for k in range(500):
        phi = phi_fixed if k % 3 else rng.normal(size=3)
        est.update(phi, float(rng.normal()))
    assert np.linalg.norm(est.P @ est.R - np.eye(3)) < 1e-6
    assert np.allclose(est.P, est.P.T)
    assert np.all(np.linalg.eigvalsh(est.P) > 0)


def test_estimator_rejects_bad_inputs():
    est = RecursiveEstimator(dim=3)
    with pytest.raises(ValueError):
        est.update(np.ones(2), 1.0)
    with pytest.raises(ValueError):
        est.update(np.array([1.0, np.nan, 0.0]), 1.0)
    with pytest.raises(ValueError):
        est.update(np.ones(3), float("inf"))
    with pytest.raises(ValueError):
        RecursiveEstimator(dim=2, lam=0.0)
    with pytest.raises(ValueError):
        RecursiveEstimator(dim=2, lam=1.2)
