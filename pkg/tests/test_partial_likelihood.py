import numpy as np
import pytest

from coxmic import (SurvivalDataset, fit_mple, fit_ridge, information,
                    loglik_and_score, partial_loglik, score)
from coxmic.errors import DomainError

from conftest import fd_gradient, naive_loglik, random_dataset

# printed reference MPLE on standardized PBC; tolerance absorbs any
# tie-correction difference in how the reference column was produced
PBC_MPLE = {
    "trt": -0.0622, "age": 0.3041, "sex": -0.1204, "ascites": 0.0224,
    "hepato": 0.0128, "spiders": 0.0460, "edema": 0.2733, "bili": 0.3681,
    "chol": 0.1155, "albumin": -0.2999, "copper": 0.2198, "alk.phos": 0.0022,
    "ast": 0.2308, "trig": -0.0637, "platelet": 0.0840, "protime": 0.2344,
    "stage": 0.3881,
}


def test_sweep_matches_naive_oracle():
    rng = np.random.default_rng(11)
    for trial in range(30):
        ds = random_dataset(rng, int(rng.integers(5, 51)), int(rng.integers(1, 5)),
                            with_ties=bool(trial % 2))
        beta = rng.normal(size=ds.p) * 0.7
        fast = partial_loglik(ds, beta)
        slow = naive_loglik(ds, beta)
        assert abs(fast - slow) <= 1e-10 * max(1.0, abs(slow))


def test_loglik_at_zero_is_risk_set_sizes():
    rng = np.random.default_rng(5)
    ds = random_dataset(rng, 25, 3, with_ties=True)
    sizes = [(ds.time >= ds.time[i]).sum() for i in range(ds.n)
             if ds.status[i] == 1.0]
    expect = -np.sum(np.log(sizes))
    assert abs(partial_loglik(ds, np.zeros(3)) - expect) < 1e-12


def test_covariate_free_case():
    ds = SurvivalDataset(time=[3.0, 2.0, 1.0], status=[1, 1, 1],
                         covariates=np.zeros((3, 1)), names=("z",))
    expect = -(np.log(3) + np.log(2) + np.log(1))
    for b in (-2.0, 0.0, 5.0):
        assert abs(partial_loglik(ds, [b]) - expect) < 1e-12
    assert np.allclose(score(ds, [0.7]), 0.0)
    assert np.allclose(information(ds, [0.7]), 0.0)


def test_score_matches_finite_differences():
    rng = np.random.default_rng(23)
    ds = random_dataset(rng, 20, 3)
    beta = rng.normal(size=3) * 0.5
    an = score(ds, beta)
    fd = fd_gradient(lambda b: partial_loglik(ds, b), beta, h=1e-5)
    assert np.max(np.abs(an - fd)) < 1e-6


def test_score_zero_at_mple(pbc_std):
    beta = fit_mple(pbc_std)
    assert np.max(np.abs(score(pbc_std, beta))) < 1e-6


def test_information_symmetric_psd():
    rng = np.random.default_rng(31)
    ds = random_dataset(rng, 20, 3)
    beta = rng.normal(size=3) * 0.5
    info = information(ds, beta)
    assert np.max(np.abs(info - info.T)) < 1e-12
    assert np.linalg.eigvalsh(info).min() >= -1e-10


def test_information_matches_fd_hessian():
    rng = np.random.default_rng(37)
    ds = random_dataset(rng, 30, 4)
    beta = rng.normal(size=4) * 0.4
    info = information(ds, beta)
    h = 1e-5
    fd = np.zeros((4, 4))
    for j in range(4):
        e = np.zeros(4)
        e[j] = h
        fd[:, j] = -(score(ds, beta + e) - score(ds, beta - e)) / (2 * h)
    assert np.max(np.abs(info - fd)) <= 1e-5 * max(1.0, np.max(np.abs(fd)))


def test_mple_reproduces_reference_column(pbc_std):
    beta = fit_mple(pbc_std)
    for j, name in enumerate(pbc_std.names):
        assert abs(beta[j] - PBC_MPLE[name]) < 0.01, name


def test_mple_recovers_simulated_truth():
    from coxmic import SimSpec, generate
    true = np.array([1.0, 0.0])
    ds = generate(SimSpec(n=30, p=2, true_beta=true, target_censoring=0.2,
                          seed=4))
    beta = fit_mple(ds)
    se = np.sqrt(np.diag(np.linalg.inv(information(ds, beta))))
    assert np.all(np.abs(beta - true) < 3.0 * se)


def test_ridge_zero_penalty_is_mple(pbc_std):
    assert np.max(np.abs(fit_ridge(pbc_std, 0.0) - fit_mple(pbc_std))) < 1e-8


def test_ridge_strong_penalty_shrinks(pbc_std):
    beta = fit_ridge(pbc_std, 1e6)
    assert np.max(np.abs(beta)) < 1e-2


def test_ridge_matches_generic_optimizer():
    from scipy.optimize import minimize as sp_min
    rng = np.random.default_rng(41)
    ds = random_dataset(rng, 50, 5, censor=0.3)
    ours = fit_ridge(ds, 1.0)
    res = sp_min(lambda b: -2.0 * partial_loglik(ds, b) + float(b @ b),
                 np.zeros(5), method="BFGS", options={"gtol": 1e-10})
    assert np.max(np.abs(ours - res.x)) < 1e-5


def test_loglik_time_shift_invariance():
    rng = np.random.default_rng(43)
    ds = random_dataset(rng, 30, 3)
    beta = rng.normal(size=3) * 0.5
    shifted = SurvivalDataset(time=ds.time + 7.5, status=ds.status,
                              covariates=ds.covariates, names=ds.names)
    assert partial_loglik(ds, beta) == partial_loglik(shifted, beta)


def test_loglik_concavity():
    rng = np.random.default_rng(47)
    for _ in range(20):
        ds = random_dataset(rng, int(rng.integers(8, 30)), 3)
        b1, b2 = rng.normal(size=3), rng.normal(size=3)
        t = rng.random()
        mid = partial_loglik(ds, t * b1 + (1 - t) * b2)
        chord = t * partial_loglik(ds, b1) + (1 - t) * partial_loglik(ds, b2)
        assert mid >= chord - 1e-10


def test_nonfinite_beta_rejected(pbc_std):
    with pytest.raises(DomainError):
        partial_loglik(pbc_std, np.full(17, np.nan))
    with pytest.raises(DomainError):
        partial_loglik(pbc_std, np.zeros(3))


def test_fused_loglik_score_consistent(pbc_std):
    beta = np.full(17, 0.05)
    ll, sc = loglik_and_score(pbc_std, beta)
    assert ll == partial_loglik(pbc_std, beta)
    assert np.array_equal(sc, score(pbc_std, beta))
