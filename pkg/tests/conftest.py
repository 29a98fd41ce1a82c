import numpy as np
import pytest

from coxmic import SurvivalDataset, load_csv, standardize

DATA = "data/pbc.csv"
PBC_RECODES = {"status": {"2": 1, "*": 0}, "sex": {"f": 1, "*": 0}}


@pytest.fixture(scope="session")
def pbc():
    return load_csv(DATA, drop_cols=["id"], recodes=PBC_RECODES)


@pytest.fixture(scope="session")
def pbc_std(pbc):
    return standardize(pbc)


def random_dataset(rng, n, p, censor=0.4, with_ties=False):
    """Small random instance for oracle comparisons."""
    if with_ties:
        time = rng.integers(1, max(3, n // 3), size=n).astype(float)
    else:
        time = rng.exponential(1.0, n) + 1e-3
    status = (rng.random(n) >= censor).astype(float)
    status[rng.integers(0, n)] = 1.0  # at least one event
    cov = rng.normal(size=(n, p))
    return SurvivalDataset(time=time, status=status, covariates=cov,
                           names=tuple(f"v{j}" for j in range(p)))


def naive_loglik(ds, beta):
    """Double-loop partial log-likelihood, straight from the definition."""
    beta = np.asarray(beta, dtype=float)
    eta = ds.covariates @ beta
    total = 0.0
    for i in range(ds.n):
        if ds.status[i] == 1.0:
            denom = 0.0
            for k in range(ds.n):
                if ds.time[k] >= ds.time[i]:
                    denom += np.exp(eta[k])
            total += eta[i] - np.log(denom)
    return total


def fd_gradient(func, x, h=1e-5):
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    for j in range(x.size):
        e = np.zeros_like(x)
        e[j] = h
        out[j] = (func(x + e) - func(x - e)) / (2.0 * h)
    return out
