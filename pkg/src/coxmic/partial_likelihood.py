"""Cox partial log-likelihood, derivatives, and classical estimators.

The likelihood treats ties Breslow-style: the risk set at an event time
contains every subject with observed time greater than or equal to it,
and tied events share one denominator. Evaluation runs through a cached
per-dataset workspace that sorts subjects once by descending time so
each risk set is an array prefix.
"""

from __future__ import annotations

import weakref
from dataclasses import dataclass

import numpy as np

from ._backend import cox_sweep
from .dataset import SurvivalDataset
from .errors import ConvergenceError, DomainError, RankDeficiencyError

__all__ = [
    "CoxWorkspace",
    "workspace_for",
    "partial_loglik",
    "loglik_and_score",
    "score",
    "information",
    "fit_mple",
    "fit_ridge",
]

NEWTON_TOL = 1e-8
NEWTON_MAX_ITER = 50
MAX_HALVINGS = 20


@dataclass(frozen=True, eq=False)
class CoxWorkspace:
    """Sorted views and tie-block indices for one dataset."""

    order: np.ndarray          # permutation: descending time, stable
    x_sorted: np.ndarray       # (n, p) C-contiguous
    status_sorted: np.ndarray  # (n,) uint8
    risk_end: np.ndarray       # (n,) int64: last index of each tie block

    @classmethod
    def build(cls, ds: SurvivalDataset) -> "CoxWorkspace":
        order = np.argsort(-ds.time, kind="stable")
        ts = ds.time[order]
        x_sorted = np.ascontiguousarray(ds.covariates[order])
        status_sorted = ds.status[order].astype(np.uint8)
        n = ts.shape[0]
        risk_end = np.empty(n, dtype=np.int64)
        i = 0
        while i < n:
            j = i
            while j + 1 < n and ts[j + 1] == ts[i]:
                j += 1
            risk_end[i:j + 1] = j
            i = j + 1
        return cls(order=order, x_sorted=x_sorted,
                   status_sorted=status_sorted, risk_end=risk_end)


_workspaces: "weakref.WeakKeyDictionary[SurvivalDataset, CoxWorkspace]" = \
    weakref.WeakKeyDictionary()


def workspace_for(ds: SurvivalDataset) -> CoxWorkspace:
    """Cached workspace; datasets are immutable so reuse is safe."""
    ws = _workspaces.get(ds)
    if ws is None:
        ws = CoxWorkspace.build(ds)
        _workspaces[ds] = ws
    return ws


def _check_beta(ds, beta):
    beta = np.asarray(beta, dtype=float)
    if beta.shape != (ds.p,):
        raise DomainError(f"beta must have length {ds.p}, got shape {beta.shape}")
    if not np.isfinite(beta).all():
        raise DomainError("beta contains non-finite values")
    return beta


def _sweep(ds, beta, want_score=False, want_info=False):
    ws = workspace_for(ds)
    eta = ws.x_sorted @ beta
    return cox_sweep(eta, ws.x_sorted, ws.status_sorted, ws.risk_end,
                     want_score, want_info)


def partial_loglik(ds: SurvivalDataset, beta) -> float:
    """Breslow partial log-likelihood at ``beta``."""
    beta = _check_beta(ds, beta)
    return _sweep(ds, beta)[0]


def loglik_and_score(ds: SurvivalDataset, beta):
    """Log-likelihood and its gradient in one sweep."""
    beta = _check_beta(ds, beta)
    ll, sc, _ = _sweep(ds, beta, want_score=True)
    return ll, sc


def score(ds: SurvivalDataset, beta) -> np.ndarray:
    """Gradient of the partial log-likelihood."""
    return loglik_and_score(ds, beta)[1]


def information(ds: SurvivalDataset, beta) -> np.ndarray:
    """Observed information (negative Hessian), symmetric PSD."""
    beta = _check_beta(ds, beta)
    return _sweep(ds, beta, want_score=True, want_info=True)[2]


def _newton(ds, value_grad_hess, start, tol, max_iter, what):
    """Maximize a concave objective by damped Newton with step halving."""
    beta = np.asarray(start, dtype=float).copy()
    ll, grad, hess = value_grad_hess(beta)
    if not np.isfinite(ll):
        raise DomainError(f"{what}: objective not finite at the start")
    for _ in range(max_iter):
        if np.max(np.abs(grad)) < tol:
            return beta
        try:
            step = np.linalg.solve(hess, grad)
        except np.linalg.LinAlgError as exc:
            raise RankDeficiencyError(f"{what}: singular information matrix") from exc
        t = 1.0
        for _ in range(MAX_HALVINGS):
            cand = beta + t * step
            ll_new, grad_new, hess_new = value_grad_hess(cand)
            if np.isfinite(ll_new) and ll_new >= ll - 1e-12:
                break
            t *= 0.5
        else:
            raise ConvergenceError(f"{what}: step halving failed to make progress",
                                   last_iterate=beta)
        beta, ll, grad, hess = cand, ll_new, grad_new, hess_new
    if np.max(np.abs(grad)) < tol:
        return beta
    raise ConvergenceError(f"{what}: no convergence in {max_iter} iterations "
                           f"(grad norm {np.max(np.abs(grad)):.3e})",
                           last_iterate=beta)


def fit_mple(ds: SurvivalDataset, tol: float = NEWTON_TOL,
             max_iter: int = NEWTON_MAX_ITER) -> np.ndarray:
    """Maximum partial likelihood estimate by Newton-Raphson."""

    def vgh(beta):
        ll, sc, info = _sweep(ds, beta, want_score=True, want_info=True)
        return ll, sc, info

    return _newton(ds, vgh, np.zeros(ds.p), tol, max_iter, "fit_mple")


def fit_ridge(ds: SurvivalDataset, theta0: float, tol: float = NEWTON_TOL,
              max_iter: int = NEWTON_MAX_ITER) -> np.ndarray:
    """Minimizer of -2*loglik + theta0 * sum(beta^2); theta0=0 is the MPLE."""
    if theta0 < 0:
        raise DomainError("theta0 must be nonnegative")

    def vgh(beta):
        ll, sc, info = _sweep(ds, beta, want_score=True, want_info=True)
        # maximize  loglik - theta0/2 * ||beta||^2  (equivalent objective)
        pll = ll - 0.5 * theta0 * float(beta @ beta)
        pgrad = sc - theta0 * beta
        phess = info + theta0 * np.eye(ds.p)
        return pll, pgrad, phess

    return _newton(ds, vgh, np.zeros(ds.p), tol, max_iter, "fit_ridge")
