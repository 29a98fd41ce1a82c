"""Standard errors, Wald tests, confidence intervals and final-model BIC.

Testing happens on the reparameterized coefficients, whose estimator
solves a smooth problem, so the usual M-estimator machinery applies and
no post-selection correction is needed. Two covariance constructions are
offered:

``information`` (default)
    Inverse of the observed partial-likelihood information evaluated at
    the sparse estimate. This is the construction that reproduces the
    reference results; at the optimum the penalty contributes no
    curvature on the selected coordinates, so there it coincides with
    the curvature of the objective.

``qn_hessian``
    Inverse of one-half the central-difference Hessian of the penalized
    objective at the estimate. On unselected coordinates the penalty
    curvature dominates, which shrinks those standard errors; kept for
    comparison and diagnostics.

Standard errors for the natural-scale coefficients are defined on the
selected support only, from the observed information of the restricted
submodel evaluated at the estimate (no refit).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.stats import norm

from .dataset import SurvivalDataset
from .errors import ValidationError
from .partial_likelihood import information, partial_loglik
from .penalty import MicPenalty, beta_from_gamma, mic_objective

__all__ = [
    "FitResult",
    "hessian_central",
    "vcov_gamma",
    "wald_tests",
    "se_beta",
    "model_bic",
]


@dataclass(frozen=True)
class FitResult:
    """Everything the fit produces, on the scale the model was fit on."""

    names: tuple
    beta0: np.ndarray          # starting values
    gamma: np.ndarray          # reparameterized estimates (exact zeros)
    beta: np.ndarray           # natural-scale estimates (exact zeros)
    se_gamma: np.ndarray
    z: np.ndarray
    p_value: np.ndarray
    ci_lower: np.ndarray
    ci_upper: np.ndarray
    se_beta: np.ndarray        # NaN on unselected coordinates
    vcov_gamma: np.ndarray
    min_q: float
    bic: float
    conf_level: float
    penalty: MicPenalty
    n: int
    n_events: int
    report: object = None      # OptimizerReport
    config: object = None      # MicConfig echo
    flags: dict = field(default_factory=dict)

    @property
    def selected(self) -> np.ndarray:
        return self.beta != 0.0

    @property
    def support(self) -> tuple:
        return tuple(n for n, s in zip(self.names, self.selected) if s)


def hessian_central(func, x, step: float = 1e-4) -> np.ndarray:
    """Symmetric central-difference Hessian of a scalar function."""
    x = np.asarray(x, dtype=float)
    p = x.size
    h = np.zeros((p, p))
    f0 = func(x)
    for i in range(p):
        ei = np.zeros(p)
        ei[i] = step
        h[i, i] = (func(x + ei) - 2.0 * f0 + func(x - ei)) / step**2
        for j in range(i + 1, p):
            ej = np.zeros(p)
            ej[j] = step
            h[i, j] = h[j, i] = (func(x + ei + ej) - func(x + ei - ej)
                                 - func(x - ei + ej) + func(x - ei - ej)) \
                / (4.0 * step**2)
    return 0.5 * (h + h.T)


def _invert_psd(matrix, flags, label):
    try:
        inv = np.linalg.inv(matrix)
    except np.linalg.LinAlgError:
        flags[f"{label}_singular"] = True
        inv = np.linalg.pinv(matrix)
    return inv


def vcov_gamma(ds: SurvivalDataset, gamma, pen: MicPenalty,
               method: str = "information", fd_step: float = 1e-4):
    """Covariance of the reparameterized estimates; see module docstring.

    Returns ``(vcov, flags)`` where flags records pseudo-inverse use and
    clamped negative variances.
    """
    gamma = np.asarray(gamma, dtype=float)
    flags = {}
    if method == "information":
        obs_info = information(ds, beta_from_gamma(gamma, pen.a))
        vcov = _invert_psd(obs_info, flags, "information")
    elif method == "qn_hessian":
        hess = hessian_central(lambda g: mic_objective(ds, g, pen),
                               gamma, step=fd_step)
        vcov = _invert_psd(0.5 * hess, flags, "qn_hessian")
    else:
        raise ValidationError(f"unknown vcov method {method!r}")
    vcov = 0.5 * (vcov + vcov.T)
    diag = np.diag(vcov).copy()
    if (diag < 0).any():
        flags["negative_variance_clamped"] = [int(i) for i in np.flatnonzero(diag < 0)]
        diag[diag < 0] = 0.0
        vcov = vcov.copy()
        np.fill_diagonal(vcov, diag)
    return vcov, flags


def wald_tests(gamma, se, conf_level: float = 0.95):
    """z statistics, two-sided normal p-values and CIs.

    A zero standard error with a nonzero estimate leaves the test
    undefined (NaN) for that coordinate.
    """
    gamma = np.asarray(gamma, dtype=float)
    se = np.asarray(se, dtype=float)
    if not 0.0 < conf_level < 1.0:
        raise ValidationError("conf_level must be in (0, 1)")
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(se > 0, gamma / se,
                     np.where(gamma == 0.0, 0.0, np.nan))
    p = 2.0 * (1.0 - norm.cdf(np.abs(z)))
    crit = norm.ppf(0.5 * (1.0 + conf_level))
    lower = gamma - crit * se
    upper = gamma + crit * se
    return z, p, lower, upper


def se_beta(ds: SurvivalDataset, gamma, pen: MicPenalty):
    """Submodel standard errors on the selected support, NaN elsewhere.

    Returns ``(se, flags)``; a singular restricted information leaves the
    support NaN with a diagnostic flag.
    """
    gamma = np.asarray(gamma, dtype=float)
    beta = beta_from_gamma(gamma, pen.a)
    out = np.full(ds.p, np.nan)
    flags = {}
    sel = np.flatnonzero(beta != 0.0)
    if sel.size == 0:
        return out, flags
    obs_info = information(ds, beta)[np.ix_(sel, sel)]
    try:
        sub_vcov = np.linalg.inv(obs_info)
    except np.linalg.LinAlgError:
        flags["restricted_information_singular"] = True
        return out, flags
    diag = np.diag(sub_vcov)
    if (diag < 0).any():
        flags["restricted_negative_variance"] = True
        diag = np.clip(diag, 0.0, None)
    out[sel] = np.sqrt(diag)
    return out, flags


def model_bic(ds: SurvivalDataset, beta) -> float:
    """-2*loglik(beta) + ln(n_events) * (number of nonzero coefficients)."""
    beta = np.asarray(beta, dtype=float)
    size = int(np.count_nonzero(beta))
    return -2.0 * partial_loglik(ds, beta) + np.log(ds.n_events) * size
