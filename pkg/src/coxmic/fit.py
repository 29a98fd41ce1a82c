"""High-level sparse-fit driver tying data, objective, optimizer, inference."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dataset import SurvivalDataset, standardize
from .errors import ConfigError
from .inference import FitResult, model_bic, se_beta, vcov_gamma, wald_tests
from .optimize import OptimizerConfig, minimize_mic
from .partial_likelihood import fit_mple, fit_ridge
from .penalty import MicPenalty, beta_from_gamma

__all__ = ["MicConfig", "fit_mic", "starting_point"]

START_POLICIES = ("mple", "ridge", "zero", "user")
CRITERIA = ("bic", "aic", "custom")


@dataclass(frozen=True)
class MicConfig:
    """User-facing knobs for one sparse fit."""

    criterion: str = "bic"          # bic | aic | custom
    lambda0: float | None = None    # required when criterion == "custom"
    a: float | None = None          # tanh sharpness; defaults to n_events
    start: str = "mple"             # mple | ridge | zero | user
    theta0: float = 1.0             # ridge tuning parameter
    beta0: object = None            # user-supplied start vector
    scale: bool = True              # standardize covariates before fitting
    conf_level: float = 0.95
    vcov_method: str = "information"
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)

    def __post_init__(self):
        if self.criterion not in CRITERIA:
            raise ConfigError(f"criterion must be one of {CRITERIA}")
        if self.criterion == "custom" and self.lambda0 is None:
            raise ConfigError("criterion 'custom' requires lambda0")
        if self.start not in START_POLICIES:
            raise ConfigError(f"start must be one of {START_POLICIES}")
        if self.start == "user" and self.beta0 is None:
            raise ConfigError("start 'user' requires beta0")

    def penalty_for(self, ds: SurvivalDataset) -> MicPenalty:
        if self.criterion == "bic":
            return MicPenalty.bic(ds.n_events, a=self.a)
        if self.criterion == "aic":
            return MicPenalty.aic(ds.n_events, a=self.a)
        return MicPenalty.custom(self.lambda0, ds.n_events, a=self.a)


def starting_point(ds: SurvivalDataset, config: MicConfig) -> np.ndarray:
    """Initial coefficient vector per the configured policy."""
    if config.start == "mple":
        return fit_mple(ds)
    if config.start == "ridge":
        return fit_ridge(ds, config.theta0)
    if config.start == "zero":
        return np.zeros(ds.p)
    beta0 = np.asarray(config.beta0, dtype=float)
    if beta0.shape != (ds.p,):
        raise ConfigError(f"user beta0 must have length {ds.p}")
    return beta0


def fit_mic(ds: SurvivalDataset, config: MicConfig | None = None) -> FitResult:
    """Run the full sparse fit and post-fit inference on ``ds``."""
    config = config or MicConfig()
    if config.scale and not ds.standardized:
        ds = standardize(ds)
    pen = config.penalty_for(ds)
    beta0 = starting_point(ds, config)
    gamma, report = minimize_mic(ds, pen, beta0, config.optimizer)
    beta = beta_from_gamma(gamma, pen.a)

    vcov, flags = vcov_gamma(ds, gamma, pen, method=config.vcov_method)
    se_g = np.sqrt(np.clip(np.diag(vcov), 0.0, None))
    z, p_value, lower, upper = wald_tests(gamma, se_g, config.conf_level)
    se_b, beta_flags = se_beta(ds, gamma, pen)
    flags.update(beta_flags)

    return FitResult(
        names=ds.names,
        beta0=beta0,
        gamma=gamma,
        beta=beta,
        se_gamma=se_g,
        z=z,
        p_value=p_value,
        ci_lower=lower,
        ci_upper=upper,
        se_beta=se_b,
        vcov_gamma=vcov,
        min_q=report.final_value,
        bic=model_bic(ds, beta),
        conf_level=config.conf_level,
        penalty=pen,
        n=ds.n,
        n_events=ds.n_events,
        report=report,
        config=config,
        flags=flags,
    )
