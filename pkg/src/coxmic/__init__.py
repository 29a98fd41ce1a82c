"""Sparse Cox proportional hazards estimation via a smoothed information
criterion, with exact-zero estimates and selection-free Wald inference."""

from ._backend import BACKEND as kernel_backend, available_backends
from .dataset import SurvivalDataset, destandardize, load_csv, recode_column, standardize
from .fit import MicConfig, fit_mic, starting_point
from .inference import FitResult, model_bic, se_beta, vcov_gamma, wald_tests
from .optimize import OptimizerConfig, OptimizerReport, bfgs_minimize, minimize_mic, sann_minimize
from .partial_likelihood import (fit_mple, fit_ridge, information,
                                 loglik_and_score, partial_loglik, score)
from .path import FlatnessReport, PathResult, path_flatness, path_tsv, scan_a
from .penalty import MicPenalty, beta_from_gamma, mic_objective, mic_objective_grad, tanh_weight
from .simulate import SimSpec, bench_grid, generate, stepwise_bic

__version__ = "0.1.0"

__all__ = [
    "SurvivalDataset", "load_csv", "recode_column", "standardize", "destandardize",
    "MicConfig", "fit_mic", "starting_point",
    "FitResult", "vcov_gamma", "wald_tests", "se_beta", "model_bic",
    "OptimizerConfig", "OptimizerReport", "sann_minimize", "bfgs_minimize", "minimize_mic",
    "partial_loglik", "loglik_and_score", "score", "information", "fit_mple", "fit_ridge",
    "MicPenalty", "tanh_weight", "beta_from_gamma", "mic_objective", "mic_objective_grad",
    "PathResult", "FlatnessReport", "scan_a", "path_flatness", "path_tsv",
    "SimSpec", "generate", "bench_grid", "stepwise_bic",
    "kernel_backend", "available_backends",
    "__version__",
]
