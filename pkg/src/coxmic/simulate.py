"""Synthetic right-censored data and the timing/selection benchmark grid.

The generative model: covariates are zero-mean unit-variance Gaussians
with AR(1) cross-correlation, event times are exponential with rate
``exp(x @ beta_true)``, and censoring times are uniform on ``(0, c)``
where ``c`` is calibrated by bisection on the realized sample so the
achieved censoring fraction hits the target. Everything is deterministic
given the seed.
"""

from __future__ import annotations

import time as _time
from dataclasses import dataclass

import numpy as np

from .dataset import SurvivalDataset
from .errors import CalibrationError, ValidationError
from .fit import MicConfig, fit_mic
from .partial_likelihood import fit_mple, partial_loglik

__all__ = ["SimSpec", "generate", "stepwise_bic", "bench_grid"]


@dataclass(frozen=True)
class SimSpec:
    n: int
    p: int
    true_beta: np.ndarray = None
    rho: float = 0.0
    target_censoring: float = 0.25
    seed: int = 0

    def __post_init__(self):
        if self.n < 2:
            raise ValidationError("n must be at least 2")
        if self.p < 1:
            raise ValidationError("p must be at least 1")
        if not 0.0 <= self.rho < 1.0:
            raise ValidationError("rho must be in [0, 1)")
        if not 0.0 < self.target_censoring < 1.0:
            raise ValidationError("target_censoring must be in (0, 1)")
        beta = self.true_beta
        if beta is None:
            beta = np.zeros(self.p)
        beta = np.asarray(beta, dtype=float)
        if beta.shape != (self.p,):
            raise ValidationError(f"true_beta must have length {self.p}")
        beta.setflags(write=False)
        object.__setattr__(self, "true_beta", beta)


def _ar1_gaussian(rng, n, p, rho):
    z = rng.standard_normal((n, p))
    if rho == 0.0:
        return z
    x = np.empty_like(z)
    x[:, 0] = z[:, 0]
    root = np.sqrt(1.0 - rho * rho)
    for j in range(1, p):
        x[:, j] = rho * x[:, j - 1] + root * z[:, j]
    return x


def _calibrate_censoring(event_times, u, target, tol=None, max_iter=200):
    """Bisect the censoring horizon c so that mean(u*c < T) hits the target.

    The achieved fraction is a step function of c with jumps at T_i/u_i;
    bisection narrows onto the step closest to the target.
    """
    n = event_times.size
    tol = 0.5 / n if tol is None else tol
    ratios = event_times / u

    def censored_frac(c):
        return float(np.mean(u * c < event_times))

    lo, hi = 0.0, float(ratios.max()) * (1.0 + 1e-12)
    # frac(lo+) = 1 (everything censored), frac(hi) = 0
    achievable = (censored_frac(hi), 1.0)
    if not achievable[0] <= target <= achievable[1]:
        raise CalibrationError(
            f"target censoring {target} outside achievable range {achievable}")
    c = 0.5 * (lo + hi)
    for _ in range(max_iter):
        c = 0.5 * (lo + hi)
        frac = censored_frac(c)
        if abs(frac - target) <= tol:
            return c
        if frac > target:
            lo = c
        else:
            hi = c
    return c


def generate(spec: SimSpec) -> SurvivalDataset:
    """Draw one dataset from the spec's generative model."""
    rng = np.random.default_rng(spec.seed)
    x = _ar1_gaussian(rng, spec.n, spec.p, spec.rho)
    eta = x @ spec.true_beta
    event_times = rng.exponential(scale=np.exp(-eta))
    u = rng.uniform(size=spec.n)
    c = _calibrate_censoring(event_times, u, spec.target_censoring)
    censor_times = u * c
    observed = np.minimum(event_times, censor_times)
    status = (event_times <= censor_times).astype(float)
    if status.sum() < 1:
        raise CalibrationError("calibration left no events; lower the target")
    names = tuple(f"x{j + 1}" for j in range(spec.p))
    return SurvivalDataset(time=observed, status=status, covariates=x,
                           names=names)


def stepwise_bic(ds: SurvivalDataset):
    """Forward selection on BIC = -2*loglik + ln(n_events)*df.

    Adds the best single variable while doing so lowers BIC. Returns
    ``(selected_indices, beta_full, bic)`` with ``beta_full`` zero off
    the selected set.
    """
    log_n0 = np.log(ds.n_events)
    selected: list[int] = []
    best_bic = -2.0 * partial_loglik(ds, np.zeros(ds.p))
    beta_sub = np.zeros(0)
    while len(selected) < ds.p:
        best_j, best_candidate = None, None
        for j in range(ds.p):
            if j in selected:
                continue
            cols = selected + [j]
            sub = SurvivalDataset(time=ds.time, status=ds.status,
                                  covariates=ds.covariates[:, cols],
                                  names=tuple(ds.names[c] for c in cols),
                                  standardized=ds.standardized)
            try:
                beta_try = fit_mple(sub)
            except Exception:
                continue
            bic = -2.0 * partial_loglik(sub, beta_try) + log_n0 * len(cols)
            if bic < best_bic - 1e-10 and (best_candidate is None
                                           or bic < best_candidate[0]):
                best_candidate = (bic, beta_try)
                best_j = j
        if best_j is None:
            break
        selected.append(best_j)
        best_bic, beta_sub = best_candidate
    beta_full = np.zeros(ds.p)
    if selected:
        beta_full[selected] = beta_sub
    return sorted(selected), beta_full, best_bic


def _time_call(func):
    t0 = _time.perf_counter()
    out = func()
    return out, _time.perf_counter() - t0


def bench_grid(specs, methods=("mic", "mple", "stepwise"), runs: int = 3,
               config: MicConfig | None = None):
    """Mean wall-clock per method per cell, plus MIC support recovery.

    Cells run serially so timings do not contend; run r of a cell uses
    ``spec.seed + r``. Returns a list of row dicts ready for TSV/JSON
    rendering, with a metadata dict prepended.
    """
    config = config or MicConfig()
    known = {"mic", "mple", "stepwise"}
    unknown = set(methods) - known
    if unknown:
        raise ValidationError(f"unknown methods: {sorted(unknown)}")
    rows = [{"meta": {"timing": "wall-clock seconds, cells run serially",
                      "runs": runs}}]
    for spec in specs:
        row = {"n": spec.n, "p": spec.p,
               "censoring": spec.target_censoring, "seed": spec.seed}
        timings = {m: [] for m in methods}
        recovery = []
        truth = spec.true_beta != 0.0
        for r in range(runs):
            ds = generate(SimSpec(n=spec.n, p=spec.p, true_beta=spec.true_beta,
                                  rho=spec.rho,
                                  target_censoring=spec.target_censoring,
                                  seed=spec.seed + r))
            for m in methods:
                try:
                    if m == "mic":
                        fit, secs = _time_call(lambda: fit_mic(ds, config))
                        sel = fit.selected
                        recovery.append((int((sel & truth).sum()),
                                         int((sel & ~truth).sum())))
                    elif m == "mple":
                        _, secs = _time_call(lambda: fit_mple(ds))
                    else:
                        _, secs = _time_call(lambda: stepwise_bic(ds))
                    timings[m].append(secs)
                except Exception as exc:  # noqa: BLE001 - grid keeps going
                    row[f"{m}_error"] = str(exc)
        for m in methods:
            if timings[m]:
                row[f"{m}_seconds"] = float(np.mean(timings[m]))
        if recovery:
            row["mic_true_positives"] = float(np.mean([tp for tp, _ in recovery]))
            row["mic_false_positives"] = float(np.mean([fp for _, fp in recovery]))
        rows.append(row)
    return rows
