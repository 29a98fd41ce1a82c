"""NumPy implementation of the risk-set sweep.

Inputs are pre-sorted by descending time so every risk set is a prefix of
the arrays. ``risk_end[i]`` is the last index sharing ``time[i]``: tied
subjects stay in each other's risk set and tied events share one
denominator. All exponentials are shifted by the max linear predictor; a
fully underflowed denominator yields ``-inf`` rather than NaN.
"""

import numpy as np

__all__ = ["cox_sweep"]


def cox_sweep(eta, x, status, risk_end, want_score=False, want_info=False):
    """One pass over the sorted data.

    Returns ``(loglik, score, info)``; ``score``/``info`` are None unless
    requested. ``eta`` is the linear predictor in sorted order, ``x`` the
    sorted covariate matrix, ``status`` a 0/1 vector, ``risk_end`` the
    tie-block end index per row.
    """
    n, p = x.shape
    shift = eta.max()
    w = np.exp(eta - shift)
    cum0 = np.cumsum(w)
    event_pos = np.flatnonzero(status)
    ends = risk_end[event_pos]
    denom = cum0[ends]
    if not (denom > 0.0).all():
        nan_vec = np.full(p, np.nan)
        return (-np.inf,
                nan_vec if want_score else None,
                np.full((p, p), np.nan) if want_info else None)
    ll = float(np.sum(eta[event_pos] - shift) - np.sum(np.log(denom)))

    score = None
    cum1 = None
    if want_score or want_info:
        cum1 = np.cumsum(w[:, None] * x, axis=0)
        score = (x[event_pos] - cum1[ends] / denom[:, None]).sum(axis=0)

    info = None
    if want_info:
        info = np.zeros((p, p))
        s2 = np.zeros((p, p))
        uniq_ends, counts = np.unique(ends, return_counts=True)
        pos = 0
        for end, cnt in zip(uniq_ends, counts):
            block = x[pos:end + 1]
            s2 += (block * w[pos:end + 1, None]).T @ block
            pos = end + 1
            s0 = cum0[end]
            mu = cum1[end] / s0
            info += cnt * (s2 / s0 - np.outer(mu, mu))
    return ll, score, info
