"""Right-censored survival data: ingestion, recoding, standardization.

The canonical in-memory form is :class:`SurvivalDataset`: observed times,
0/1 event indicators and a dense covariate matrix. Datasets are immutable
after construction and safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
import pandas as pd

from .errors import ConfigError, DataError, DegenerateColumnError, ValidationError

__all__ = [
    "SurvivalDataset",
    "load_csv",
    "recode_column",
    "standardize",
    "destandardize",
]


@dataclass(frozen=True, eq=False)
class SurvivalDataset:
    """One row per subject: observed time, event indicator, covariates.

    Attributes
    ----------
    time : (n,) float array, strictly positive observed times.
    status : (n,) float array of 0/1; 1 marks an observed event.
    covariates : (n, p) float matrix.
    names : tuple of p column labels.
    standardized : True when each column has mean 0 and unit (n-1) sd.
    centers, scales : the affine transform applied per column;
        identity (0, 1) when unstandardized. raw = std * scale + center.
    """

    time: np.ndarray
    status: np.ndarray
    covariates: np.ndarray
    names: tuple
    standardized: bool = False
    centers: np.ndarray = field(default=None)
    scales: np.ndarray = field(default=None)

    def __post_init__(self):
        time = np.ascontiguousarray(np.asarray(self.time, dtype=float))
        status = np.ascontiguousarray(np.asarray(self.status, dtype=float))
        cov = np.ascontiguousarray(np.asarray(self.covariates, dtype=float))
        if cov.ndim != 2:
            raise ValidationError("covariates must be a 2-d matrix")
        n, p = cov.shape
        if time.shape != (n,) or status.shape != (n,):
            raise ValidationError("time/status length does not match covariate rows")
        if len(self.names) != p:
            raise ValidationError("names length does not match covariate columns")
        if n == 0:
            raise DataError("dataset has no rows")
        bad = np.flatnonzero(~(time > 0))
        if bad.size:
            raise ValidationError(f"non-positive time at row {bad[0]}")
        if not np.isin(status, (0.0, 1.0)).all():
            raise ValidationError("status values must be 0 or 1")
        if int(status.sum()) < 1:
            raise ValidationError("dataset has no events; the partial likelihood is vacuous")
        if not np.isfinite(cov).all():
            raise ValidationError("covariates contain missing or non-finite values")
        centers = self.centers
        scales = self.scales
        if centers is None:
            centers = np.zeros(p)
        if scales is None:
            scales = np.ones(p)
        centers = np.asarray(centers, dtype=float)
        scales = np.asarray(scales, dtype=float)
        if centers.shape != (p,) or scales.shape != (p,):
            raise ValidationError("centers/scales must be p-vectors")
        for arr in (time, status, cov, centers, scales):
            arr.setflags(write=False)
        object.__setattr__(self, "time", time)
        object.__setattr__(self, "status", status)
        object.__setattr__(self, "covariates", cov)
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "centers", centers)
        object.__setattr__(self, "scales", scales)

    @property
    def n(self) -> int:
        return self.time.shape[0]

    @property
    def p(self) -> int:
        return self.covariates.shape[1]

    @property
    def n_events(self) -> int:
        return int(self.status.sum())


def _canonical_key(value):
    """String key for a cell value: integral floats collapse to their int form."""
    if isinstance(value, float) and value.is_integer():
        return str(int(value))
    return str(value)


def recode_column(frame: pd.DataFrame, col: str, mapping: dict) -> pd.DataFrame:
    """Replace values in ``frame[col]`` according to ``mapping``.

    Keys are matched on the cell value or its canonical string form; the
    key ``"*"`` supplies a default for unmapped values. Missing cells are
    left missing. Raises ValidationError when a value has no mapping and
    no default exists.
    """
    if col not in frame.columns:
        raise ConfigError(f"column {col!r} not found")
    lookup = {_canonical_key(k): v for k, v in mapping.items()}
    default = lookup.pop("*", None)
    has_default = "*" in {_canonical_key(k) for k in mapping}

    def remap(value):
        if pd.isna(value):
            return value
        key = _canonical_key(value)
        if key in lookup:
            return lookup[key]
        if has_default:
            return default
        raise ValidationError(f"column {col!r}: unmapped value {value!r}")

    out = frame.copy()
    out[col] = [remap(v) for v in frame[col]]
    return out


def load_csv(path, time_col: str = "time", status_col: str = "status",
             drop_cols=(), recodes: dict | None = None) -> SurvivalDataset:
    """Read a survival table from CSV into a :class:`SurvivalDataset`.

    Comma-separated with a header row; empty fields, "NA" and "NaN" count
    as missing. ``recodes`` maps column name -> value map (see
    :func:`recode_column`) and is applied before listwise deletion. Rows
    with any missing value are removed. ``drop_cols`` are excluded from
    the covariate matrix (the time/status columns always are).
    """
    frame = pd.read_csv(path)
    for col in (time_col, status_col, *drop_cols):
        if col not in frame.columns:
            raise ConfigError(f"column {col!r} not found in {path}")
    for col, mapping in (recodes or {}).items():
        frame = recode_column(frame, col, mapping)
    frame = frame.dropna()
    if frame.shape[0] == 0:
        raise DataError(f"no rows left after listwise deletion in {path}")

    time = frame[time_col].to_numpy(dtype=float)
    try:
        status = frame[status_col].to_numpy(dtype=float)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"status column {status_col!r} is not numeric "
                              "after recoding") from exc
    keep = [c for c in frame.columns
            if c not in {time_col, status_col, *drop_cols}]
    try:
        cov = frame[keep].to_numpy(dtype=float)
    except (TypeError, ValueError) as exc:
        raise ValidationError("covariate columns must be numeric after "
                              f"recoding; offending columns among {keep}") from exc
    bad = np.flatnonzero(~(time > 0))
    if bad.size:
        label = frame.index[bad[0]]
        raise ValidationError(f"non-positive time in row {label}")
    return SurvivalDataset(time=time, status=status, covariates=cov,
                           names=tuple(keep))


def standardize(ds: SurvivalDataset) -> SurvivalDataset:
    """Center and scale every covariate column to mean 0, (n-1) sd 1.

    Records the applied transform in ``centers``/``scales`` so that
    :func:`destandardize` inverts it exactly. Constant columns are
    rejected.
    """
    cov = ds.covariates
    centers = cov.mean(axis=0)
    scales = cov.std(axis=0, ddof=1)
    degenerate = np.flatnonzero(scales == 0.0)
    if degenerate.size:
        raise DegenerateColumnError(
            f"column {ds.names[degenerate[0]]!r} is constant and cannot be standardized")
    std = (cov - centers) / scales
    if ds.standardized:
        # composing with the prior transform keeps raw-data recovery exact
        centers = ds.centers + centers * ds.scales
        scales = ds.scales * scales
    return replace(ds, covariates=std, standardized=True,
                   centers=centers, scales=scales)


def destandardize(ds: SurvivalDataset) -> SurvivalDataset:
    """Undo :func:`standardize`, recovering the raw covariate values."""
    if not ds.standardized:
        return ds
    raw = ds.covariates * ds.scales + ds.centers
    return replace(ds, covariates=raw, standardized=False,
                   centers=None, scales=None)
