"""Total-tenure regression and lead time.

TTL comes from ordinary least squares with a tiny ridge term for
rank-deficiency safety (one-hot blocks are collinear); lead time is
TTL minus current tenure, clamped at zero with an overdue flag.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Mapping, Sequence

import numpy as np

from .errors import DataError, ModelError

DEFAULT_RIDGE_EPS = 1e-8


@dataclass(frozen=True)
class RegressionModel:
    coefficients: np.ndarray
    intercept: float
    feature_names: tuple[str, ...]
    rmse: float
    r_squared: float
    ridge_eps: float
    # Training-set column means, kept so per-feature tenure contributions
    # can be reported relative to a typical employee.
    feature_means: np.ndarray

    def __post_init__(self) -> None:
        if self.coefficients.shape[0] != len(self.feature_names):
            raise ModelError(
                f"{self.coefficients.shape[0]} coefficients for "
                f"{len(self.feature_names)} feature names")
        if self.rmse < 0:
            raise ModelError("rmse cannot be negative")
        if self.r_squared > 1:
            raise ModelError("r_squared cannot exceed 1")

    def to_dict(self) -> dict[str, Any]:
        return {
            "coefficients": self.coefficients.tolist(),
            "intercept": self.intercept,
            "feature_names": list(self.feature_names),
            "rmse": self.rmse,
            "r_squared": self.r_squared,
            "ridge_eps": self.ridge_eps,
            "feature_means": self.feature_means.tolist(),
        }

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> "RegressionModel":
        return cls(
            coefficients=np.asarray(doc["coefficients"], dtype=np.float64),
            intercept=float(doc["intercept"]),
            feature_names=tuple(doc["feature_names"]),
            rmse=float(doc["rmse"]),
            r_squared=float(doc["r_squared"]),
            ridge_eps=float(doc["ridge_eps"]),
            feature_means=np.asarray(doc["feature_means"], dtype=np.float64),
        )


@dataclass(frozen=True)
class TenurePrediction:
    ttl: float
    current_tenure: float
    lead_time_raw: float
    lead_time: float
    overdue: bool

    def to_dict(self) -> dict[str, Any]:
        return {
            "ttl": self.ttl,
            "current_tenure": self.current_tenure,
            "lead_time_raw": self.lead_time_raw,
            "lead_time": self.lead_time,
            "overdue": self.overdue,
        }


def fit_ols(X: Any, y: Any, ridge_eps: float = DEFAULT_RIDGE_EPS,
            feature_names: Sequence[str] | None = None) -> RegressionModel:
    """Least squares with an unpenalized intercept.

    Solved as an augmented least-squares system by SVD factorization:
    rows [X | 1] fit y, extra rows sqrt(ridge_eps)*I pull the feature
    coefficients (not the intercept) toward zero.
    """
    if ridge_eps < 0:
        raise ModelError(f"ridge_eps must be non-negative, got {ridge_eps}")
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    y = np.asarray(y, dtype=np.float64)
    n, m = X.shape
    if n < 2:
        raise DataError(f"need at least 2 rows to fit, got {n}")
    if y.shape != (n,):
        raise DataError(f"y shape {y.shape} does not match {n} rows")
    if not np.isfinite(X).all() or not np.isfinite(y).all():
        raise DataError("design matrix and targets must be finite")
    if feature_names is None:
        feature_names = tuple(f"x{i}" for i in range(m))
    elif len(feature_names) != m:
        raise DataError(f"{len(feature_names)} names for {m} columns")

    design = np.hstack([X, np.ones((n, 1))])
    if ridge_eps > 0:
        penalty = np.hstack([np.sqrt(ridge_eps) * np.eye(m), np.zeros((m, 1))])
        a = np.vstack([design, penalty])
        b = np.concatenate([y, np.zeros(m)])
    else:
        a, b = design, y
    beta, *_ = np.linalg.lstsq(a, b, rcond=None)
    coef = beta[:m]
    intercept = float(beta[m])

    fitted = design @ beta
    resid = fitted - y
    rmse = float(np.sqrt(np.mean(resid * resid)))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot == 0.0:
        r_squared = 0.0
    else:
        r_squared = 1.0 - float(np.sum(resid * resid)) / ss_tot
    return RegressionModel(
        coefficients=coef,
        intercept=intercept,
        feature_names=tuple(feature_names),
        rmse=rmse,
        r_squared=r_squared,
        ridge_eps=float(ridge_eps),
        feature_means=X.mean(axis=0),
    )


def predict_ttl(model: RegressionModel, x: Any) -> float:
    """intercept + coefficients . x, unclamped (lead_time does the clamping)."""
    values = np.asarray(getattr(x, "values", x), dtype=np.float64)
    if values.shape != model.coefficients.shape:
        raise ModelError(
            f"feature vector shape {values.shape} does not match model "
            f"with {model.coefficients.shape[0]} features")
    ttl = model.intercept + float(model.coefficients @ values)
    if not np.isfinite(ttl):
        raise ModelError("prediction is not finite")
    return ttl


def lead_time(ttl: float, current_tenure: float) -> TenurePrediction:
    """LT = TTL - CT; reported raw and clamped at zero."""
    if current_tenure < 0:
        raise DataError(f"current tenure cannot be negative: {current_tenure}")
    raw = ttl - current_tenure
    return TenurePrediction(
        ttl=float(ttl),
        current_tenure=float(current_tenure),
        lead_time_raw=float(raw),
        lead_time=max(0.0, float(raw)),
        overdue=raw < 0,
    )
