"""
CAPM / FF3 / FF5 regressions with Newey-West standard errors
"""

import logging
import math
from typing import Literal, Optional, Sequence, Union

import numpy as np
import pandas as pd
from scipy import stats

from carbon_hedge.core.config import ExcessReturns
from carbon_hedge.core.errors import DataError, NumericalError
from carbon_hedge.models.market import RF, FactorPanel
from carbon_hedge.models.regression import (
    INTERCEPT,
    CoefficientEstimate,
    ModelSpec,
    RegressionResult,
)
from carbon_hedge.services.residualizer import add_constant, ols_fit

logger = logging.getLogger(__name__)

Lag = Union[Literal["auto"], int]

STAR_LEVELS: tuple[tuple[float, str], ...] = ((0.01, "***"), (0.05, "**"), (0.10, "*"))


def newey_west_lag(n_obs: int) -> int:
    """floor(4 * (T/100)^(2/9))"""
    return int(math.floor(4.0 * (n_obs / 100.0) ** (2.0 / 9.0)))


def newey_west_cov(
    X: np.ndarray,
    residuals: np.ndarray,
    lag: int,
    xtx_inverse: Optional[np.ndarray] = None,
) -> np.ndarray:
    """HAC covariance of OLS coefficients with Bartlett weights

    Scaled by T/(T-k); lag 0 gives the White estimator.
    """
    X = np.asarray(X, dtype=float)
    e = np.asarray(residuals, dtype=float)
    T, k = X.shape
    if e.shape[0] != T:
        raise DataError(f"residuals ({e.shape[0]}) and design matrix ({T}) are not aligned")
    if lag < 0:
        raise NumericalError(f"lag must be non-negative, got {lag}")
    if lag >= T:
        raise NumericalError(f"lag {lag} must be smaller than the sample size {T}")

    scores = X * e[:, None]
    meat = scores.T @ scores
    for l in range(1, lag + 1):
        weight = 1.0 - l / (lag + 1.0)
        gamma = scores[l:].T @ scores[:-l]
        meat += weight * (gamma + gamma.T)

    bread = xtx_inverse if xtx_inverse is not None else np.linalg.inv(X.T @ X)
    cov = bread @ meat @ bread * (T / (T - k))
    return (cov + cov.T) / 2.0


def significance_stars(p_value: float) -> str:
    for level, stars in STAR_LEVELS:
        if p_value < level:
            return stars
    return ""


def dependent_series(
    series: pd.Series,
    factors: FactorPanel,
    long_only: bool,
    excess_returns: ExcessReturns = ExcessReturns.AUTO,
) -> pd.Series:
    """Portfolio series net of RF for long-only portfolios (by default)"""
    subtract = excess_returns == ExcessReturns.ALWAYS or (
        excess_returns == ExcessReturns.AUTO and long_only
    )
    if not subtract:
        return series
    if RF not in factors.columns:
        raise DataError("factor panel lacks RF for excess returns")
    return series - factors.series(RF)


def run_model(
    spec: ModelSpec,
    portfolio_series: pd.Series,
    factors: FactorPanel,
    lag: Lag = "auto",
    long_only: bool = True,
    excess_returns: ExcessReturns = ExcessReturns.AUTO,
) -> RegressionResult:
    """OLS of the portfolio on the model's regressors with HAC inference"""
    if not portfolio_series.index.equals(factors.dates):
        raise DataError(f"portfolio {portfolio_series.name} is not aligned with the factor panel")
    missing = [c for c in spec.regressors if c not in factors.columns]
    if missing:
        raise DataError(f"factor panel lacks {missing} for {spec.title}")

    y = dependent_series(portfolio_series, factors, long_only, excess_returns)
    X = add_constant(factors.frame[list(spec.regressors)].to_numpy(dtype=float))
    fit = ols_fit(y.to_numpy(dtype=float), X)
    T, k = X.shape
    lag_used = newey_west_lag(T) if lag == "auto" else int(lag)
    cov = newey_west_cov(X, fit.residuals, lag_used, xtx_inverse=fit.xtx_inverse)
    standard_errors = np.sqrt(np.clip(np.diag(cov), 0.0, None))

    coefficients = []
    names = (INTERCEPT,) + spec.regressors
    for name, estimate, se in zip(names, fit.coefficients, standard_errors):
        if se > 0:
            t_stat = float(estimate / se)
        else:
            t_stat = 0.0 if estimate == 0 else math.copysign(math.inf, estimate)
        p_value = float(min(1.0, 2.0 * stats.t.sf(abs(t_stat), df=T - k)))
        coefficients.append(
            CoefficientEstimate(
                name=name,
                estimate=float(estimate),
                hac_se=float(se),
                t_stat=t_stat,
                p_value=p_value,
                stars=significance_stars(p_value),
            )
        )

    return RegressionResult(
        portfolio=str(portfolio_series.name),
        spec=spec,
        coefficients=coefficients,
        r_squared=fit.r_squared,
        adj_r_squared=fit.adj_r_squared,
        n_obs=T,
        lag_used=lag_used,
    )


def format_estimate(estimate: float, stars: str = "") -> str:
    """4 decimals with stars; keeps the sign of values that round to zero"""
    return f"{estimate:.4f}{stars}"


def format_table(results: Sequence[RegressionResult], title: Optional[str] = None) -> str:
    """Plain-text regression table: estimates with stars, HAC SEs in brackets beneath

    One column per result, in the given order.
    """
    if not results:
        return ""
    names: list[str] = []
    for result in results:
        for coef in result.coefficients:
            if coef.name not in names:
                names.append(coef.name)

    header = [["", *[r.portfolio for r in results]], ["", *[r.spec.title for r in results]]]
    body: list[list[str]] = []
    for name in names:
        estimates, errors = [name], [""]
        for result in results:
            coef = result.coefficient(name)
            if coef is None:
                estimates.append("-")
                errors.append("")
            else:
                estimates.append(format_estimate(coef.estimate, coef.stars))
                errors.append(f"({coef.hac_se:.4f})")
        body.extend([estimates, errors])
    body.append(["R-squared", *[f"{r.r_squared:.4f}" for r in results]])
    body.append(["Adj. R-squared", *[f"{r.adj_r_squared:.4f}" for r in results]])
    body.append(["Observations", *[str(r.n_obs) for r in results]])
    body.append(["NW lag", *[str(r.lag_used) for r in results]])

    rows = header + body
    widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
    lines = []
    if title:
        lines.append(title)
    for i, row in enumerate(rows):
        cells = [row[0].ljust(widths[0])] + [
            cell.rjust(width) for cell, width in zip(row[1:], widths[1:])
        ]
        lines.append("  ".join(cells).rstrip())
        if i == len(header) - 1:
            lines.append("-" * len(lines[-1]))
    return "\n".join(lines) + "\n"
