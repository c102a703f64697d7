"""
OLS engine and FF5 residualization of the stock return panel
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Optional

import numpy as np
import pandas as pd
from scipy import linalg

from carbon_hedge.core.errors import DataError, RankDeficientError
from carbon_hedge.models.market import (
    FF5_COLUMNS,
    FactorPanel,
    ResidualPanel,
    ReturnsPanel,
)
from carbon_hedge.models.regression import OlsFit

logger = logging.getLogger(__name__)

RANK_TOLERANCE = 1e-10


def add_constant(columns: np.ndarray) -> np.ndarray:
    """Prepend a column of ones to a T x m regressor matrix"""
    columns = np.asarray(columns, dtype=float)
    if columns.ndim == 1:
        columns = columns[:, None]
    return np.column_stack([np.ones(columns.shape[0]), columns])


def ols_fit(y: np.ndarray, X: np.ndarray) -> OlsFit:
    """Least squares of y on X (X carries the constant column) via QR"""
    y = np.asarray(y, dtype=float)
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] != y.shape[0]:
        raise DataError(f"design matrix shape {X.shape} does not match {y.shape[0]} observations")
    n, k = X.shape
    if n < k + 2:
        raise DataError(f"need at least {k + 2} observations for {k} parameters, got {n}")

    singular_values = np.linalg.svd(X, compute_uv=False)
    if singular_values[-1] < RANK_TOLERANCE * singular_values[0]:
        condition = singular_values[0] / max(singular_values[-1], 1e-300)
        raise RankDeficientError(f"rank-deficient design matrix (condition {condition:.3g})")

    Q, R = np.linalg.qr(X, mode="reduced")
    coefficients = linalg.solve_triangular(R, Q.T @ y, lower=False)
    fitted = X @ coefficients
    residuals = y - fitted

    ssr = float(residuals @ residuals)
    centered = y - y.mean()
    sst = float(centered @ centered)
    # A constant y has nothing to explain
    r_squared = 1.0 - ssr / sst if sst > 0 else 0.0
    adj_r_squared = 1.0 - (1.0 - r_squared) * (n - 1) / (n - k)

    r_inverse = linalg.solve_triangular(R, np.eye(k), lower=False)
    xtx_inverse = r_inverse @ r_inverse.T

    return OlsFit(
        coefficients=coefficients,
        residuals=residuals,
        fitted=fitted,
        r_squared=r_squared,
        adj_r_squared=adj_r_squared,
        xtx_inverse=xtx_inverse,
    )


def residualize_panel(
    returns: ReturnsPanel, factors: FactorPanel, threads: int = 1
) -> ResidualPanel:
    """Replace every stock column by its FF5 regression residuals

    Columns whose regression fails are dropped with a warning.
    """
    missing = [c for c in FF5_COLUMNS if c not in factors.columns]
    if missing:
        raise DataError(f"factor panel lacks {missing}")
    if not returns.dates.equals(factors.dates):
        raise DataError("returns and factors must be aligned before residualization")

    X = add_constant(factors.frame[list(FF5_COLUMNS)].to_numpy(dtype=float))
    columns = returns.tickers

    def fit_column(ticker: str) -> Optional[np.ndarray]:
        try:
            return ols_fit(returns.frame[ticker].to_numpy(dtype=float), X).residuals
        except (DataError, RankDeficientError) as e:
            logger.warning(f"Dropping {ticker} from residual panel: {e.message}")
            return None

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(fit_column, columns))
    else:
        results = [fit_column(ticker) for ticker in columns]

    kept = {t: r for t, r in zip(columns, results) if r is not None}
    if not kept:
        raise DataError("every column failed FF5 residualization")
    frame = pd.DataFrame(kept, index=returns.dates, columns=list(kept))
    logger.info(f"Residualized {len(kept)} of {len(columns)} stocks on FF5")
    return ResidualPanel(frame=frame)


def residualize_series(series: pd.Series, factors: FactorPanel) -> pd.Series:
    """FF5 residuals of a single aligned series"""
    X = add_constant(factors.frame[list(FF5_COLUMNS)].to_numpy(dtype=float))
    fit = ols_fit(series.to_numpy(dtype=float), X)
    return pd.Series(fit.residuals, index=series.index, name=series.name)
