"""
Risk and performance metrics of daily return series
"""

import logging
from typing import Union

import numpy as np
import pandas as pd

from carbon_hedge.core.errors import MetricError
from carbon_hedge.models.metrics import PerfReport

logger = logging.getLogger(__name__)

ArrayLike = Union[np.ndarray, pd.Series, list[float]]
RiskFree = Union[ArrayLike, float]

TRADING_DAYS = 252
MIN_VAR_OBSERVATIONS = 20


def _excess(series: ArrayLike, rf: RiskFree = 0.0) -> np.ndarray:
    r = np.asarray(series, dtype=float)
    risk_free = np.asarray(rf, dtype=float)
    if risk_free.ndim and risk_free.shape != r.shape:
        raise MetricError(f"risk-free series length {risk_free.shape} does not match {r.shape}")
    return r - risk_free


def _scale(annualize: bool, periods_per_year: int) -> float:
    return float(np.sqrt(periods_per_year)) if annualize else 1.0


def sharpe(
    series: ArrayLike,
    rf: RiskFree = 0.0,
    annualize: bool = True,
    periods_per_year: int = TRADING_DAYS,
) -> float:
    """mean(r - rf) / std(r - rf), sample std, times sqrt(252) when annualized"""
    excess = _excess(series, rf)
    if excess.size < 2:
        raise MetricError("Sharpe ratio needs at least 2 observations")
    if np.ptp(excess) == 0:
        raise MetricError("zero variance")
    return float(excess.mean() / excess.std(ddof=1)) * _scale(annualize, periods_per_year)


def sortino(
    series: ArrayLike,
    rf: RiskFree = 0.0,
    annualize: bool = True,
    periods_per_year: int = TRADING_DAYS,
) -> float:
    """mean(r - rf) over the downside deviation sqrt(mean(min(r - rf, 0)^2))"""
    excess = _excess(series, rf)
    downside = np.minimum(excess, 0.0)
    if not (downside < 0).any():
        raise MetricError("no downside observations")
    deviation = np.sqrt(np.mean(downside**2))
    return float(excess.mean() / deviation) * _scale(annualize, periods_per_year)


def omega(series: ArrayLike, threshold: float = 0.0) -> float:
    """Gains above the threshold over losses below it"""
    r = np.asarray(series, dtype=float)
    gains = np.maximum(r - threshold, 0.0).sum()
    losses = np.maximum(threshold - r, 0.0).sum()
    if losses == 0:
        raise MetricError("zero loss mass")
    return float(gains / losses)


def mdd(series: ArrayLike) -> float:
    """Largest peak-to-trough fall of the wealth path exp(cumsum(r)) from 1"""
    r = np.asarray(series, dtype=float)
    if r.size == 0:
        raise MetricError("empty series")
    wealth = np.exp(np.concatenate([[0.0], np.cumsum(r)]))
    peaks = np.maximum.accumulate(wealth)
    return float(np.max(1.0 - wealth / peaks))


def var5(series: ArrayLike) -> float:
    """Negated empirical 5th percentile (linear interpolation)"""
    r = np.asarray(series, dtype=float)
    if r.size < MIN_VAR_OBSERVATIONS:
        raise MetricError(f"too few observations for VaR: {r.size} < {MIN_VAR_OBSERVATIONS}")
    return float(-np.percentile(r, 5, method="linear"))


def perf_report(
    name: str,
    series: ArrayLike,
    rf: RiskFree = 0.0,
    annualize: bool = True,
    periods_per_year: int = TRADING_DAYS,
    omega_threshold: float = 0.0,
) -> PerfReport:
    """All five metrics of one series"""
    return PerfReport(
        portfolio=name,
        sharpe=sharpe(series, rf, annualize, periods_per_year),
        sortino=sortino(series, rf, annualize, periods_per_year),
        omega=omega(series, omega_threshold),
        mdd=mdd(series),
        var5=var5(series),
    )
