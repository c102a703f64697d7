"""
Distance-based and benchmark portfolios and their return series
"""

import logging
from typing import Sequence

import numpy as np
import pandas as pd

from carbon_hedge.core.errors import PortfolioError
from carbon_hedge.models.market import ReturnsPanel
from carbon_hedge.models.portfolio import Portfolio

logger = logging.getLogger(__name__)

CLOSE = "close"
FAR = "far"
FAR_CLOSE = "far-close"
SP = "S&P"
RANDOM = "random"


def _check_ranking(ranking: Sequence[str], k: int) -> None:
    if k < 1:
        raise PortfolioError("empty legs: k must be at least 1")
    if len(ranking) < 2 * k:
        raise PortfolioError(f"ranking too short: {len(ranking)} < {2 * k}")
    if len(set(ranking)) != len(ranking):
        raise PortfolioError("ranking contains duplicate tickers")


def build_close_far(ranking: Sequence[str], k: int = 30) -> tuple[Portfolio, Portfolio]:
    """Long-only portfolios of the k nearest and the k furthest stocks"""
    _check_ranking(ranking, k)
    close = Portfolio(name=CLOSE, long_members=tuple(ranking[:k]))
    far = Portfolio(name=FAR, long_members=tuple(ranking[-k:]))
    return close, far


def build_far_close(ranking: Sequence[str], k: int = 15) -> Portfolio:
    """Long the k furthest, short the k nearest"""
    _check_ranking(ranking, k)
    return Portfolio(
        name=FAR_CLOSE,
        long_members=tuple(ranking[-k:]),
        short_members=tuple(ranking[:k]),
    )


def build_benchmarks(
    universe: Sequence[str], n_random: int = 30, seed: int = 0
) -> tuple[Portfolio, Portfolio]:
    """Equal-weight market portfolio and a seeded random selection"""
    if n_random < 1:
        raise PortfolioError("empty legs: n_random must be at least 1")
    if len(universe) < n_random:
        raise PortfolioError(f"universe too small: {len(universe)} < {n_random}")
    tickers = sorted(universe)
    rng = np.random.default_rng(seed)
    picked = rng.choice(len(tickers), size=n_random, replace=False)
    sp = Portfolio(name=SP, long_members=tuple(tickers))
    random = Portfolio(name=RANDOM, long_members=tuple(tickers[i] for i in sorted(picked)))
    return sp, random


def portfolio_returns(
    portfolio: Portfolio, returns: ReturnsPanel, arithmetic: bool = False
) -> pd.Series:
    """Daily return: mean of long-leg returns minus mean of short-leg returns

    With `arithmetic` each leg aggregates simple returns and is converted back
    to a log return.
    """
    missing = [t for t in portfolio.members if t not in returns.frame.columns]
    if missing:
        raise PortfolioError(
            f"portfolio {portfolio.name} has tickers missing from panel: {missing}"
        )

    def leg(members: Sequence[str]) -> pd.Series:
        block = returns.frame[list(members)]
        if arithmetic:
            return np.log(np.exp(block).mean(axis=1))
        return block.mean(axis=1)

    series = leg(portfolio.long_members)
    if portfolio.short_members:
        series = series - leg(portfolio.short_members)
    return series.rename(portfolio.name)
