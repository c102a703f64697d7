"""
Return computation and panel alignment
"""

import logging

import numpy as np
import pandas as pd

from carbon_hedge.core.errors import DataError
from carbon_hedge.models.market import FactorPanel, PricePanel, ReturnsPanel

logger = logging.getLogger(__name__)

MIN_ALIGNED_OBSERVATIONS = 30


def compute_log_returns(panel: PricePanel) -> ReturnsPanel:
    """Daily log returns ln(P[t+1] / P[t]), dated at t+1"""
    if len(panel) < 2:
        raise DataError("need at least 2 dates to compute returns")
    log_prices = np.log(panel.values)
    returns = np.diff(log_prices, axis=0)
    frame = pd.DataFrame(returns, index=panel.dates[1:], columns=panel.frame.columns)
    return ReturnsPanel(frame=frame)


def align(
    returns: ReturnsPanel,
    factors: FactorPanel,
    min_observations: int = MIN_ALIGNED_OBSERVATIONS,
) -> tuple[ReturnsPanel, FactorPanel]:
    """Restrict both panels to their common dates"""
    if len(returns) == 0 or len(factors) == 0:
        raise DataError("cannot align an empty panel")
    if returns.dates.equals(factors.dates):
        if len(returns) < min_observations:
            raise DataError(
                f"too few common observations: {len(returns)} < {min_observations}"
            )
        return returns, factors

    common = returns.dates.intersection(factors.dates)
    if len(common) == 0:
        raise DataError("empty intersection of return and factor dates")
    if len(common) < min_observations:
        raise DataError(f"too few common observations: {len(common)} < {min_observations}")
    logger.info(
        f"Aligned panels on {len(common)} dates "
        f"(returns had {len(returns)}, factors had {len(factors)})"
    )
    return (
        ReturnsPanel(frame=returns.frame.loc[common]),
        FactorPanel(frame=factors.frame.loc[common]),
    )
