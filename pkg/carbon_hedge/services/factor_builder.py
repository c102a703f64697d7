"""
Long-short sustainability factor construction
"""

import logging
import math
from datetime import date
from typing import Mapping, Optional

import numpy as np
import pandas as pd

from carbon_hedge.core.errors import FactorConstructionError
from carbon_hedge.models.factor import (
    FactorDirection,
    FactorSeries,
    GranularMapping,
    IndicatorClass,
)
from carbon_hedge.models.market import ReturnsPanel, ScoreTable

logger = logging.getLogger(__name__)

MIN_SCORED_TICKERS = 7


def weighted_emission(scope1: float, scope2: float, market_cap: float) -> float:
    """Scope 1 + scope 2 emissions per unit of market capitalization"""
    if not market_cap > 0:
        raise FactorConstructionError("non-positive market cap")
    if scope1 < 0 or scope2 < 0:
        raise FactorConstructionError("negative emission scope")
    return (scope1 + scope2) / market_cap


def emission_scores(table: ScoreTable) -> dict[str, float]:
    """Weighted emission for every ticker with both scopes and a market cap"""
    scores = {}
    for ticker, record in table.records.items():
        if record.co2_scope1 is None or record.co2_scope2 is None or record.market_cap is None:
            continue
        scores[ticker] = weighted_emission(
            record.co2_scope1, record.co2_scope2, record.market_cap
        )
    return scores


def select_legs(
    scores: Mapping[str, float],
    quantile: float = 0.30,
    direction: FactorDirection = FactorDirection.HIGH_MINUS_LOW,
) -> tuple[list[str], list[str]]:
    """Long and short members: floor(q*n) from each tail, ties by ticker"""
    if not 0 < quantile < 0.5:
        raise FactorConstructionError(f"quantile must lie in (0, 0.5), got {quantile}")
    finite = {t: float(s) for t, s in scores.items() if math.isfinite(float(s))}
    n = len(finite)
    if n < MIN_SCORED_TICKERS:
        raise FactorConstructionError(
            f"too few scored tickers: {n} < {MIN_SCORED_TICKERS}"
        )
    values = list(finite.values())
    if min(values) == max(values):
        raise FactorConstructionError("all scores identical")

    k = math.floor(quantile * n)
    if k == 0:
        raise FactorConstructionError(f"quantile {quantile} leaves empty legs for {n} tickers")
    low = sorted(finite, key=lambda t: (finite[t], t))[:k]
    high = sorted(finite, key=lambda t: (-finite[t], t))[:k]
    if direction == FactorDirection.HIGH_MINUS_LOW:
        return high, low
    return low, high


def build_factor(
    name: str,
    scores: Mapping[str, float],
    returns: ReturnsPanel,
    quantile: float = 0.30,
    direction: FactorDirection = FactorDirection.HIGH_MINUS_LOW,
) -> FactorSeries:
    """Equal-weight top-minus-bottom quantile factor over a fixed membership"""
    present = set(returns.tickers)
    usable = {t: s for t, s in scores.items() if t in present}
    long_members, short_members = select_legs(usable, quantile, direction)
    values = _leg_difference(returns.frame, long_members, short_members)
    logger.info(
        f"Built factor {name}: {len(long_members)} long / {len(short_members)} short "
        f"out of {len(usable)} scored tickers"
    )
    return FactorSeries(
        name=name,
        values=values.rename(name),
        long_members=frozenset(long_members),
        short_members=frozenset(short_members),
    )


def build_rebalanced_factor(
    name: str,
    snapshots: Mapping[Optional[date], Mapping[str, float]],
    returns: ReturnsPanel,
    quantile: float = 0.30,
    direction: FactorDirection = FactorDirection.HIGH_MINUS_LOW,
) -> FactorSeries:
    """Membership recomputed every calendar year from the latest snapshot

    Each year uses the latest snapshot dated on or before January 1st of that
    year, or the earliest snapshot when none qualifies. Reported memberships
    are those of the final year.
    """
    if not snapshots:
        raise FactorConstructionError("no score snapshots")
    dated = sorted(d for d in snapshots if d is not None)
    present = set(returns.tickers)
    pieces = []
    long_members: list[str] = []
    short_members: list[str] = []
    for year, frame in returns.frame.groupby(returns.frame.index.year, sort=True):
        if dated:
            eligible = [d for d in dated if d <= date(int(year), 1, 1)]
            scores = snapshots[eligible[-1] if eligible else dated[0]]
        else:
            scores = snapshots[None]
        usable = {t: s for t, s in scores.items() if t in present}
        long_members, short_members = select_legs(usable, quantile, direction)
        pieces.append(_leg_difference(frame, long_members, short_members))
    logger.info(f"Built factor {name} with yearly rebalancing over {len(pieces)} years")
    return FactorSeries(
        name=name,
        values=pd.concat(pieces).rename(name),
        long_members=frozenset(long_members),
        short_members=frozenset(short_members),
    )


def split_granular(
    granular_scores: pd.DataFrame, mapping: GranularMapping
) -> tuple[dict[str, float], dict[str, float]]:
    """Per-ticker promised and realized scores as means of mapped indicators"""
    unmapped = [c for c in granular_scores.columns if c not in mapping.classes]
    if unmapped:
        raise FactorConstructionError(f"unmapped indicator columns: {unmapped}")

    columns = {
        cls: [c for c in granular_scores.columns if mapping.classes[c] == cls]
        for cls in (IndicatorClass.PROMISED, IndicatorClass.REALIZED)
    }
    if not columns[IndicatorClass.PROMISED] or not columns[IndicatorClass.REALIZED]:
        raise FactorConstructionError("empty class after mapping")

    def class_mean(cls: IndicatorClass) -> dict[str, float]:
        block = granular_scores[columns[cls]].astype(float)
        means = block.mean(axis=1, skipna=True)
        return {str(t): float(v) for t, v in means.items() if np.isfinite(v)}

    return class_mean(IndicatorClass.PROMISED), class_mean(IndicatorClass.REALIZED)


def _leg_difference(
    frame: pd.DataFrame, long_members: list[str], short_members: list[str]
) -> pd.Series:
    long_leg = frame[long_members].mean(axis=1)
    short_leg = frame[short_members].mean(axis=1)
    return long_leg - short_leg
