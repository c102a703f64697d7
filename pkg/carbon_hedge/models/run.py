"""
Pipeline run result models
"""

from datetime import date
from pathlib import Path
from typing import Optional

import pandas as pd
from pydantic import BaseModel, ConfigDict, Field

from carbon_hedge.models.embedding import EmbeddingSpace
from carbon_hedge.models.factor import FactorSeries, GranularMapping
from carbon_hedge.models.graph import FilteredGraph, NodeKind
from carbon_hedge.models.market import (
    FactorPanel,
    GicsSector,
    PricePanel,
    ReturnsPanel,
    ScoreTable,
)
from carbon_hedge.models.metrics import PerfReport
from carbon_hedge.models.portfolio import Portfolio
from carbon_hedge.models.regression import RegressionResult


class WindowData(BaseModel):
    """Aligned inputs of one sample window"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    label: str
    start: date
    end: date
    returns: ReturnsPanel = Field(..., description="Log returns aligned with the factors")
    factors: FactorPanel = Field(..., description="FF5 + RF + constructed factor columns")
    factor_series: list[FactorSeries]
    scores: Optional[ScoreTable] = None


class GraphRun(BaseModel):
    """One filtered graph and its embedding"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    key: str = Field(..., description="Factor name, or `joint`")
    graph: FilteredGraph
    space: EmbeddingSpace
    kinds: dict[str, NodeKind]
    walk_seed: int
    training_seed: int


class FactorRun(BaseModel):
    """Distance ranking, portfolios and results for one factor"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    factor: str
    graph_key: str
    ranking: list[str]
    distances: dict[str, float]
    sector_distances: list[tuple[GicsSector, float, int]]
    portfolios: list[Portfolio]
    returns: list[pd.Series]
    regressions: list[RegressionResult]
    metrics: list[PerfReport]
    random_seed: int

    @property
    def nearest_sector(self) -> Optional[GicsSector]:
        return self.sector_distances[0][0] if self.sector_distances else None


class PipelineResult(BaseModel):
    """Everything one window produced"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    window: WindowData
    graphs: dict[str, GraphRun]
    factors: dict[str, FactorRun]
    output_dir: Optional[Path] = None

    def regressions(self) -> list[tuple[str, RegressionResult]]:
        return [(name, r) for name, run in self.factors.items() for r in run.regressions]

    def metrics(self) -> list[tuple[str, PerfReport]]:
        return [(name, m) for name, run in self.factors.items() for m in run.metrics]


class MarketInputs(BaseModel):
    """Loaded input files of a run"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    prices: PricePanel
    factors: FactorPanel
    score_history: dict[Optional[date], ScoreTable] = Field(default_factory=dict)
    granular_scores: Optional[pd.DataFrame] = None
    granular_mapping: Optional[GranularMapping] = None
