"""
Pytest configuration and fixtures for the carbon hedge test suite
"""

from pathlib import Path
from typing import Callable

import numpy as np
import pandas as pd
import pytest

from carbon_hedge.core.config import PipelineConfig, load_pipeline_config
from carbon_hedge.models.market import (
    CANONICAL_FACTOR_COLUMNS,
    FactorPanel,
    GicsSector,
    PricePanel,
    ReturnsPanel,
    ScoreRecord,
    ScoreTable,
)
from carbon_hedge.models.synthetic import SyntheticMarketSpec
from carbon_hedge.services.pipeline import write_synthetic_inputs


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded generator for test data"""
    return np.random.default_rng(12345)


@pytest.fixture
def business_days() -> Callable[[int], pd.DatetimeIndex]:
    """Business-day index factory starting 2015-01-01"""

    def make(n: int) -> pd.DatetimeIndex:
        return pd.bdate_range("2015-01-01", periods=n, name="date")

    return make


@pytest.fixture
def returns_panel(rng: np.random.Generator, business_days) -> ReturnsPanel:
    """120 days x 12 tickers of Gaussian log returns"""
    frame = pd.DataFrame(
        rng.normal(0.0, 0.01, size=(120, 12)),
        index=business_days(120),
        columns=[f"T{i:02d}" for i in range(12)],
    )
    return ReturnsPanel(frame=frame)


@pytest.fixture
def factor_panel(rng: np.random.Generator, business_days) -> FactorPanel:
    """120 days of FF5 + RF factors aligned with `returns_panel`"""
    frame = pd.DataFrame(
        rng.normal(0.0, 0.005, size=(120, len(CANONICAL_FACTOR_COLUMNS))),
        index=business_days(120),
        columns=list(CANONICAL_FACTOR_COLUMNS),
    )
    frame["RF"] = 0.0001
    return FactorPanel(frame=frame)


@pytest.fixture
def price_panel(business_days) -> PricePanel:
    frame = pd.DataFrame(
        {"AAA": [100.0, 110.0, 99.0, 99.0], "BBB": [50.0, 50.0, 55.0, 60.5]},
        index=business_days(4),
    )
    return PricePanel(frame=frame)


@pytest.fixture
def score_table() -> ScoreTable:
    """Ten tickers with increasing emission intensity across two sectors"""
    records = {}
    for i in range(10):
        ticker = f"T{i:02d}"
        records[ticker] = ScoreRecord(
            ticker=ticker,
            co2_scope1=float(i + 1) * 70.0,
            co2_scope2=float(i + 1) * 30.0,
            market_cap=1000.0,
            esg=10.0 * i,
            esg_promised=5.0 * i,
            esg_realized=90.0 - 5.0 * i,
            sector=GicsSector.UTILITIES if i >= 5 else GicsSector.FINANCIALS,
        )
    return ScoreTable(records=records)


@pytest.fixture
def small_spec() -> SyntheticMarketSpec:
    """Small planted market for fast end-to-end runs"""
    return SyntheticMarketSpec(n_stocks=60, n_sectors=4, planted_sector=1, n_days=600, seed=3)


@pytest.fixture
def synthetic_inputs(tmp_path: Path, small_spec: SyntheticMarketSpec) -> dict[str, Path]:
    """Synthetic prices, factors, scores and config.yaml on disk"""
    paths = write_synthetic_inputs(small_spec, tmp_path / "inputs")
    print(f"✅ Created synthetic inputs in {tmp_path / 'inputs'}")
    return paths


@pytest.fixture
def fast_config(synthetic_inputs: dict[str, Path], tmp_path: Path) -> PipelineConfig:
    """Synthetic config with reduced walk and training hyperparameters"""
    return load_pipeline_config(
        synthetic_inputs["config"],
        **{
            "output_dir": str(tmp_path / "run"),
            "walks.num_walks": 4,
            "walks.walk_length": 20,
            "training.epochs": 2,
            "training.window": 4,
            "portfolios.k_close_far": 10,
            "portfolios.k_longshort": 5,
            "portfolios.n_random": 10,
            "plots": False,
        },
    )


@pytest.fixture
def correlation_factory() -> Callable[[np.random.Generator, int], np.ndarray]:
    """Sample correlation matrices of random factor-structured data"""

    def make(rng: np.random.Generator, n: int, observations: int = 200) -> np.ndarray:
        loadings = rng.normal(size=(n, 3))
        common = rng.normal(size=(observations, 3)) @ loadings.T
        data = common + rng.normal(size=(observations, n))
        corr = np.corrcoef(data, rowvar=False)
        corr = (corr + corr.T) / 2.0
        np.fill_diagonal(corr, 1.0)
        return corr

    return make
