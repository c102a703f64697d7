"""
Market data models: price, return and factor panels and sustainability scores
"""

from datetime import date
from enum import Enum
from typing import Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

MKT_RF = "MKT_RF"
SMB = "SMB"
HML = "HML"
RMW = "RMW"
CMA = "CMA"
RF = "RF"

FF5_COLUMNS: tuple[str, ...] = (MKT_RF, SMB, HML, RMW, CMA)
CANONICAL_FACTOR_COLUMNS: tuple[str, ...] = FF5_COLUMNS + (RF,)


class GicsSector(str, Enum):
    """GICS sector enumeration"""
    FINANCIALS = "Financials"
    INDUSTRIALS = "Industrials"
    HEALTH_CARE = "Health Care"
    INFORMATION_TECHNOLOGY = "Information Technology"
    CONSUMER_DISCRETIONARY = "Consumer Discretionary"
    CONSUMER_STAPLES = "Consumer Staples"
    UTILITIES = "Utilities"
    REAL_ESTATE = "Real Estate"
    ENERGY = "Energy"
    MATERIALS = "Materials"
    COMMUNICATION_SERVICES = "Communication Services"


class _Panel(BaseModel):
    """Date-indexed frame wrapper; frames are treated as read-only"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    frame: pd.DataFrame = Field(..., description="Date-indexed values, one column per label")

    @field_validator("frame")
    @classmethod
    def _check_index(cls, frame: pd.DataFrame) -> pd.DataFrame:
        if not isinstance(frame.index, pd.DatetimeIndex):
            raise ValueError("panel index must be a DatetimeIndex")
        if not frame.index.is_monotonic_increasing or frame.index.has_duplicates:
            raise ValueError("dates must be strictly increasing")
        if frame.columns.has_duplicates:
            raise ValueError("column names must be unique")
        return frame

    @property
    def dates(self) -> pd.DatetimeIndex:
        return self.frame.index  # type: ignore[return-value]

    @property
    def values(self) -> np.ndarray:
        return self.frame.to_numpy(dtype=float)

    def __len__(self) -> int:
        return len(self.frame)


class PricePanel(_Panel):
    """Adjusted close prices, dates x tickers"""
    dropped_rows: int = Field(default=0, ge=0, description="Rows dropped while loading")

    @field_validator("frame")
    @classmethod
    def _check_prices(cls, frame: pd.DataFrame) -> pd.DataFrame:
        if frame.isna().to_numpy().any():
            raise ValueError("price panel contains missing cells")
        if (frame.to_numpy(dtype=float) <= 0).any():
            raise ValueError("prices must be strictly positive")
        return frame

    @property
    def tickers(self) -> list[str]:
        return [str(c) for c in self.frame.columns]


class ReturnsPanel(_Panel):
    """Daily log returns, dates x tickers"""

    @field_validator("frame")
    @classmethod
    def _check_finite(cls, frame: pd.DataFrame) -> pd.DataFrame:
        if not np.isfinite(frame.to_numpy(dtype=float)).all():
            raise ValueError("returns must be finite")
        return frame

    @property
    def tickers(self) -> list[str]:
        return [str(c) for c in self.frame.columns]

    def between(self, start: date, end: date) -> "ReturnsPanel":
        mask = (self.frame.index >= pd.Timestamp(start)) & (
            self.frame.index <= pd.Timestamp(end)
        )
        return ReturnsPanel(frame=self.frame.loc[mask])


class FactorPanel(_Panel):
    """Daily factor returns (decimal), dates x factor names"""

    @property
    def columns(self) -> list[str]:
        return [str(c) for c in self.frame.columns]

    def series(self, name: str) -> pd.Series:
        return self.frame[name]

    def with_columns(self, extra: pd.DataFrame) -> "FactorPanel":
        """Return a panel with constructed factor columns added (or replaced)"""
        frame = self.frame.drop(columns=[c for c in extra.columns if c in self.frame])
        frame = frame.join(extra.reindex(frame.index), how="left")
        return FactorPanel(frame=frame)


class ScoreRecord(BaseModel):
    """Sustainability measures of a single ticker; any field may be absent"""
    model_config = ConfigDict(frozen=True)

    ticker: str = Field(..., min_length=1, description="Asset identifier")
    co2_scope1: Optional[float] = Field(None, ge=0, description="Scope 1 emissions [t]")
    co2_scope2: Optional[float] = Field(None, ge=0, description="Scope 2 emissions [t]")
    market_cap: Optional[float] = Field(None, gt=0, description="Market capitalization")
    esg: Optional[float] = Field(None, ge=0, le=100, description="ESG score")
    esg_promised: Optional[float] = Field(None, ge=0, le=100, description="ESG promised score")
    esg_realized: Optional[float] = Field(None, ge=0, le=100, description="ESG realized score")
    sector: Optional[GicsSector] = Field(None, description="GICS sector")

    def has(self, field_name: str) -> bool:
        return getattr(self, field_name) is not None


class ScoreTable(BaseModel):
    """Cross-sectional snapshot of sustainability scores keyed by ticker"""
    model_config = ConfigDict(frozen=True)

    records: dict[str, ScoreRecord] = Field(default_factory=dict, description="Scores by ticker")
    as_of: Optional[date] = Field(None, description="Snapshot date when the file carries one")

    @model_validator(mode="after")
    def _check_keys(self) -> "ScoreTable":
        for key, record in self.records.items():
            if key != record.ticker:
                raise ValueError(f"record key {key!r} does not match ticker {record.ticker!r}")
        return self

    @property
    def tickers(self) -> list[str]:
        return sorted(self.records)

    def field_map(self, field_name: str) -> dict[str, float]:
        """Ticker -> value for the tickers where the field is present"""
        return {
            ticker: float(getattr(record, field_name))
            for ticker, record in self.records.items()
            if record.has(field_name)
        }

    def sectors(self) -> dict[str, GicsSector]:
        return {
            ticker: record.sector
            for ticker, record in self.records.items()
            if record.sector is not None
        }

    def with_scores(self, field_name: str, values: dict[str, float]) -> "ScoreTable":
        """Copy with one score field overwritten for the given tickers"""
        records = dict(self.records)
        for ticker, value in values.items():
            base = records.get(ticker, ScoreRecord(ticker=ticker))
            records[ticker] = base.model_copy(update={field_name: value})
        return ScoreTable(records=records, as_of=self.as_of)


class ResidualPanel(ReturnsPanel):
    """FF5 regression residuals, dates x tickers"""
