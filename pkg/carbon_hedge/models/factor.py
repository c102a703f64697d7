"""
Sustainability factor models
"""

from enum import Enum

import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, model_validator


class FactorDirection(str, Enum):
    """Which tail of the score distribution is held long"""
    HIGH_MINUS_LOW = "high_minus_low"
    LOW_MINUS_HIGH = "low_minus_high"


class FactorSource(str, Enum):
    """Where a factor's scores (or series) come from"""
    EMISSION = "emission"
    ESG = "esg"
    ESG_PROMISED = "esg_promised"
    ESG_REALIZED = "esg_realized"
    COLUMN = "column"


class IndicatorClass(str, Enum):
    """Classification of a granular ESG indicator"""
    PROMISED = "promised"
    REALIZED = "realized"
    EXCLUDED = "excluded"


class FactorSeries(BaseModel):
    """Long-short factor return series with its leg memberships"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    name: str = Field(..., min_length=1, description="Factor identifier")
    values: pd.Series = Field(..., description="Daily factor log returns indexed by date")
    long_members: frozenset[str] = Field(..., description="Tickers held long")
    short_members: frozenset[str] = Field(..., description="Tickers held short")

    @model_validator(mode="after")
    def _check_legs(self) -> "FactorSeries":
        if self.long_members & self.short_members:
            raise ValueError("long and short members overlap")
        return self

    @property
    def dates(self) -> pd.DatetimeIndex:
        return self.values.index  # type: ignore[return-value]


class GranularMapping(BaseModel):
    """Indicator label -> promised / realized / excluded"""
    model_config = ConfigDict(frozen=True)

    classes: dict[str, IndicatorClass] = Field(..., description="Class per indicator label")

    def labels(self, indicator_class: IndicatorClass) -> list[str]:
        return sorted(k for k, v in self.classes.items() if v == indicator_class)
