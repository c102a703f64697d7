"""
Portfolio models
"""

from enum import Enum

from pydantic import BaseModel, ConfigDict, Field, model_validator


class Side(str, Enum):
    """Position side"""
    LONG = "long"
    SHORT = "short"


class Portfolio(BaseModel):
    """Equally weighted long (and optional short) leg"""
    model_config = ConfigDict(frozen=True)

    name: str = Field(..., min_length=1, description="Portfolio name")
    long_members: tuple[str, ...] = Field(..., min_length=1, description="Long tickers")
    short_members: tuple[str, ...] = Field(default=(), description="Short tickers")

    @model_validator(mode="after")
    def _check_legs(self) -> "Portfolio":
        if set(self.long_members) & set(self.short_members):
            raise ValueError("long and short legs overlap")
        if len(set(self.long_members)) != len(self.long_members):
            raise ValueError("duplicate long members")
        if len(set(self.short_members)) != len(self.short_members):
            raise ValueError("duplicate short members")
        return self

    @property
    def is_long_short(self) -> bool:
        return bool(self.short_members)

    @property
    def members(self) -> tuple[str, ...]:
        return self.long_members + self.short_members

    def weights(self) -> list[tuple[str, Side, float]]:
        """(ticker, side, weight) rows; each leg sums to 1"""
        rows = [(t, Side.LONG, 1.0 / len(self.long_members)) for t in self.long_members]
        if self.short_members:
            w = 1.0 / len(self.short_members)
            rows += [(t, Side.SHORT, w) for t in self.short_members]
        return rows
