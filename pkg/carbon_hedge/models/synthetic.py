"""
Synthetic market specification
"""

from datetime import date
from typing import Any

from pydantic import BaseModel, ConfigDict, Field, model_validator

from carbon_hedge.models.market import GicsSector

SECTOR_ORDER: tuple[GicsSector, ...] = tuple(GicsSector)


class SyntheticMarketSpec(BaseModel):
    """Block-correlated market with one planted high-emission sector"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    n_stocks: int = Field(default=200, ge=8, description="Number of stocks")
    n_sectors: int = Field(default=8, ge=1, le=len(SECTOR_ORDER), description="Sectors used")
    rho_intra: float = Field(default=0.4, ge=0, lt=1, description="Within-sector correlation")
    rho_inter: float = Field(default=0.05, ge=0, lt=1, description="Across-sector correlation")
    planted_sector: int = Field(
        default=SECTOR_ORDER.index(GicsSector.UTILITIES),
        ge=0,
        description="Index (in GICS table order) of the high-emission sector; "
        "defaults to Utilities, or the last generated sector when fewer are used",
    )
    planted_loading: float = Field(default=0.5, allow_inf_nan=False, description="CO2 loading")
    n_days: int = Field(default=1500, ge=30, description="Trading days")
    seed: int = Field(default=7, ge=0, description="Generator seed")
    start: date = Field(default=date(2015, 1, 1), description="First business day")
    idio_vol: float = Field(default=0.015, gt=0, description="Sector-block noise volatility")
    market_vol: float = Field(default=0.01, gt=0, description="MKT_RF volatility")
    market_drift: float = Field(default=0.0003, description="MKT_RF daily mean")
    market_beta: float = Field(
        default=1.0, allow_inf_nan=False, description="Stock loading on MKT_RF"
    )
    style_vol: float = Field(default=0.005, gt=0, description="SMB/HML/RMW/CMA volatility")
    co2_vol: float = Field(default=0.02, gt=0, description="Latent CO2 factor volatility")
    risk_free: float = Field(default=0.00004, ge=0, description="Daily risk-free rate")
    emission_multiplier: tuple[float, float] = Field(
        default=(10.0, 100.0), description="Planted-sector emission intensity multiple range"
    )

    @model_validator(mode="before")
    @classmethod
    def _default_planted(cls, data: Any) -> Any:
        if isinstance(data, dict) and data.get("planted_sector") is None:
            n_sectors = data.get("n_sectors", cls.model_fields["n_sectors"].default)
            utilities = SECTOR_ORDER.index(GicsSector.UTILITIES)
            data = {**data, "planted_sector": min(utilities, int(n_sectors) - 1)}
        return data

    @model_validator(mode="after")
    def _check_planted(self) -> "SyntheticMarketSpec":
        independent = self.rho_intra == self.rho_inter == 0.0
        if self.rho_intra <= self.rho_inter and not independent:
            raise ValueError("rho_intra must exceed rho_inter unless both are zero")
        if self.planted_sector >= self.n_sectors:
            raise ValueError("planted_sector must index one of the generated sectors")
        low, high = self.emission_multiplier
        if not 0 < low <= high:
            raise ValueError("emission_multiplier must be an increasing positive range")
        return self

    @property
    def sectors(self) -> tuple[GicsSector, ...]:
        return SECTOR_ORDER[: self.n_sectors]

    @property
    def planted(self) -> GicsSector:
        return self.sectors[self.planted_sector]
