"""
Regression models and results
"""

from enum import Enum
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from carbon_hedge.models.market import CMA, HML, MKT_RF, RMW, SMB

INTERCEPT = "alpha"


class ModelName(str, Enum):
    """Asset-pricing model families"""
    CAPM = "CAPM"
    FF3 = "FF3"
    FF5 = "FF5"


MODEL_REGRESSORS: dict[ModelName, tuple[str, ...]] = {
    ModelName.CAPM: (MKT_RF,),
    ModelName.FF3: (MKT_RF, SMB, HML),
    ModelName.FF5: (MKT_RF, SMB, HML, RMW, CMA),
}

MODEL_TITLES: dict[ModelName, str] = {
    ModelName.CAPM: "CAPM",
    ModelName.FF3: "Three-factor",
    ModelName.FF5: "Five-factor",
}


class OlsFit(BaseModel):
    """Ordinary least squares fit; intercept first"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    coefficients: np.ndarray = Field(..., description="k estimates, intercept first")
    residuals: np.ndarray = Field(..., description="y - fitted")
    fitted: np.ndarray = Field(..., description="X @ coefficients")
    r_squared: float
    adj_r_squared: float
    xtx_inverse: np.ndarray = Field(..., description="(X'X)^-1, kept for HAC use")


class ModelSpec(BaseModel):
    """A model family with an optional extra sustainability factor"""
    model_config = ConfigDict(frozen=True)

    name: ModelName
    extra_factor: Optional[str] = Field(None, description="Extra factor column")

    @property
    def regressors(self) -> tuple[str, ...]:
        base = MODEL_REGRESSORS[self.name]
        return base + ((self.extra_factor,) if self.extra_factor else ())

    @property
    def title(self) -> str:
        base = MODEL_TITLES[self.name]
        return f"{base}+{self.extra_factor}" if self.extra_factor else base


class CoefficientEstimate(BaseModel):
    """One coefficient with HAC inference"""
    model_config = ConfigDict(frozen=True)

    name: str
    estimate: float
    hac_se: float = Field(..., ge=0)
    t_stat: float
    p_value: float = Field(..., ge=0, le=1)
    stars: str = Field(..., pattern=r"^\**$", max_length=3)


class RegressionResult(BaseModel):
    """Regression of one portfolio series on one model spec"""
    model_config = ConfigDict(frozen=True)

    portfolio: str = Field(..., description="Dependent portfolio name")
    spec: ModelSpec
    coefficients: list[CoefficientEstimate]
    r_squared: float
    adj_r_squared: float
    n_obs: int = Field(..., ge=1)
    lag_used: int = Field(..., ge=0)

    @model_validator(mode="after")
    def _check_names(self) -> "RegressionResult":
        expected = (INTERCEPT,) + self.spec.regressors
        got = tuple(c.name for c in self.coefficients)
        if got != expected:
            raise ValueError(f"coefficients {got} do not match spec {expected}")
        return self

    def coefficient(self, name: str) -> Optional[CoefficientEstimate]:
        for coef in self.coefficients:
            if coef.name == name:
                return coef
        return None
