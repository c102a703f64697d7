"""
Performance metric models
"""

from pydantic import BaseModel, ConfigDict, Field


class PerfReport(BaseModel):
    """Risk/return profile of one return series"""
    model_config = ConfigDict(frozen=True)

    portfolio: str = Field(..., description="Portfolio name")
    sharpe: float = Field(..., description="Sharpe ratio")
    sortino: float = Field(..., description="Sortino ratio")
    omega: float = Field(..., description="Omega ratio")
    mdd: float = Field(..., ge=0, le=1, description="Maximum drawdown")
    var5: float = Field(..., description="5% VaR as positive loss magnitude")
