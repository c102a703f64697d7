"""
Tests for return computation and panel alignment
"""

import numpy as np
import pandas as pd
import pytest

from carbon_hedge.core.errors import DataError
from carbon_hedge.models.market import FactorPanel, PricePanel, ReturnsPanel
from carbon_hedge.services.market_data import align, compute_log_returns


class TestLogReturns:
    """Test log return computation"""

    def test_log_returns_values(self, price_panel: PricePanel):
        """Test returns are ln(P[t+1]/P[t]) dated at t+1"""
        returns = compute_log_returns(price_panel)

        assert len(returns) == 3
        assert returns.dates.equals(price_panel.dates[1:])
        np.testing.assert_allclose(
            returns.frame["AAA"].to_numpy(), [np.log(1.1), np.log(0.9), 0.0], atol=1e-15
        )
        np.testing.assert_allclose(
            returns.frame["BBB"].to_numpy(), [0.0, np.log(1.1), np.log(1.1)], atol=1e-15
        )

    def test_single_date_rejected(self, business_days):
        """Test a one-row panel cannot produce returns"""
        panel = PricePanel(frame=pd.DataFrame({"AAA": [100.0]}, index=business_days(1)))

        with pytest.raises(DataError):
            compute_log_returns(panel)

    def test_returns_sum_to_total_log_change(self, price_panel: PricePanel):
        """Test cumulative log returns telescope to the log price ratio"""
        returns = compute_log_returns(price_panel)
        prices = price_panel.frame

        total = returns.frame.sum()
        expected = np.log(prices.iloc[-1] / prices.iloc[0])
        np.testing.assert_allclose(total.to_numpy(), expected.to_numpy(), atol=1e-14)


class TestAlign:
    """Test panel alignment"""

    def test_identical_dates_pass_through(self, returns_panel, factor_panel):
        """Test aligned panels are returned unchanged"""
        returns, factors = align(returns_panel, factor_panel)

        assert returns is returns_panel
        assert factors is factor_panel

    def test_intersection(self, returns_panel, factor_panel):
        """Test panels are cut to their common dates"""
        shorter = FactorPanel(frame=factor_panel.frame.iloc[10:100])

        returns, factors = align(returns_panel, shorter)

        assert len(returns) == 90
        assert returns.dates.equals(factors.dates)
        assert returns.dates[0] == factor_panel.dates[10]

    def test_empty_intersection(self, returns_panel, factor_panel):
        """Test disjoint panels are rejected"""
        shifted = factor_panel.frame.copy()
        shifted.index = shifted.index + pd.DateOffset(years=5)

        with pytest.raises(DataError, match="empty intersection"):
            align(returns_panel, FactorPanel(frame=shifted))

    def test_too_few_observations(self, returns_panel, factor_panel):
        """Test fewer common dates than the minimum are rejected"""
        short = ReturnsPanel(frame=returns_panel.frame.iloc[:20])

        with pytest.raises(DataError, match="too few"):
            align(short, factor_panel)
