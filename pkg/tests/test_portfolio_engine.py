"""
Tests for distance portfolios and their return series
"""

import numpy as np
import pandas as pd
import pytest
from pydantic import ValidationError

from carbon_hedge.core.errors import PortfolioError
from carbon_hedge.models.market import ReturnsPanel
from carbon_hedge.models.portfolio import Portfolio, Side
from carbon_hedge.services.portfolio_engine import (
    build_benchmarks,
    build_close_far,
    build_far_close,
    portfolio_returns,
)


def _ranking(n: int) -> list[str]:
    return [f"S{i:03d}" for i in range(n)]


class TestPortfolioModel:
    """Test portfolio validation and weights"""

    def test_overlapping_legs(self):
        """Test a ticker may not sit in both legs"""
        with pytest.raises(ValidationError, match="overlap"):
            Portfolio(name="bad", long_members=("A", "B"), short_members=("B",))

    def test_weights_sum_to_one_per_leg(self):
        """Test equal weights within each leg"""
        portfolio = Portfolio(name="ls", long_members=("A", "B"), short_members=("C", "D", "E"))

        rows = portfolio.weights()

        assert sum(w for _, side, w in rows if side == Side.LONG) == pytest.approx(1.0)
        assert sum(w for _, side, w in rows if side == Side.SHORT) == pytest.approx(1.0)
        assert portfolio.is_long_short


class TestBuildPortfolios:
    """Test close, far, far-close and benchmark construction"""

    def test_close_far_partition(self):
        """Test 60 ranked stocks split into disjoint 30/30 legs"""
        ranking = _ranking(60)

        close, far = build_close_far(ranking, k=30)

        assert close.long_members == tuple(ranking[:30])
        assert far.long_members == tuple(ranking[30:])
        assert not set(close.long_members) & set(far.long_members)

    def test_close_far_too_short(self):
        """Test a ranking shorter than 2k is rejected"""
        with pytest.raises(PortfolioError, match="too short"):
            build_close_far(_ranking(59), k=30)

    def test_single_stock_legs(self):
        """Test k = 1 picks the two ends"""
        close, far = build_close_far(["A", "B", "C"], k=1)

        assert close.long_members == ("A",)
        assert far.long_members == ("C",)

    def test_far_close(self):
        """Test the long-short legs are the ranking extremes"""
        ranking = _ranking(470)

        portfolio = build_far_close(ranking, k=15)
        _, far = build_close_far(ranking, k=30)

        assert portfolio.long_members == tuple(ranking[-15:])
        assert portfolio.short_members == tuple(ranking[:15])
        assert set(portfolio.long_members) <= set(far.long_members)

    def test_empty_legs(self):
        """Test k = 0 is rejected"""
        with pytest.raises(PortfolioError, match="empty legs"):
            build_far_close(_ranking(10), k=0)

    def test_benchmarks(self):
        """Test the S&P portfolio holds everything and the random pick is seeded"""
        universe = _ranking(470)

        sp, random = build_benchmarks(universe, n_random=30, seed=9)
        _, again = build_benchmarks(list(reversed(universe)), n_random=30, seed=9)

        assert len(sp.long_members) == 470
        assert all(w == pytest.approx(1 / 470) for _, _, w in sp.weights())
        assert len(random.long_members) == 30
        assert set(random.long_members) <= set(universe)
        assert random == again

    def test_exhaustive_random(self):
        """Test sampling the whole universe reproduces the S&P membership"""
        sp, random = build_benchmarks(["C", "A", "B"], n_random=3, seed=1)

        assert set(random.long_members) == set(sp.long_members)

    def test_universe_too_small(self):
        """Test the random portfolio needs enough stocks"""
        with pytest.raises(PortfolioError, match="too small"):
            build_benchmarks(["A", "B"], n_random=3)


class TestPortfolioReturns:
    """Test portfolio return series"""

    def test_single_stock(self, returns_panel):
        """Test a one-stock portfolio returns its own series"""
        series = portfolio_returns(Portfolio(name="one", long_members=("T03",)), returns_panel)

        np.testing.assert_allclose(series.to_numpy(), returns_panel.frame["T03"].to_numpy())
        assert series.name == "one"

    def test_equal_legs_cancel(self, returns_panel):
        """Test identical leg returns give a zero series"""
        frame = returns_panel.frame.copy()
        frame["COPY"] = frame["T00"]
        portfolio = Portfolio(name="zero", long_members=("T00",), short_members=("COPY",))

        series = portfolio_returns(portfolio, ReturnsPanel(frame=frame))

        np.testing.assert_array_equal(series.to_numpy(), 0.0)

    def test_matches_column_means(self, returns_panel):
        """Test the series equals the mean of member columns"""
        sp, random = build_benchmarks(returns_panel.tickers, n_random=5, seed=2)

        for portfolio in (sp, random):
            expected = returns_panel.frame[list(portfolio.long_members)].to_numpy().mean(axis=1)
            series = portfolio_returns(portfolio, returns_panel)
            np.testing.assert_allclose(series.to_numpy(), expected, atol=1e-15)

    def test_far_close_is_leg_difference(self, returns_panel):
        """Test far-close equals the far leg minus the close leg"""
        ranking = returns_panel.tickers
        portfolio = build_far_close(ranking, k=3)
        close, far = build_close_far(ranking, k=3)

        series = portfolio_returns(portfolio, returns_panel)
        far_series = portfolio_returns(far, returns_panel)
        difference = far_series - portfolio_returns(close, returns_panel)

        np.testing.assert_allclose(series.to_numpy(), difference.to_numpy(), atol=1e-15)

    def test_column_order_is_irrelevant(self, returns_panel):
        """Test permuting panel columns changes nothing"""
        portfolio = build_far_close(returns_panel.tickers, k=4)
        shuffled = ReturnsPanel(frame=returns_panel.frame[returns_panel.tickers[::-1]])

        pd.testing.assert_series_equal(
            portfolio_returns(portfolio, returns_panel), portfolio_returns(portfolio, shuffled)
        )

    def test_arithmetic_aggregation(self, business_days):
        """Test simple-return aggregation per leg"""
        frame = pd.DataFrame(
            {"A": np.log([1.1, 0.9]), "B": np.log([1.3, 1.0])}, index=business_days(2)
        )
        portfolio = Portfolio(name="ab", long_members=("A", "B"))

        series = portfolio_returns(portfolio, ReturnsPanel(frame=frame), arithmetic=True)

        np.testing.assert_allclose(series.to_numpy(), np.log([1.2, 0.95]))

    def test_missing_member(self, returns_panel):
        """Test members must be in the panel"""
        with pytest.raises(PortfolioError, match="missing"):
            portfolio_returns(Portfolio(name="x", long_members=("NOPE",)), returns_panel)
