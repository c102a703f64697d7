"""
Tests for the synthetic planted-sector market
"""

import numpy as np
import pytest
from pydantic import ValidationError

from carbon_hedge.core.errors import SyntheticSpecError
from carbon_hedge.models.market import GicsSector
from carbon_hedge.models.synthetic import SyntheticMarketSpec
from carbon_hedge.services.factor_builder import emission_scores
from carbon_hedge.services.market_data import compute_log_returns
from carbon_hedge.services.synthetic import (
    LATENT_FACTOR,
    block_correlation,
    generate_synthetic_market,
    matrix_sqrt,
    sector_assignment,
)


class TestSyntheticSpec:
    """Test market parameter validation and sector layout"""

    def test_planted_sector_in_range(self):
        """Test the planted sector must be generated"""
        with pytest.raises(ValidationError, match="planted_sector"):
            SyntheticMarketSpec(n_sectors=3, planted_sector=3)

    def test_contiguous_sectors(self):
        """Test sectors are near-equal contiguous blocks"""
        spec = SyntheticMarketSpec(n_stocks=10, n_sectors=3, planted_sector=0)

        sectors = sector_assignment(spec)

        assert sectors == [spec.sectors[0]] * 4 + [spec.sectors[1]] * 3 + [spec.sectors[2]] * 3

    def test_block_correlation(self):
        """Test intra and inter-sector entries"""
        spec = SyntheticMarketSpec(n_stocks=8, n_sectors=2, planted_sector=1, rho_intra=0.6)

        corr = block_correlation(spec)

        assert corr[0, 1] == 0.6
        assert corr[0, 7] == spec.rho_inter
        np.testing.assert_array_equal(np.diag(corr), 1.0)

    def test_infeasible_correlation(self):
        """Test a non-PSD correlation matrix is rejected with the market parameters"""
        spec = SyntheticMarketSpec(n_stocks=8, n_sectors=2, planted_sector=0)
        corr = np.array([[1.0, 0.9, 0.9], [0.9, 1.0, -0.9], [0.9, -0.9, 1.0]])

        with pytest.raises(SyntheticSpecError, match="rho_intra=0.4, rho_inter=0.05"):
            matrix_sqrt(corr, spec)

    @pytest.mark.parametrize("rho_intra, rho_inter", [(0.1, 0.1), (0.0, 0.3), (0.2, 0.5)])
    def test_intra_must_exceed_inter(self, rho_intra: float, rho_inter: float):
        """Test within-sector correlation must be the larger one"""
        with pytest.raises(ValidationError, match="rho_intra must exceed rho_inter"):
            SyntheticMarketSpec(rho_intra=rho_intra, rho_inter=rho_inter)

    def test_zero_correlations_allowed(self):
        """Test the independent panel is a valid layout"""
        spec = SyntheticMarketSpec(rho_intra=0.0, rho_inter=0.0)

        assert spec.rho_intra == spec.rho_inter == 0.0

    def test_planted_default_is_utilities(self):
        """Test the planted sector defaults to Utilities when it is generated"""
        assert SyntheticMarketSpec().planted == GicsSector.UTILITIES

    @pytest.mark.parametrize("n_sectors", [1, 2, 4, 6])
    def test_planted_default_with_few_sectors(self, n_sectors: int):
        """Test the planted sector falls back to the last generated sector"""
        spec = SyntheticMarketSpec(n_sectors=n_sectors)

        assert spec.planted_sector == n_sectors - 1
        assert spec.planted == spec.sectors[-1]


class TestGenerateSyntheticMarket:
    """Test generated prices, factors and scores"""

    def test_shapes_and_dates(self, small_spec):
        """Test panel sizes, the starting price and factor dates"""
        prices, factors, scores = generate_synthetic_market(small_spec)

        assert prices.frame.shape == (small_spec.n_days + 1, small_spec.n_stocks)
        np.testing.assert_allclose(prices.frame.iloc[0].to_numpy(), 100.0)
        assert factors.dates.equals(prices.dates[1:])
        assert LATENT_FACTOR in factors.columns
        assert scores.tickers == prices.tickers

    def test_deterministic(self, small_spec):
        """Test the same seed gives the same market"""
        first = generate_synthetic_market(small_spec)
        second = generate_synthetic_market(small_spec)

        np.testing.assert_array_equal(first[0].values, second[0].values)
        np.testing.assert_array_equal(first[1].values, second[1].values)
        assert first[2] == second[2]

    def test_planted_emissions_dominate(self, small_spec):
        """Test every planted-sector firm emits more per unit of capital than any other"""
        _, _, scores = generate_synthetic_market(small_spec)

        emissions = emission_scores(scores)
        sectors = scores.sectors()
        planted = [v for t, v in emissions.items() if sectors[t] == small_spec.planted]
        others = [v for t, v in emissions.items() if sectors[t] != small_spec.planted]

        assert min(planted) > max(others)

    def test_independent_panel(self):
        """Test zero correlations and loadings give an i.i.d. panel"""
        spec = SyntheticMarketSpec(
            n_stocks=12,
            n_sectors=3,
            planted_sector=0,
            rho_intra=0.0,
            rho_inter=0.0,
            planted_loading=0.0,
            market_beta=0.0,
            n_days=2000,
            seed=5,
        )
        prices, factors, _ = generate_synthetic_market(spec)
        returns = compute_log_returns(prices)

        bound = 5.0 / np.sqrt(spec.n_days)
        corr = np.corrcoef(returns.values, rowvar=False)
        off_diagonal = corr[~np.eye(spec.n_stocks, dtype=bool)]
        assert np.abs(off_diagonal).max() < bound
        latent = factors.series(LATENT_FACTOR).to_numpy()
        for ticker in returns.tickers:
            assert abs(np.corrcoef(returns.frame[ticker], latent)[0, 1]) < bound

    def test_planted_correlation_matches_model(self):
        """Test planted stocks correlate with the latent factor as the linear model implies"""
        spec = SyntheticMarketSpec(
            n_stocks=40, n_sectors=4, planted_sector=2, n_days=2000, seed=6
        )
        prices, factors, _ = generate_synthetic_market(spec)
        returns = compute_log_returns(prices)
        latent = factors.series(LATENT_FACTOR).to_numpy()
        planted = [t for t, s in zip(returns.tickers, sector_assignment(spec)) if s == spec.planted]

        observed = np.mean([np.corrcoef(returns.frame[t], latent)[0, 1] for t in planted])

        signal = spec.planted_loading * spec.co2_vol
        total = np.sqrt(
            (spec.market_beta * spec.market_vol) ** 2 + spec.idio_vol**2 + signal**2
        )
        assert observed == pytest.approx(signal / total, abs=0.05)
