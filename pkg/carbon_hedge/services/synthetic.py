"""
Synthetic block-correlated market with a planted high-emission sector
"""

import logging

import numpy as np
import pandas as pd

from carbon_hedge.core.errors import SyntheticSpecError
from carbon_hedge.core.seeding import rng_for
from carbon_hedge.models.market import (
    CMA,
    HML,
    MKT_RF,
    RF,
    RMW,
    SMB,
    FactorPanel,
    GicsSector,
    PricePanel,
    ScoreRecord,
    ScoreTable,
)
from carbon_hedge.models.synthetic import SyntheticMarketSpec

logger = logging.getLogger(__name__)

LATENT_FACTOR = "SYNTH_CO2"
INITIAL_PRICE = 100.0
BASE_INTENSITY = 1e-6  # tons per currency unit outside the planted sector


def sector_assignment(spec: SyntheticMarketSpec) -> list[GicsSector]:
    """Contiguous, near-equal sector blocks in GICS table order"""
    blocks = np.array_split(np.arange(spec.n_stocks), spec.n_sectors)
    return [spec.sectors[s] for s, block in enumerate(blocks) for _ in block]


def tickers(spec: SyntheticMarketSpec) -> list[str]:
    width = max(3, len(str(spec.n_stocks - 1)))
    return [f"S{i:0{width}d}" for i in range(spec.n_stocks)]


def block_correlation(spec: SyntheticMarketSpec) -> np.ndarray:
    """Sector-block correlation matrix; must be positive semi-definite"""
    labels = np.array([spec.sectors.index(s) for s in sector_assignment(spec)])
    same = labels[:, None] == labels[None, :]
    corr = np.where(same, spec.rho_intra, spec.rho_inter).astype(float)
    np.fill_diagonal(corr, 1.0)
    return corr


def matrix_sqrt(corr: np.ndarray, spec: SyntheticMarketSpec) -> np.ndarray:
    eigenvalues, eigenvectors = np.linalg.eigh(corr)
    if eigenvalues.min() < -1e-12:
        raise SyntheticSpecError(
            f"infeasible correlation matrix for (rho_intra={spec.rho_intra}, "
            f"rho_inter={spec.rho_inter}): smallest eigenvalue {eigenvalues.min():.3g}"
        )
    return (eigenvectors * np.sqrt(np.clip(eigenvalues, 0.0, None))) @ eigenvectors.T


def generate_synthetic_market(
    spec: SyntheticMarketSpec,
) -> tuple[PricePanel, FactorPanel, ScoreTable]:
    """Prices, factors (FF5 + RF + latent CO2 column) and scores of a synthetic market

    r = RF + beta * MKT_RF + idio_vol * block noise (+ loading * CO2 in the planted sector)
    """
    root = matrix_sqrt(block_correlation(spec), spec)
    names = tickers(spec)
    sectors = sector_assignment(spec)
    planted = np.array([s == spec.planted for s in sectors])
    T = spec.n_days
    dates = pd.bdate_range(pd.Timestamp(spec.start), periods=T + 1)

    factor_rng = rng_for(spec.seed, "synthetic-factors")
    market = factor_rng.normal(spec.market_drift, spec.market_vol, size=T)
    styles = factor_rng.normal(0.0, spec.style_vol, size=(T, 4))
    latent = factor_rng.normal(0.0, spec.co2_vol, size=T)
    risk_free = np.full(T, spec.risk_free)

    noise = rng_for(spec.seed, "synthetic-noise").standard_normal((T, spec.n_stocks)) @ root
    returns = (
        risk_free[:, None]
        + spec.market_beta * market[:, None]
        + spec.idio_vol * noise
        + np.outer(latent, planted * spec.planted_loading)
    )
    log_prices = np.vstack([np.zeros(spec.n_stocks), np.cumsum(returns, axis=0)])
    prices = PricePanel(
        frame=pd.DataFrame(
            INITIAL_PRICE * np.exp(log_prices), index=dates.rename("date"), columns=names
        )
    )

    factor_frame = pd.DataFrame(
        {
            MKT_RF: market,
            SMB: styles[:, 0],
            HML: styles[:, 1],
            RMW: styles[:, 2],
            CMA: styles[:, 3],
            RF: risk_free,
            LATENT_FACTOR: latent,
        },
        index=dates[1:].rename("date"),
    )
    scores = synthetic_scores(spec, names, sectors, planted)
    logger.info(
        f"✅ Synthetic market: {spec.n_stocks} stocks, {spec.n_sectors} sectors, {T} days, "
        f"planted sector {spec.planted.value}"
    )
    return prices, FactorPanel(frame=factor_frame), scores


def synthetic_scores(
    spec: SyntheticMarketSpec,
    names: list[str],
    sectors: list[GicsSector],
    planted: np.ndarray,
) -> ScoreTable:
    """Emission intensities 10-100x higher in the planted sector; ESG scores uninformative"""
    rng = rng_for(spec.seed, "synthetic-scores")
    n = len(names)
    market_cap = np.exp(rng.normal(np.log(2e10), 1.0, size=n))
    intensity = BASE_INTENSITY * rng.uniform(0.5, 1.5, size=n)
    low, high = spec.emission_multiplier
    intensity = np.where(planted, intensity * rng.uniform(low, high, size=n), intensity)
    emissions = intensity * market_cap
    esg = rng.uniform(20.0, 80.0, size=(n, 3))

    records = {
        ticker: ScoreRecord(
            ticker=ticker,
            co2_scope1=float(0.7 * emissions[i]),
            co2_scope2=float(0.3 * emissions[i]),
            market_cap=float(market_cap[i]),
            esg=float(esg[i, 0]),
            esg_promised=float(esg[i, 1]),
            esg_realized=float(esg[i, 2]),
            sector=sectors[i],
        )
        for i, ticker in enumerate(names)
    }
    return ScoreTable(records=records)
