"""
Plain-text and tabular reports built from pipeline results
"""

import logging
from typing import Iterable, Optional, Sequence

import numpy as np
import pandas as pd

from carbon_hedge.models.market import GicsSector, ScoreTable
from carbon_hedge.models.metrics import PerfReport
from carbon_hedge.models.regression import ModelName, RegressionResult
from carbon_hedge.services.econometrics import format_table
from carbon_hedge.services.factor_builder import emission_scores

logger = logging.getLogger(__name__)

METRIC_LABELS: tuple[tuple[str, str], ...] = (
    ("sharpe", "Sharpe"),
    ("sortino", "Sortino"),
    ("omega", "Omega"),
    ("mdd", "MDD"),
    ("var5", "VaR 5%"),
)
SECTOR_COLUMNS = [
    "sector",
    "stocks",
    "market_cap",
    "market_cap_share",
    "co2",
    "esg",
    "esg_promised",
    "esg_realized",
]
R_SQUARED_COLUMNS = [
    "factor",
    "model",
    "portfolio",
    "r_squared",
    "r_squared_with_factor",
    "adj_r_squared",
    "adj_r_squared_with_factor",
]


def format_frame(frame: pd.DataFrame, title: Optional[str] = None, digits: int = 4) -> str:
    """Fixed-width text rendering of a frame; floats rounded to `digits`"""
    body = frame.to_string(
        index=False,
        float_format=lambda value: f"{value:.{digits}f}",
        na_rep="-",
    )
    lines = [title] if title else []
    lines.append(body)
    return "\n".join(lines) + "\n"


def regression_text(
    factor: str, model: ModelName, results: Iterable[tuple[str, RegressionResult]]
) -> str:
    """One table for a factor and model family: each portfolio without, then with the factor"""
    selected = [r for f, r in results if f == factor and r.spec.name == model]
    return format_table(selected, title=f"{factor}: {model.value}")


def metrics_frame(reports: Sequence[PerfReport]) -> pd.DataFrame:
    """Metrics as rows, portfolios as columns"""
    data = {r.portfolio: [getattr(r, key) for key, _ in METRIC_LABELS] for r in reports}
    frame = pd.DataFrame(data, index=[label for _, label in METRIC_LABELS])
    frame.index.name = "metric"
    return frame


def metrics_text(reports: Sequence[PerfReport], title: Optional[str] = None) -> str:
    return format_frame(metrics_frame(reports).reset_index(), title=title)


def sector_summary(scores: ScoreTable, universe: Optional[Iterable[str]] = None) -> pd.DataFrame:
    """Per GICS sector: stock count, market cap, mean weighted CO2 and mean ESG scores"""
    tickers = set(universe) if universe is not None else set(scores.records)
    sectors = {t: s for t, s in scores.sectors().items() if t in tickers}
    co2 = emission_scores(scores)
    total_cap = sum(scores.records[t].market_cap or 0.0 for t in sectors)

    rows = []
    for sector in GicsSector:
        members = sorted(t for t, s in sectors.items() if s == sector)
        if not members:
            continue
        records = [scores.records[t] for t in members]
        cap = float(sum(r.market_cap or 0.0 for r in records))
        rows.append(
            [
                sector.value,
                len(members),
                cap,
                cap / total_cap if total_cap > 0 else np.nan,
                _mean(co2.get(t) for t in members),
                _mean(r.esg for r in records),
                _mean(r.esg_promised for r in records),
                _mean(r.esg_realized for r in records),
            ]
        )
    return pd.DataFrame(rows, columns=SECTOR_COLUMNS)


def sector_summary_text(summary: pd.DataFrame) -> str:
    display = summary.copy()
    display["market_cap"] = display["market_cap"].map(lambda v: f"{v:.4g}")
    display["co2"] = display["co2"].map(lambda v: "-" if pd.isna(v) else f"{v:.4g}")
    return format_frame(display, title="Sector summary", digits=2)


def r_squared_frame(results: Iterable[tuple[str, RegressionResult]]) -> pd.DataFrame:
    """R-squared of each portfolio and model without and with its factor"""
    base: dict[tuple[str, str, str], RegressionResult] = {}
    extended: dict[tuple[str, str, str], RegressionResult] = {}
    order: list[tuple[str, str, str]] = []
    for factor, result in results:
        key = (factor, result.spec.name.value, result.portfolio)
        if key not in base and key not in extended:
            order.append(key)
        if result.spec.extra_factor is None:
            base[key] = result
        else:
            extended[key] = result

    rows = []
    for key in order:
        without, with_factor = base.get(key), extended.get(key)
        rows.append(
            [
                *key,
                without.r_squared if without else np.nan,
                with_factor.r_squared if with_factor else np.nan,
                without.adj_r_squared if without else np.nan,
                with_factor.adj_r_squared if with_factor else np.nan,
            ]
        )
    return pd.DataFrame(rows, columns=R_SQUARED_COLUMNS)


def r_squared_text(frame: pd.DataFrame) -> str:
    return format_frame(frame, title="R-squared without / with the sustainability factor")


def windows_summary_text(summary: pd.DataFrame) -> str:
    return format_frame(summary, title="Nearest sector per window")


def _mean(values: Iterable[Optional[float]]) -> float:
    present = [float(v) for v in values if v is not None]
    return float(np.mean(present)) if present else np.nan
