"""
Market data repository: loading and saving price, factor and score files
"""

import logging
from datetime import date
from pathlib import Path
from typing import Optional

import numpy as np
import pandas as pd
from pydantic import ValidationError

from carbon_hedge.core.config import FactorScale
from carbon_hedge.core.errors import DataIngestError
from carbon_hedge.models.factor import GranularMapping, IndicatorClass
from carbon_hedge.models.market import (
    CANONICAL_FACTOR_COLUMNS,
    FactorPanel,
    GicsSector,
    PricePanel,
    ScoreRecord,
    ScoreTable,
)

logger = logging.getLogger(__name__)

SCORE_FIELDS = (
    "co2_scope1",
    "co2_scope2",
    "market_cap",
    "esg",
    "esg_promised",
    "esg_realized",
)
_SECTORS = {sector.value.lower(): sector for sector in GicsSector}
_DELIMITERS = (",", ";", "\t", "|")


class MarketRepository:
    """Delimiter-separated text files for the pipeline's input data"""

    def __init__(self, delimiter: Optional[str] = None):
        # None = sniff the delimiter per file
        self.delimiter = delimiter

    def load_price_panel(self, path: Path) -> PricePanel:
        """Load and validate an adjusted-close price panel"""
        frame = self._read_dated_frame(path)
        frame, dropped = self._drop_invalid_rows(frame, path, positive=True)
        if len(frame) < 2:
            raise DataIngestError(f"{path}: fewer than 2 usable rows")
        logger.info(f"Loaded prices {path}: {len(frame)} dates x {frame.shape[1]} tickers")
        return PricePanel(frame=frame, dropped_rows=dropped)

    def save_price_panel(self, panel: PricePanel, path: Path) -> None:
        """Write a price panel in the format `load_price_panel` reads"""
        self._write_dated_frame(panel.frame, path)

    def load_factor_panel(
        self, path: Path, scale: FactorScale = FactorScale.DECIMAL
    ) -> FactorPanel:
        """Load the FF5 + RF factor file (extra columns are kept)"""
        frame = self._read_dated_frame(path)
        missing = [c for c in CANONICAL_FACTOR_COLUMNS if c not in frame.columns]
        if missing:
            raise DataIngestError(f"{path}: missing factor columns {missing}")
        frame, _ = self._drop_invalid_rows(frame, path, positive=False)
        if scale == FactorScale.PERCENT:
            frame = frame / 100.0
        logger.info(f"Loaded factors {path}: {len(frame)} dates, columns {list(frame.columns)}")
        return FactorPanel(frame=frame)

    def save_factor_panel(self, panel: FactorPanel, path: Path) -> None:
        self._write_dated_frame(panel.frame, path)

    def load_score_history(self, path: Path) -> dict[Optional[date], ScoreTable]:
        """All snapshots of a score file keyed by their as-of date (None if undated)"""
        raw = self._read_text_frame(path)
        raw.columns = [str(c).strip() for c in raw.columns]
        if "ticker" not in raw.columns:
            raise DataIngestError(f"{path}: missing ticker column")

        if "as_of" not in raw.columns:
            return {None: self._to_score_table(raw, path, None)}

        try:
            stamps = pd.to_datetime(raw["as_of"], format="ISO8601")
        except (ValueError, TypeError) as e:
            raise DataIngestError(f"{path}: unparseable as_of column: {e}")
        history: dict[Optional[date], ScoreTable] = {}
        for stamp, group in raw.groupby(stamps, sort=True):
            as_of = pd.Timestamp(stamp).date()
            history[as_of] = self._to_score_table(group, path, as_of)
        return history

    def load_scores(self, path: Path, as_of: Optional[date] = None) -> ScoreTable:
        """Load one cross-sectional snapshot (latest on or before `as_of`)"""
        history = self.load_score_history(path)
        table = select_snapshot(history, as_of)
        logger.info(f"Loaded scores {path}: {len(table.records)} tickers (as of {table.as_of})")
        return table

    def save_scores(self, table: ScoreTable, path: Path) -> None:
        rows = []
        for ticker in table.tickers:
            record = table.records[ticker]
            row = {"ticker": ticker}
            row.update({name: getattr(record, name) for name in SCORE_FIELDS})
            row["sector"] = record.sector.value if record.sector else None
            rows.append(row)
        columns = ["ticker", *SCORE_FIELDS, "sector"]
        path.parent.mkdir(parents=True, exist_ok=True)
        pd.DataFrame(rows, columns=columns).to_csv(path, index=False)

    def load_granular_scores(self, path: Path) -> pd.DataFrame:
        """Ticker x indicator matrix of granular ESG scores"""
        raw = self._read_text_frame(path)
        if "ticker" not in raw.columns:
            raise DataIngestError(f"{path}: missing ticker column")
        frame = raw.set_index("ticker")
        frame.index = frame.index.astype(str).str.strip()
        return frame.apply(pd.to_numeric, errors="coerce")

    def load_granular_mapping(self, path: Path) -> GranularMapping:
        """Two-column `indicator_label, class` file"""
        raw = self._read_text_frame(path)
        if raw.shape[1] < 2:
            raise DataIngestError(f"{path}: expected columns indicator_label, class")
        classes: dict[str, IndicatorClass] = {}
        for label, value in zip(raw.iloc[:, 0], raw.iloc[:, 1]):
            try:
                classes[str(label).strip()] = IndicatorClass(str(value).strip().lower())
            except ValueError:
                raise DataIngestError(f"{path}: unknown indicator class {value!r} for {label!r}")
        return GranularMapping(classes=classes)

    # Parsing

    def _read_text_frame(self, path: Path) -> pd.DataFrame:
        try:
            delimiter = self.delimiter or _detect_delimiter(path)
            frame = pd.read_csv(path, sep=delimiter, dtype=str, skipinitialspace=True)
        except FileNotFoundError:
            raise DataIngestError(f"{path}: file not found")
        except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
            raise DataIngestError(f"{path}: unparseable file: {e}")
        frame.columns = [str(c).strip() for c in frame.columns]
        return frame

    def _read_dated_frame(self, path: Path) -> pd.DataFrame:
        raw = self._read_text_frame(path)
        if raw.shape[1] < 2:
            raise DataIngestError(f"{path}: unparseable file: need a date column and data columns")
        date_column = raw.columns[0]
        try:
            index = pd.DatetimeIndex(pd.to_datetime(raw[date_column], format="ISO8601"))
        except (ValueError, TypeError) as e:
            raise DataIngestError(f"{path}: unparseable dates: {e}")
        if (index != index.normalize()).any():
            raise DataIngestError(f"{path}: intraday timestamps are not supported")
        if index.has_duplicates:
            raise DataIngestError(f"{path}: duplicate dates")
        values = raw.drop(columns=[date_column]).apply(pd.to_numeric, errors="coerce")
        values.index = index.rename("date")
        return values.sort_index()

    def _drop_invalid_rows(
        self, frame: pd.DataFrame, path: Path, positive: bool
    ) -> tuple[pd.DataFrame, int]:
        data = frame.to_numpy(dtype=float)
        bad = ~np.isfinite(data)
        if positive:
            bad |= ~(data > 0)
        bad_rows = bad.any(axis=1)
        dropped = int(bad_rows.sum())
        if dropped:
            logger.warning(f"{path}: dropped {dropped} row(s) with missing or invalid values")
        return frame.loc[~bad_rows].astype(float), dropped

    def _write_dated_frame(self, frame: pd.DataFrame, path: Path) -> None:
        path.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, index_label="date", date_format="%Y-%m-%d")

    def _to_score_table(
        self, raw: pd.DataFrame, path: Path, as_of: Optional[date]
    ) -> ScoreTable:
        records: dict[str, ScoreRecord] = {}
        for _, row in raw.iterrows():
            ticker = str(row["ticker"]).strip()
            fields: dict[str, object] = {"ticker": ticker}
            for name in SCORE_FIELDS:
                fields[name] = _optional_float(row.get(name), name, ticker, path)
            market_cap = fields["market_cap"]
            if market_cap is not None and float(market_cap) < 0:  # type: ignore[arg-type]
                raise DataIngestError(f"{path}: negative market cap for {ticker}")
            if market_cap is not None and float(market_cap) == 0:  # type: ignore[arg-type]
                raise DataIngestError(f"{path}: non-positive market cap for {ticker}")
            fields["sector"] = _parse_sector(row.get("sector"), ticker, path)
            if ticker in records:
                raise DataIngestError(f"{path}: duplicate ticker {ticker}")
            try:
                records[ticker] = ScoreRecord.model_validate(fields)
            except ValidationError as e:
                raise DataIngestError(f"{path}: invalid scores for {ticker}: {e}")
        return ScoreTable(records=records, as_of=as_of)


def select_snapshot(
    history: dict[Optional[date], ScoreTable], as_of: Optional[date] = None
) -> ScoreTable:
    """Latest snapshot dated on or before `as_of` (earliest if none qualifies)"""
    if None in history:
        return history[None]
    dated = sorted(d for d in history if d is not None)
    if not dated:
        raise DataIngestError("score file has no snapshots")
    if as_of is None:
        return history[dated[-1]]
    eligible = [d for d in dated if d <= as_of]
    return history[eligible[-1] if eligible else dated[0]]


def _detect_delimiter(path: Path) -> str:
    """Most frequent candidate delimiter on the header line"""
    with open(path, "r", encoding="utf-8") as handle:
        header = handle.readline()
    counts = {d: header.count(d) for d in _DELIMITERS}
    best = max(_DELIMITERS, key=lambda d: counts[d])
    return best if counts[best] > 0 else ","


def _is_blank(value: object) -> bool:
    if value is None or (isinstance(value, float) and np.isnan(value)):
        return True
    return str(value).strip() == ""


def _optional_float(value: object, name: str, ticker: str, path: Path) -> Optional[float]:
    if _is_blank(value):
        return None
    try:
        return float(str(value).strip())
    except ValueError:
        raise DataIngestError(f"{path}: {name} of {ticker} is not a number: {value!r}")


def _parse_sector(value: object, ticker: str, path: Path) -> Optional[GicsSector]:
    if _is_blank(value):
        return None
    sector = _SECTORS.get(str(value).strip().lower())
    if sector is None:
        raise DataIngestError(f"{path}: unknown GICS sector {value!r} for {ticker}")
    return sector
