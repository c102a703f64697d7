"""
Artifact repository: machine-readable run outputs and their re-loading
"""

import logging
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

import networkx as nx
import numpy as np
import pandas as pd

from carbon_hedge.core.errors import DataIngestError
from carbon_hedge.models.embedding import EmbeddingSpace
from carbon_hedge.models.factor import FactorSeries
from carbon_hedge.models.graph import FilteredGraph, NodeKind
from carbon_hedge.models.market import GicsSector
from carbon_hedge.models.metrics import PerfReport
from carbon_hedge.models.portfolio import Portfolio
from carbon_hedge.models.regression import (
    CoefficientEstimate,
    ModelName,
    ModelSpec,
    RegressionResult,
)
from carbon_hedge.storage.run_directory import RunDirectory

logger = logging.getLogger(__name__)

REGRESSION_COLUMNS = [
    "factor",
    "portfolio",
    "model",
    "extra_factor",
    "coefficient",
    "estimate",
    "hac_se",
    "t_stat",
    "p_value",
    "stars",
    "r_squared",
    "adj_r_squared",
    "n_obs",
    "lag",
]
METRIC_COLUMNS = ["factor", "portfolio", "sharpe", "sortino", "omega", "mdd", "var5"]


class ArtifactRepository:
    """Reads and writes the files of a run directory"""

    def __init__(self, root: Path, run_dir: Optional[RunDirectory] = None):
        self.root = Path(root)
        self.run_dir = run_dir

    def _target(self, parts: Sequence[str]) -> Path:
        if self.run_dir is not None:
            return self.run_dir.path(*parts)
        target = self.root.joinpath(*parts)
        target.parent.mkdir(parents=True, exist_ok=True)
        return target

    def _written(self, path: Path) -> Path:
        if self.run_dir is not None:
            self.run_dir.record(path)
        logger.debug(f"Wrote {path}")
        return path

    def _write_frame(self, frame: pd.DataFrame, parts: Sequence[str], **kwargs: object) -> Path:
        path = self._target(parts)
        frame.to_csv(path, lineterminator="\n", **kwargs)  # type: ignore[arg-type]
        return self._written(path)

    def _read_frame(self, parts: Sequence[str], **kwargs: object) -> pd.DataFrame:
        path = self.root.joinpath(*parts)
        try:
            return pd.read_csv(path, **kwargs)  # type: ignore[arg-type]
        except FileNotFoundError:
            raise DataIngestError(f"{path}: artifact not found")
        except (pd.errors.ParserError, pd.errors.EmptyDataError) as e:
            raise DataIngestError(f"{path}: unparseable artifact: {e}")

    # Generic outputs

    def write_text(self, text: str, *parts: str) -> Path:
        path = self._target(parts)
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
        return self._written(path)

    def write_table(self, frame: pd.DataFrame, *parts: str) -> Path:
        return self._write_frame(frame, parts, index=False)

    def read_table(self, *parts: str) -> pd.DataFrame:
        return self._read_frame(parts, keep_default_na=False, na_values=[""])

    def record_file(self, path: Path) -> Path:
        """Register a file written by another component (plots)"""
        return self._written(path)

    def path(self, *parts: str) -> Path:
        return self._target(parts)

    # Factors

    def write_factor_series(self, factors: Sequence[FactorSeries], *parts: str) -> Path:
        frame = pd.concat([f.values.rename(f.name) for f in factors], axis=1)
        return self._write_frame(frame, parts, index_label="date", date_format="%Y-%m-%d")

    def write_factor_members(self, factors: Sequence[FactorSeries], *parts: str) -> Path:
        rows = [
            (f.name, ticker, side)
            for f in factors
            for side, members in (("long", f.long_members), ("short", f.short_members))
            for ticker in sorted(members)
        ]
        frame = pd.DataFrame(rows, columns=["factor", "ticker", "side"])
        return self._write_frame(frame, parts, index=False)

    # Graph

    def write_edges(self, graph: FilteredGraph, *parts: str) -> Path:
        frame = pd.DataFrame(graph.labelled_edges(), columns=["src", "dst", "weight"])
        return self._write_frame(frame, parts, index=False)

    def write_nodes(
        self,
        nodes: Sequence[str],
        kinds: Mapping[str, NodeKind],
        sectors: Mapping[str, GicsSector],
        *parts: str,
    ) -> Path:
        frame = node_frame(nodes, kinds, sectors)
        return self._write_frame(frame, parts, index=False)

    def read_edges(self, path: Path) -> nx.Graph:
        """Weighted graph from an edge list `src, dst, weight`"""
        frame = pd.read_csv(path, dtype={"src": str, "dst": str})
        missing = {"src", "dst", "weight"} - set(frame.columns)
        if missing:
            raise DataIngestError(f"{path}: missing edge columns {sorted(missing)}")
        graph = nx.Graph()
        graph.add_weighted_edges_from(
            zip(frame["src"], frame["dst"], frame["weight"].astype(float))
        )
        return graph

    def read_nodes(self, path: Path) -> tuple[dict[str, NodeKind], dict[str, GicsSector]]:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False)
        return _kinds_and_sectors(frame)

    # Embedding

    def write_embedding(
        self,
        space: EmbeddingSpace,
        kinds: Mapping[str, NodeKind],
        sectors: Mapping[str, GicsSector],
        *parts: str,
    ) -> Path:
        frame = node_frame(space.labels, kinds, sectors)
        for k in range(space.dimension):
            frame[f"x{k + 1}"] = space.vectors[:, k]
        return self._write_frame(frame, parts, index=False)

    def read_embedding(
        self, *parts: str
    ) -> tuple[EmbeddingSpace, dict[str, NodeKind], dict[str, GicsSector]]:
        frame = self._read_frame(
            parts, dtype={"node": str, "kind": str, "sector": str}, keep_default_na=False
        )
        coordinates = [c for c in frame.columns if c.startswith("x")]
        vectors = frame[coordinates].to_numpy(dtype=float)
        space = EmbeddingSpace(
            labels=list(frame["node"]), vectors=vectors, context_vectors=np.zeros_like(vectors)
        )
        kinds, sectors = _kinds_and_sectors(frame)
        return space, kinds, sectors

    # Portfolios

    def write_ranking(
        self,
        ranking: Sequence[str],
        distances: Mapping[str, float],
        sectors: Mapping[str, GicsSector],
        *parts: str,
    ) -> Path:
        frame = pd.DataFrame(
            {
                "rank": range(1, len(ranking) + 1),
                "ticker": list(ranking),
                "distance": [distances[t] for t in ranking],
                "sector": [sectors[t].value if t in sectors else "" for t in ranking],
            }
        )
        return self._write_frame(frame, parts, index=False)

    def write_sector_distances(
        self, rows: Iterable[tuple[GicsSector, float, int]], *parts: str
    ) -> Path:
        frame = pd.DataFrame(
            [(s.value, d, n) for s, d, n in rows], columns=["sector", "mean_distance", "members"]
        )
        return self._write_frame(frame, parts, index=False)

    def write_portfolios(self, portfolios: Sequence[Portfolio], *parts: str) -> Path:
        rows = [
            (p.name, ticker, side.value, weight)
            for p in portfolios
            for ticker, side, weight in p.weights()
        ]
        frame = pd.DataFrame(rows, columns=["name", "ticker", "side", "weight"])
        return self._write_frame(frame, parts, index=False)

    def write_returns(self, series: Sequence[pd.Series], *parts: str) -> Path:
        frame = pd.concat(list(series), axis=1)
        return self._write_frame(frame, parts, index_label="date", date_format="%Y-%m-%d")

    # Regressions and metrics

    def write_regressions(
        self, results: Iterable[tuple[str, RegressionResult]], *parts: str
    ) -> Path:
        rows = []
        for factor, result in results:
            for coef in result.coefficients:
                rows.append(
                    [
                        factor,
                        result.portfolio,
                        result.spec.name.value,
                        result.spec.extra_factor or "",
                        coef.name,
                        coef.estimate,
                        coef.hac_se,
                        coef.t_stat,
                        coef.p_value,
                        coef.stars,
                        result.r_squared,
                        result.adj_r_squared,
                        result.n_obs,
                        result.lag_used,
                    ]
                )
        return self._write_frame(pd.DataFrame(rows, columns=REGRESSION_COLUMNS), parts, index=False)

    def read_regressions(self, *parts: str) -> list[tuple[str, RegressionResult]]:
        frame = self._read_frame(
            parts,
            dtype={
                "factor": str,
                "portfolio": str,
                "model": str,
                "extra_factor": str,
                "coefficient": str,
                "stars": str,
            },
            keep_default_na=False,
        )
        results: list[tuple[str, RegressionResult]] = []
        keys = ["factor", "portfolio", "model", "extra_factor"]
        for key, group in frame.groupby(keys, sort=False):
            factor, portfolio, model, extra = key
            first = group.iloc[0]
            spec = ModelSpec(name=ModelName(model), extra_factor=extra or None)
            coefficients = [
                CoefficientEstimate(
                    name=row["coefficient"],
                    estimate=float(row["estimate"]),
                    hac_se=float(row["hac_se"]),
                    t_stat=float(row["t_stat"]),
                    p_value=float(row["p_value"]),
                    stars=row["stars"],
                )
                for _, row in group.iterrows()
            ]
            results.append(
                (
                    factor,
                    RegressionResult(
                        portfolio=portfolio,
                        spec=spec,
                        coefficients=coefficients,
                        r_squared=float(first["r_squared"]),
                        adj_r_squared=float(first["adj_r_squared"]),
                        n_obs=int(first["n_obs"]),
                        lag_used=int(first["lag"]),
                    ),
                )
            )
        return results

    def write_metrics(self, reports: Iterable[tuple[str, PerfReport]], *parts: str) -> Path:
        rows = [
            [factor, r.portfolio, r.sharpe, r.sortino, r.omega, r.mdd, r.var5]
            for factor, r in reports
        ]
        return self._write_frame(pd.DataFrame(rows, columns=METRIC_COLUMNS), parts, index=False)

    def read_metrics(self, *parts: str) -> list[tuple[str, PerfReport]]:
        frame = self._read_frame(parts, dtype={"factor": str, "portfolio": str})
        return [
            (
                row["factor"],
                PerfReport(
                    portfolio=row["portfolio"],
                    sharpe=float(row["sharpe"]),
                    sortino=float(row["sortino"]),
                    omega=float(row["omega"]),
                    mdd=float(row["mdd"]),
                    var5=float(row["var5"]),
                ),
            )
            for _, row in frame.iterrows()
        ]


def node_frame(
    nodes: Sequence[str], kinds: Mapping[str, NodeKind], sectors: Mapping[str, GicsSector]
) -> pd.DataFrame:
    """`node, kind, sector` rows; factors and unknown sectors get an empty sector"""
    return pd.DataFrame(
        {
            "node": list(nodes),
            "kind": [kinds.get(n, NodeKind.STOCK).value for n in nodes],
            "sector": [sectors[n].value if n in sectors else "" for n in nodes],
        }
    )


def _kinds_and_sectors(frame: pd.DataFrame) -> tuple[dict[str, NodeKind], dict[str, GicsSector]]:
    kinds: dict[str, NodeKind] = {}
    sectors: dict[str, GicsSector] = {}
    by_value = {s.value: s for s in GicsSector}
    for _, row in frame.iterrows():
        node = str(row["node"])
        try:
            kinds[node] = NodeKind(row["kind"])
        except ValueError:
            raise DataIngestError(f"unknown node kind {row['kind']!r} for {node}")
        if row["sector"]:
            if row["sector"] not in by_value:
                raise DataIngestError(f"unknown GICS sector {row['sector']!r} for {node}")
            sectors[node] = by_value[row["sector"]]
    return kinds, sectors
