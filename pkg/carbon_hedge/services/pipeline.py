"""
End-to-end pipeline: sustainability factors, filtered graphs, embeddings,
distance portfolios, regressions, metrics and their artifacts
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from datetime import date, timedelta
from pathlib import Path
from typing import Callable, Iterable, Optional, Sequence, TypeVar

import pandas as pd
import yaml

from carbon_hedge.core.config import GraphMode, PipelineConfig, Rebalance
from carbon_hedge.core.errors import ConfigError, DataError, stage
from carbon_hedge.core.seeding import derive_seed
from carbon_hedge.models.embedding import EmbeddingSpace, TrainingConfig, WalkConfig
from carbon_hedge.models.factor import FactorSource, FactorSeries
from carbon_hedge.models.graph import NodeKind
from carbon_hedge.models.market import (
    CANONICAL_FACTOR_COLUMNS,
    RF,
    FactorPanel,
    GicsSector,
    ResidualPanel,
    ScoreTable,
)
from carbon_hedge.models.metrics import PerfReport
from carbon_hedge.models.regression import MODEL_REGRESSORS, ModelSpec, RegressionResult
from carbon_hedge.models.run import (
    FactorRun,
    GraphRun,
    MarketInputs,
    PipelineResult,
    WindowData,
)
from carbon_hedge.models.synthetic import SyntheticMarketSpec
from carbon_hedge.repositories.artifact_repository import ArtifactRepository
from carbon_hedge.repositories.market_repository import MarketRepository, select_snapshot
from carbon_hedge.services.econometrics import run_model
from carbon_hedge.services.embedder import (
    distances_from,
    embed_graph,
    rank_by_distance,
    sector_distances,
)
from carbon_hedge.services.factor_builder import (
    build_factor,
    build_rebalanced_factor,
    emission_scores,
    split_granular,
)
from carbon_hedge.services.graph_builder import pearson_matrix, tmfg
from carbon_hedge.services.market_data import align, compute_log_returns
from carbon_hedge.services.perf_metrics import perf_report
from carbon_hedge.services.plotting import close_figure, draw_filtered_graph, emit_embedding_map
from carbon_hedge.services.portfolio_engine import (
    build_benchmarks,
    build_close_far,
    build_far_close,
    portfolio_returns,
)
from carbon_hedge.services.reporting import (
    metrics_text,
    r_squared_frame,
    r_squared_text,
    regression_text,
    sector_summary,
    sector_summary_text,
    windows_summary_text,
)
from carbon_hedge.services.residualizer import residualize_panel, residualize_series
from carbon_hedge.services.synthetic import generate_synthetic_market
from carbon_hedge.storage.run_directory import open_run_directory

logger = logging.getLogger(__name__)

JOINT_KEY = "joint"
TABLES = "tables"
WINDOWS = "windows"

T = TypeVar("T")
R = TypeVar("R")


def _map(threads: int, fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
    """Ordered map, in a thread pool when more than one thread is allowed"""
    items = list(items)
    if threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


# Inputs and windows


def load_inputs(
    config: PipelineConfig, repository: Optional[MarketRepository] = None
) -> MarketInputs:
    """Load every input file the configuration names"""
    data = config.data
    if data.prices is None or data.factors is None:
        raise ConfigError("data.prices and data.factors are required")
    needs_scores = any(f.source != FactorSource.COLUMN for f in config.factors)
    if needs_scores and data.scores is None:
        raise ConfigError("data.scores is required for score-based factors")

    repository = repository or MarketRepository()
    with stage("data-ingest"):
        prices = repository.load_price_panel(data.prices)
        factors = repository.load_factor_panel(data.factors, data.factor_scale)
        history = repository.load_score_history(data.scores) if data.scores else {}
        granular = mapping = None
        if data.granular_scores is not None and data.granular_mapping is not None:
            granular = repository.load_granular_scores(data.granular_scores)
            mapping = repository.load_granular_mapping(data.granular_mapping)
    logger.info(f"✅ Inputs loaded: {len(prices.tickers)} tickers, {len(prices)} price dates")
    return MarketInputs(
        prices=prices,
        factors=factors,
        score_history=history,
        granular_scores=granular,
        granular_mapping=mapping,
    )


def window_bounds(config: PipelineConfig) -> list[tuple[str, date, date]]:
    """Expanding windows [start, start + k years) clipped to the configured end"""
    start, end = config.window.start, config.window.end
    bounds = []
    k = 1
    while True:
        stop = min((pd.Timestamp(start) + pd.DateOffset(years=k)).date() - timedelta(days=1), end)
        label = str(start.year) if stop.year == start.year else f"{start.year}-{stop.year}"
        bounds.append((label, start, stop))
        if stop >= end:
            break
        k += 1
    if len(bounds) < 2:
        raise ConfigError(f"need ≥ 2 windows, the span {start} to {end} gives {len(bounds)}")
    return bounds


def _window_label(start: date, end: date) -> str:
    return str(start.year) if start.year == end.year else f"{start.year}-{end.year}"


def _factor_scores(
    source: FactorSource, table: ScoreTable, inputs: MarketInputs
) -> dict[str, float]:
    if source == FactorSource.EMISSION:
        return emission_scores(table)
    if source == FactorSource.ESG:
        return table.field_map("esg")
    if inputs.granular_scores is not None and inputs.granular_mapping is not None:
        promised, realized = split_granular(inputs.granular_scores, inputs.granular_mapping)
        return promised if source == FactorSource.ESG_PROMISED else realized
    return table.field_map(source.value)


def prepare_window(
    inputs: MarketInputs, config: PipelineConfig, label: str, start: date, end: date
) -> WindowData:
    """Log returns, aligned factors and constructed sustainability factors of one window"""
    with stage("data-ingest"):
        returns = compute_log_returns(inputs.prices).between(start, end)
        dates = inputs.factors.dates
        in_window = (dates >= pd.Timestamp(start)) & (dates <= pd.Timestamp(end))
        returns, factors = align(returns, FactorPanel(frame=inputs.factors.frame.loc[in_window]))

    scores = (
        select_snapshot(inputs.score_history, config.data.score_as_of)
        if inputs.score_history
        else None
    )
    series: list[FactorSeries] = []
    with stage("factor-builder"):
        for factor in config.factors:
            if factor.source == FactorSource.COLUMN:
                if factor.name not in factors.columns:
                    raise DataError(f"factor column {factor.name} not in the factor file")
                series.append(
                    FactorSeries(
                        name=factor.name,
                        values=factors.series(factor.name).rename(factor.name),
                        long_members=frozenset(),
                        short_members=frozenset(),
                    )
                )
                continue
            if factor.name in CANONICAL_FACTOR_COLUMNS:
                raise ConfigError(f"factor name {factor.name} shadows a Fama-French column")
            if scores is None:
                raise ConfigError(f"factor {factor.name} needs a score file")
            if config.rebalance == Rebalance.YEARLY:
                snapshots = {
                    as_of: _factor_scores(factor.source, table, inputs)
                    for as_of, table in inputs.score_history.items()
                }
                built = build_rebalanced_factor(
                    factor.name, snapshots, returns, factor.quantile, factor.direction
                )
            else:
                built = build_factor(
                    factor.name,
                    _factor_scores(factor.source, scores, inputs),
                    returns,
                    factor.quantile,
                    factor.direction,
                )
            series.append(built)

    constructed = [
        s.values
        for s, f in zip(series, config.factors)
        if f.source != FactorSource.COLUMN
    ]
    if constructed:
        factors = factors.with_columns(pd.concat(constructed, axis=1))
    logger.info(f"✅ Window {label}: {len(returns)} dates, factors {[s.name for s in series]}")
    return WindowData(
        label=label,
        start=start,
        end=end,
        returns=returns,
        factors=factors,
        factor_series=series,
        scores=scores,
    )


# Graphs, embeddings and portfolios


def build_graph(
    key: str,
    factor_names: Sequence[str],
    window: WindowData,
    residuals: ResidualPanel,
    config: PipelineConfig,
) -> GraphRun:
    """Correlation network of stock residuals plus factor nodes, filtered and embedded"""
    extra = pd.DataFrame({name: window.factors.series(name) for name in factor_names})
    with stage("graph-builder"):
        if config.graph.residualize_factors:
            extra = pd.DataFrame(
                {name: residualize_series(extra[name], window.factors) for name in factor_names}
            )
        corr = pearson_matrix(residuals, extra_columns=extra)
        graph = tmfg(corr, config.graph.gain)

    walk_seed = derive_seed(config.seed, "walks", key)
    training_seed = derive_seed(config.seed, "sgns", key)
    walk_config = WalkConfig(**config.walks.model_dump(), seed=walk_seed)
    training_config = TrainingConfig(
        **config.training.model_dump(), seed=training_seed, workers=config.threads
    )
    with stage("embedder"):
        space = embed_graph(graph, walk_config, training_config, threads=config.threads)

    kinds = {
        node: NodeKind.FACTOR if node in factor_names else NodeKind.STOCK for node in graph.nodes
    }
    return GraphRun(
        key=key,
        graph=graph,
        space=space,
        kinds=kinds,
        walk_seed=walk_seed,
        training_seed=training_seed,
    )


def analyse_factor(
    factor: str,
    graph_run: GraphRun,
    window: WindowData,
    residuals: ResidualPanel,
    config: PipelineConfig,
) -> FactorRun:
    """Rank stocks by embedding distance to the factor node, then build and evaluate portfolios"""
    stocks = residuals.tickers
    sectors = window.scores.sectors() if window.scores is not None else {}
    settings = config.portfolios

    with stage("portfolio-engine"):
        ranking = rank_by_distance(graph_run.space, factor, stocks)
        distances = distances_from(graph_run.space, factor, stocks)
        by_sector = sector_distances(graph_run.space, factor, sectors, stocks)
        close, far = build_close_far(ranking, settings.k_close_far)
        far_close = build_far_close(ranking, settings.k_longshort)
        random_seed = derive_seed(config.seed, "random", factor)
        sp, random = build_benchmarks(stocks, settings.n_random, seed=random_seed)
        portfolios = [close, far, far_close, sp, random]
        series = [portfolio_returns(p, window.returns, settings.arithmetic) for p in portfolios]

    regressions: list[RegressionResult] = []
    with stage("econometrics"):
        for model in config.econometrics.models:
            extras = [None] if factor in MODEL_REGRESSORS[model] else [None, factor]
            for portfolio, values in zip(portfolios[:3], series[:3]):
                for extra in extras:
                    regressions.append(
                        run_model(
                            ModelSpec(name=model, extra_factor=extra),
                            values,
                            window.factors,
                            lag=config.econometrics.lag,
                            long_only=not portfolio.is_long_short,
                            excess_returns=config.econometrics.excess_returns,
                        )
                    )

    metrics: list[PerfReport] = []
    risk_free = window.factors.series(RF).to_numpy(dtype=float)
    with stage("perf-metrics"):
        for portfolio, values in zip(portfolios, series):
            metrics.append(
                perf_report(
                    portfolio.name,
                    values.to_numpy(dtype=float),
                    rf=0.0 if portfolio.is_long_short else risk_free,
                    annualize=config.metrics.annualize,
                    periods_per_year=config.metrics.periods_per_year,
                    omega_threshold=config.metrics.omega_threshold,
                )
            )

    nearest = by_sector[0][0].value if by_sector else "n/a"
    logger.info(f"✅ {window.label} {factor}: nearest sector {nearest}")
    return FactorRun(
        factor=factor,
        graph_key=graph_run.key,
        ranking=ranking,
        distances=distances,
        sector_distances=by_sector,
        portfolios=portfolios,
        returns=series,
        regressions=regressions,
        metrics=metrics,
        random_seed=random_seed,
    )


def run_window(
    inputs: MarketInputs, config: PipelineConfig, label: str, start: date, end: date
) -> PipelineResult:
    """The full analysis of one sample window, without writing anything"""
    window = prepare_window(inputs, config, label, start, end)
    with stage("residualizer"):
        residuals = residualize_panel(window.returns, window.factors, threads=config.threads)

    names = [s.name for s in window.factor_series]
    if config.graph.mode == GraphMode.JOINT:
        groups = {JOINT_KEY: names}
    else:
        groups = {name: [name] for name in names}
    graph_runs = _map(
        config.threads,
        lambda item: build_graph(item[0], item[1], window, residuals, config),
        groups.items(),
    )
    graphs = {run.key: run for run in graph_runs}
    graph_of = {name: key for key, members in groups.items() for name in members}

    factor_runs = _map(
        config.threads,
        lambda name: analyse_factor(name, graphs[graph_of[name]], window, residuals, config),
        names,
    )
    return PipelineResult(
        window=window,
        graphs=graphs,
        factors={run.factor: run for run in factor_runs},
    )


# Artifacts


def write_window(
    repository: ArtifactRepository,
    result: PipelineResult,
    config: PipelineConfig,
    prefix: tuple[str, ...] = (),
) -> None:
    """All artifacts of one window, in a fixed order"""
    window = result.window
    sectors = window.scores.sectors() if window.scores is not None else {}
    seed_prefix = "/".join(prefix + ("",))

    repository.write_factor_series(window.factor_series, *prefix, "factors", "series.csv")
    repository.write_factor_members(window.factor_series, *prefix, "factors", "members.csv")

    for key, run in result.graphs.items():
        base = prefix + (key,)
        repository.write_edges(run.graph, *base, "graph", "edges.csv")
        repository.write_nodes(run.graph.nodes, run.kinds, sectors, *base, "graph", "nodes.csv")
        repository.write_embedding(
            run.space, run.kinds, sectors, *base, "embedding", "embedding.csv"
        )
        if config.plots:
            graph_path = repository.path(*base, "graph", "graph.svg")
            close_figure(draw_filtered_graph(run.graph, run.kinds, sectors, graph_path, key))
            repository.record_file(graph_path)
            map_path = repository.path(*base, "embedding", "map.svg")
            close_figure(emit_embedding_map(run.space, run.kinds, sectors, map_path, key))
            repository.record_file(map_path)
        if repository.run_dir is not None:
            repository.run_dir.record_seed(f"{seed_prefix}walks/{key}", run.walk_seed)
            repository.run_dir.record_seed(f"{seed_prefix}sgns/{key}", run.training_seed)

    for name, run in result.factors.items():
        base = prefix + (name,)
        repository.write_ranking(run.ranking, run.distances, sectors, *base, "ranking.csv")
        repository.write_sector_distances(run.sector_distances, *base, "sector_distances.csv")
        repository.write_portfolios(run.portfolios, *base, "portfolios.csv")
        repository.write_returns(run.returns, *base, "returns.csv")
        if repository.run_dir is not None:
            repository.run_dir.record_seed(f"{seed_prefix}random/{name}", run.random_seed)

    regressions, metrics = result.regressions(), result.metrics()
    repository.write_regressions(regressions, *prefix, TABLES, "regressions.csv")
    repository.write_metrics(metrics, *prefix, TABLES, "metrics.csv")
    repository.write_table(r_squared_frame(regressions), *prefix, TABLES, "r_squared.csv")
    if window.scores is not None:
        summary = sector_summary(window.scores, window.returns.tickers)
        repository.write_table(summary, *prefix, TABLES, "sector_summary.csv")
    write_text_tables(repository, regressions, metrics, prefix)


def write_text_tables(
    repository: ArtifactRepository,
    regressions: Sequence[tuple[str, RegressionResult]],
    metrics: Sequence[tuple[str, PerfReport]],
    prefix: tuple[str, ...] = (),
) -> list[Path]:
    """Human-readable twins of the regression, metric, R-squared and sector tables"""
    written = []
    factors = list(dict.fromkeys(f for f, _ in regressions))
    for factor in factors:
        models = dict.fromkeys(r.spec.name for f, r in regressions if f == factor)
        for model in models:
            written.append(
                repository.write_text(
                    regression_text(factor, model, regressions),
                    *prefix,
                    TABLES,
                    f"regressions_{factor}_{model.value}.txt",
                )
            )
    for factor in dict.fromkeys(f for f, _ in metrics):
        reports = [m for f, m in metrics if f == factor]
        written.append(
            repository.write_text(
                metrics_text(reports, title=f"{factor}: performance"),
                *prefix,
                TABLES,
                f"metrics_{factor}.txt",
            )
        )
    written.append(
        repository.write_text(
            r_squared_text(r_squared_frame(regressions)), *prefix, TABLES, "r_squared.txt"
        )
    )
    if (repository.root.joinpath(*prefix, TABLES, "sector_summary.csv")).exists():
        summary = repository.read_table(*prefix, TABLES, "sector_summary.csv")
        written.append(
            repository.write_text(
                sector_summary_text(summary), *prefix, TABLES, "sector_summary.txt"
            )
        )
    return written


def windows_summary(results: Sequence[PipelineResult]) -> pd.DataFrame:
    """Per window and factor: the nearest GICS sector by mean member distance"""
    rows = []
    for result in results:
        for name, run in result.factors.items():
            nearest = run.sector_distances[0] if run.sector_distances else None
            rows.append(
                [
                    result.window.label,
                    result.window.start.isoformat(),
                    result.window.end.isoformat(),
                    name,
                    nearest[0].value if nearest else "",
                    nearest[1] if nearest else float("nan"),
                    nearest[2] if nearest else 0,
                ]
            )
    return pd.DataFrame(
        rows,
        columns=["window", "start", "end", "factor", "nearest_sector", "mean_distance", "members"],
    )


# Entry points


def run_pipeline(config: PipelineConfig, inputs: Optional[MarketInputs] = None) -> PipelineResult:
    """Full-window run: every artifact plus the manifest under `config.output_dir`"""
    logger.info(f"Starting run {config.config_hash()[:12]} into {config.output_dir}")
    inputs = inputs or load_inputs(config)
    start, end = config.window.start, config.window.end
    with open_run_directory(config.output_dir, config) as run_dir:
        repository = ArtifactRepository(config.output_dir, run_dir)
        result = run_window(inputs, config, _window_label(start, end), start, end)
        write_window(repository, result, config)
    logger.info(f"✅ Run complete: {config.output_dir}")
    return result.model_copy(update={"output_dir": Path(config.output_dir)})


def run_expanding_windows(
    config: PipelineConfig, inputs: Optional[MarketInputs] = None
) -> list[PipelineResult]:
    """The pipeline on every expanding window plus a nearest-sector summary"""
    bounds = window_bounds(config)
    inputs = inputs or load_inputs(config)
    logger.info(f"Starting {len(bounds)} expanding windows into {config.output_dir}")
    with open_run_directory(config.output_dir, config) as run_dir:
        repository = ArtifactRepository(config.output_dir, run_dir)
        results = _map(
            config.threads,
            lambda bound: run_window(inputs, config, *bound),
            bounds,
        )
        for result in results:
            write_window(repository, result, config, prefix=(WINDOWS, result.window.label))
        summary = windows_summary(results)
        repository.write_table(summary, WINDOWS, "summary.csv")
        repository.write_text(windows_summary_text(summary), WINDOWS, "summary.txt")
    logger.info(f"✅ Expanding windows complete: {config.output_dir}")
    return results


def render_reports(root: Path) -> list[Path]:
    """Re-render the text tables of a run directory from its CSV files"""
    root = Path(root)
    prefixes: list[tuple[str, ...]] = []
    if (root / TABLES / "regressions.csv").exists():
        prefixes.append(())
    windows_dir = root / WINDOWS
    if windows_dir.is_dir():
        for child in sorted(windows_dir.iterdir()):
            if (child / TABLES / "regressions.csv").exists():
                prefixes.append((WINDOWS, child.name))
    if not prefixes:
        raise DataError(f"{root}: no {TABLES}/regressions.csv found")

    repository = ArtifactRepository(root)
    written: list[Path] = []
    for prefix in prefixes:
        regressions = repository.read_regressions(*prefix, TABLES, "regressions.csv")
        metrics = repository.read_metrics(*prefix, TABLES, "metrics.csv")
        written.extend(write_text_tables(repository, regressions, metrics, prefix))
    if (windows_dir / "summary.csv").exists():
        summary = repository.read_table(WINDOWS, "summary.csv")
        written.append(repository.write_text(windows_summary_text(summary), WINDOWS, "summary.txt"))
    logger.info(f"✅ Re-rendered {len(written)} tables under {root}")
    return written


def embed_edge_list(
    edges: Path,
    config: PipelineConfig,
    output_dir: Path,
    nodes: Optional[Path] = None,
) -> EmbeddingSpace:
    """Embed a weighted edge list `src, dst, weight` and write the embedding and its map"""
    repository = ArtifactRepository(output_dir)
    with stage("embedder"):
        graph = repository.read_edges(edges)
        kinds, sectors = repository.read_nodes(nodes) if nodes is not None else ({}, {})
        walk_seed = derive_seed(config.seed, "walks", "edge-list")
        training_seed = derive_seed(config.seed, "sgns", "edge-list")
        space = embed_graph(
            graph,
            WalkConfig(**config.walks.model_dump(), seed=walk_seed),
            TrainingConfig(
                **config.training.model_dump(), seed=training_seed, workers=config.threads
            ),
            threads=config.threads,
        )
    kinds = {node: kinds.get(node, NodeKind.STOCK) for node in space.labels}

    with open_run_directory(output_dir, config) as run_dir:
        repository = ArtifactRepository(output_dir, run_dir)
        repository.write_embedding(space, kinds, sectors, "embedding.csv")
        if config.plots:
            map_path = repository.path("map.svg")
            close_figure(emit_embedding_map(space, kinds, sectors, map_path))
            repository.record_file(map_path)
        run_dir.record_seed("walks/edge-list", walk_seed)
        run_dir.record_seed("sgns/edge-list", training_seed)
    logger.info(f"✅ Embedded {len(space.labels)} nodes into {output_dir}")
    return space


def write_synthetic_inputs(spec: SyntheticMarketSpec, output_dir: Path) -> dict[str, Path]:
    """Synthetic prices, factors and scores plus a ready-to-run config.yaml"""
    with stage("synthetic"):
        prices, factors, scores = generate_synthetic_market(spec)
    output_dir = Path(output_dir)
    repository = MarketRepository(delimiter=",")
    paths = {
        "prices": output_dir / "prices.csv",
        "factors": output_dir / "factors.csv",
        "scores": output_dir / "scores.csv",
        "config": output_dir / "config.yaml",
    }
    repository.save_price_panel(prices, paths["prices"])
    repository.save_factor_panel(factors, paths["factors"])
    repository.save_scores(scores, paths["scores"])

    config = {
        "data": {"prices": "prices.csv", "factors": "factors.csv", "scores": "scores.csv"},
        "window": {
            "start": factors.dates[0].date().isoformat(),
            "end": factors.dates[-1].date().isoformat(),
        },
        "factors": [{"name": "CO2", "source": FactorSource.EMISSION.value}],
        "seed": spec.seed,
        "output_dir": str((output_dir / "run").resolve()),
    }
    with open(paths["config"], "w", encoding="utf-8") as handle:
        yaml.safe_dump(config, handle, sort_keys=False)
    logger.info(f"✅ Synthetic market written to {output_dir}")
    return paths


def planted_share(result: PipelineResult, factor: str, planted: GicsSector) -> float:
    """Share of the close portfolio drawn from the given sector"""
    if result.window.scores is None:
        raise DataError("no sector information for the run")
    sectors = result.window.scores.sectors()
    close = result.factors[factor].portfolios[0]
    hits = sum(1 for ticker in close.long_members if sectors.get(ticker) == planted)
    return hits / len(close.long_members)
