"""
End-to-end tests of the pipeline on synthetic markets
"""

import time
from datetime import date

import pandas as pd
import pytest

from carbon_hedge.core.config import load_pipeline_config
from carbon_hedge.core.errors import ConfigError, DataError
from carbon_hedge.models.graph import NodeKind
from carbon_hedge.models.regression import ModelName
from carbon_hedge.models.synthetic import SyntheticMarketSpec
from carbon_hedge.services.pipeline import (
    JOINT_KEY,
    load_inputs,
    planted_share,
    render_reports,
    run_expanding_windows,
    run_pipeline,
    window_bounds,
    write_synthetic_inputs,
)
from carbon_hedge.services.portfolio_engine import CLOSE, FAR_CLOSE
from carbon_hedge.storage.run_directory import load_manifest


class TestInputs:
    """Test input loading and window bounds"""

    def test_prices_required(self):
        """Test a config without data files is rejected"""
        with pytest.raises(ConfigError, match="data.prices"):
            load_inputs(load_pipeline_config())

    def test_synthetic_inputs_load(self, fast_config, small_spec):
        """Test the written synthetic files load back"""
        inputs = load_inputs(fast_config)

        assert len(inputs.prices.tickers) == small_spec.n_stocks
        assert len(inputs.prices) == small_spec.n_days + 1
        assert "SYNTH_CO2" in inputs.factors.columns

    def test_default_windows(self):
        """Test 2015-2020 gives six expanding windows"""
        bounds = window_bounds(load_pipeline_config())

        assert [label for label, _, _ in bounds] == [
            "2015",
            "2015-2016",
            "2015-2017",
            "2015-2018",
            "2015-2019",
            "2015-2020",
        ]
        assert bounds[0][2] == date(2015, 12, 31)
        assert all(start == date(2015, 1, 1) for _, start, _ in bounds)
        assert bounds[-1][2] == date(2020, 12, 31)

    def test_single_year_span(self):
        """Test a one-year span cannot form two windows"""
        config = load_pipeline_config(**{"window.start": "2015-01-01", "window.end": "2015-12-31"})

        with pytest.raises(ConfigError, match="need ≥ 2 windows"):
            window_bounds(config)


class TestRunPipeline:
    """Test the full-window run"""

    def test_artifacts(self, fast_config, small_spec):
        """Test one run produces every table, ranking and the manifest"""
        result = run_pipeline(fast_config)

        root = fast_config.output_dir
        for parts in (
            ("factors", "series.csv"),
            ("factors", "members.csv"),
            ("CO2", "graph", "edges.csv"),
            ("CO2", "graph", "nodes.csv"),
            ("CO2", "embedding", "embedding.csv"),
            ("CO2", "ranking.csv"),
            ("CO2", "sector_distances.csv"),
            ("CO2", "portfolios.csv"),
            ("CO2", "returns.csv"),
            ("tables", "regressions.csv"),
            ("tables", "regressions_CO2_FF3.txt"),
            ("tables", "metrics.csv"),
            ("tables", "metrics_CO2.txt"),
            ("tables", "r_squared.txt"),
            ("tables", "sector_summary.txt"),
        ):
            assert root.joinpath(*parts).exists(), parts

        run = result.factors["CO2"]
        assert len(run.ranking) == small_spec.n_stocks
        assert [p.name for p in run.portfolios] == ["close", "far", "far-close", "S&P", "random"]
        assert len(run.regressions) == 3 * 3 * 2
        assert len(run.metrics) == 5
        assert run.nearest_sector is not None
        assert result.graphs["CO2"].kinds["CO2"] == NodeKind.FACTOR

        manifest = load_manifest(root)
        assert "tables/regressions.csv" in manifest["artifacts"]
        assert "walks/CO2" in manifest["seeds"]["derived"]
        assert manifest["config_hash"] == fast_config.config_hash()

    def test_same_config_same_artifacts(self, fast_config, tmp_path):
        """Test two single-threaded runs write byte-identical artifacts"""
        first = run_pipeline(fast_config)
        second_config = fast_config.model_copy(update={"output_dir": tmp_path / "again"})
        second = run_pipeline(second_config)

        one = load_manifest(first.output_dir)
        two = load_manifest(second.output_dir)
        assert one["artifacts"] == two["artifacts"]
        assert one["seeds"] == two["seeds"]

    def test_rerun_from_manifest(self, fast_config, tmp_path):
        """Test the manifest alone reproduces the run"""
        run_pipeline(fast_config)
        replay = load_pipeline_config(
            fast_config.output_dir / "manifest.json", output_dir=str(tmp_path / "replay")
        )
        run_pipeline(replay)

        first = load_manifest(fast_config.output_dir)["artifacts"]
        assert load_manifest(tmp_path / "replay")["artifacts"] == first

    def test_plots_written(self, fast_config):
        """Test the graph and map plots are part of the run"""
        config = fast_config.model_copy(update={"plots": True})

        run_pipeline(config)

        manifest = load_manifest(config.output_dir)
        assert "CO2/graph/graph.svg" in manifest["artifacts"]
        assert "CO2/embedding/map.svg" in manifest["artifacts"]

    def test_joint_graph(self, synthetic_inputs, tmp_path):
        """Test several factor nodes share one graph in joint mode"""
        config = load_pipeline_config(
            synthetic_inputs["config"],
            **{
                "output_dir": str(tmp_path / "joint"),
                "factors": [
                    {"name": "CO2", "source": "emission"},
                    {"name": "SYNTH_CO2", "source": "column"},
                ],
                "graph.mode": "joint",
                "walks.num_walks": 4,
                "walks.walk_length": 20,
                "training.epochs": 1,
                "portfolios.k_close_far": 10,
                "portfolios.k_longshort": 5,
                "portfolios.n_random": 10,
                "plots": False,
            },
        )

        result = run_pipeline(config)

        assert list(result.graphs) == [JOINT_KEY]
        assert set(result.factors) == {"CO2", "SYNTH_CO2"}
        kinds = result.graphs[JOINT_KEY].kinds
        assert kinds["CO2"] == kinds["SYNTH_CO2"] == NodeKind.FACTOR
        assert (tmp_path / "joint" / JOINT_KEY / "graph" / "edges.csv").exists()
        assert (tmp_path / "joint" / "SYNTH_CO2" / "ranking.csv").exists()

    def test_factor_shadowing_fama_french(self, synthetic_inputs, tmp_path):
        """Test a constructed factor may not reuse a Fama-French name"""
        config = load_pipeline_config(
            synthetic_inputs["config"],
            output_dir=str(tmp_path / "bad"),
            factors=[{"name": "HML", "source": "emission"}],
        )

        with pytest.raises(ConfigError, match="shadows"):
            run_pipeline(config)

    @pytest.mark.slow
    def test_planted_sector_is_recovered(self, tmp_path):
        """Test the emission factor sits among the planted sector and prices its portfolios"""
        recovered = close_priced = spread_priced = fit_improved = 0
        for seed in range(10):
            spec = SyntheticMarketSpec(n_stocks=200, n_sectors=8, n_days=1500, seed=seed)
            paths = write_synthetic_inputs(spec, tmp_path / f"market-{seed}")
            config = load_pipeline_config(
                paths["config"], output_dir=str(tmp_path / f"run-{seed}"), plots=False
            )
            started = time.perf_counter()

            result = run_pipeline(config)

            assert time.perf_counter() - started < 300.0
            recovered += planted_share(result, "CO2", spec.planted) >= 0.8
            ff3 = {
                (r.portfolio, r.spec.extra_factor): r
                for r in result.factors["CO2"].regressions
                if r.spec.name == ModelName.FF3
            }
            close = ff3[(CLOSE, "CO2")].coefficient("CO2")
            spread = ff3[(FAR_CLOSE, "CO2")].coefficient("CO2")
            close_priced += close.estimate > 0 and close.p_value < 0.05
            spread_priced += spread.estimate < 0 and spread.p_value < 0.05
            fit_improved += ff3[(CLOSE, "CO2")].r_squared > ff3[(CLOSE, None)].r_squared

        assert recovered >= 9
        assert close_priced >= 9
        assert spread_priced >= 9
        assert fit_improved >= 9


class TestExpandingWindows:
    """Test the expanding-window study"""

    def test_windows_and_summary(self, fast_config):
        """Test every window gets its own artifacts and a summary row"""
        results = run_expanding_windows(fast_config)

        labels = [r.window.label for r in results]
        assert len(labels) >= 2
        root = fast_config.output_dir
        for label in labels:
            assert (root / "windows" / label / "tables" / "regressions.csv").exists()
        summary = (root / "windows" / "summary.csv").read_text().splitlines()
        assert summary[0] == "window,start,end,factor,nearest_sector,mean_distance,members"
        assert len(summary) == 1 + len(labels)
        derived = load_manifest(root)["seeds"]["derived"]
        assert f"windows/{labels[0]}/walks/CO2" in derived

    def test_stationary_market_keeps_nearest_sector(self, tmp_path):
        """Test a stationary market gives the same nearest sector in every window"""
        spec = SyntheticMarketSpec(
            n_stocks=80, n_sectors=4, planted_loading=1.0, n_days=800, seed=11
        )
        paths = write_synthetic_inputs(spec, tmp_path / "market")
        config = load_pipeline_config(
            paths["config"],
            **{
                "output_dir": str(tmp_path / "run"),
                "walks.num_walks": 10,
                "walks.walk_length": 40,
                "training.epochs": 2,
                "portfolios.k_close_far": 15,
                "portfolios.n_random": 10,
                "plots": False,
            },
        )

        results = run_expanding_windows(config)

        assert len(results) >= 3
        assert {r.factors["CO2"].nearest_sector for r in results} == {spec.planted}
        summary = pd.read_csv(tmp_path / "run" / "windows" / "summary.csv")
        assert summary["nearest_sector"].tolist() == [spec.planted.value] * len(results)


class TestRenderReports:
    """Test re-rendering text tables from CSV artifacts"""

    def test_rerender_matches(self, fast_config):
        """Test re-rendered tables equal the originals"""
        run_pipeline(fast_config)
        table = fast_config.output_dir / "tables" / "regressions_CO2_CAPM.txt"
        original = table.read_text()
        table.unlink()

        written = render_reports(fast_config.output_dir)

        assert table in written
        assert table.read_text() == original

    def test_empty_directory(self, tmp_path):
        """Test a directory without tables is rejected"""
        with pytest.raises(DataError, match="regressions.csv"):
            render_reports(tmp_path)
