"""
Tests for the correlation network and TMFG filtering
"""

import itertools
import time

import networkx as nx
import numpy as np
import pandas as pd
import pytest
from pydantic import ValidationError

from carbon_hedge.core.errors import GraphConstructionError
from carbon_hedge.models.graph import CorrelationMatrix, GainTransform
from carbon_hedge.models.market import ReturnsPanel
from carbon_hedge.services.graph_builder import gain_weights, pearson_matrix, tmfg


def _labels(n: int) -> list[str]:
    return [f"N{i}" for i in range(n)]


def _greedy_oracle(weights: np.ndarray, seed: tuple[int, ...]) -> set[tuple[int, int]]:
    """Exhaustive greedy insertion from a given seed"""
    n = weights.shape[0]
    edges = {tuple(sorted(pair)) for pair in itertools.combinations(seed, 2)}
    faces = [tuple(sorted(face)) for face in itertools.combinations(seed, 3)]
    free = sorted(set(range(n)) - set(seed))
    while free:
        best = max(
            ((weights[v, list(f)].sum(), v, f) for v in free for f in faces),
            key=lambda item: item[0],
        )
        _, vertex, face = best
        free.remove(vertex)
        faces.remove(face)
        a, b, c = face
        faces += [tuple(sorted(f)) for f in ((vertex, a, b), (vertex, a, c), (vertex, b, c))]
        edges |= {tuple(sorted((vertex, other))) for other in face}
    return edges  # type: ignore[return-value]


def _random_draw(seed: int, correlation_factory) -> tuple[int, GainTransform, np.ndarray]:
    rng = np.random.default_rng(seed)
    n = int(rng.integers(4, 121))
    gain = list(GainTransform)[seed % len(GainTransform)]
    return n, gain, correlation_factory(rng, n)


def _check_tmfg(graph, corr: np.ndarray, gain: GainTransform) -> None:
    """Counts, planarity, connectivity, degree 3 at insertion and greedy optimality"""
    n = corr.shape[0]
    weights = gain_weights(corr, gain)
    edges = graph.edge_set()
    assert len(edges) == 3 * (n - 2)
    assert len(set(graph.faces)) == 2 * n - 4
    nx_graph = graph.to_networkx()
    assert nx.is_connected(nx_graph)
    assert nx.check_planarity(nx_graph)[0]
    assert all(edge.weight == corr[edge.source, edge.target] for edge in graph.edges)

    placed = set(graph.seed)
    faces = {tuple(sorted(f)) for f in itertools.combinations(graph.seed, 3)}
    for step in graph.insertions:
        v = step.vertex
        assert step.face in faces
        attached = {
            a if b == v else b
            for a, b in edges
            if v in (a, b) and {a, b} - {v} <= placed
        }
        assert attached == set(step.face)

        free = np.array(sorted(set(range(n)) - placed))
        face_array = np.array(sorted(faces))
        best = weights[free][:, face_array].sum(axis=2).max()
        assert step.gain == pytest.approx(best, abs=1e-12)

        faces.remove(step.face)
        a, b, c = step.face
        faces |= {tuple(sorted(f)) for f in ((v, a, b), (v, a, c), (v, b, c))}
        placed.add(v)
    assert placed == set(range(n))
    assert faces == set(graph.faces)


class TestPearsonMatrix:
    """Test sample correlations"""

    def test_identical_and_negated(self, returns_panel):
        """Test duplicated and negated columns correlate at +1 and -1"""
        frame = returns_panel.frame[["T00", "T01"]].copy()
        frame["COPY"] = frame["T00"]
        frame["NEG"] = -frame["T00"]

        corr = pearson_matrix(ReturnsPanel(frame=frame))

        i, copy, neg = corr.index_of("T00"), corr.index_of("COPY"), corr.index_of("NEG")
        assert corr.values[i, copy] == pytest.approx(1.0)
        assert corr.values[i, neg] == pytest.approx(-1.0)
        np.testing.assert_array_equal(np.diag(corr.values), 1.0)
        np.testing.assert_array_equal(corr.values, corr.values.T)

    def test_independent_columns(self):
        """Test independent long series are nearly uncorrelated"""
        rng = np.random.default_rng(7)
        frame = pd.DataFrame(
            rng.normal(size=(10_000, 2)), index=pd.bdate_range("1990-01-01", periods=10_000)
        )
        frame.columns = ["A", "B"]

        corr = pearson_matrix(ReturnsPanel(frame=frame))

        assert abs(corr.values[0, 1]) < 0.05

    def test_factor_columns_follow_stocks(self, returns_panel, factor_panel):
        """Test factor columns are appended after the tickers"""
        extra = factor_panel.frame[["SMB"]].rename(columns={"SMB": "CO2"})

        corr = pearson_matrix(returns_panel, extra)

        assert corr.labels == returns_panel.tickers + ["CO2"]

    def test_name_collision(self, returns_panel):
        """Test a factor named like a ticker is rejected"""
        extra = returns_panel.frame[["T00"]]

        with pytest.raises(GraphConstructionError, match="collide"):
            pearson_matrix(returns_panel, extra)

    def test_constant_column(self, returns_panel):
        """Test a zero-variance column is rejected"""
        frame = returns_panel.frame.copy()
        frame["FLAT"] = 0.0

        with pytest.raises(GraphConstructionError, match="constant column"):
            pearson_matrix(ReturnsPanel(frame=frame))

    def test_too_few_observations(self, returns_panel):
        """Test short panels are rejected"""
        short = ReturnsPanel(frame=returns_panel.frame.iloc[:20])

        with pytest.raises(GraphConstructionError, match="observations"):
            pearson_matrix(short)


class TestGainWeights:
    """Test gain transforms"""

    def test_transforms(self):
        """Test square, absolute and raw gains with a zero diagonal"""
        corr = np.array([[1.0, -0.5], [-0.5, 1.0]])

        assert gain_weights(corr, GainTransform.SQUARE)[0, 1] == pytest.approx(0.25)
        assert gain_weights(corr, GainTransform.ABSOLUTE)[0, 1] == pytest.approx(0.5)
        assert gain_weights(corr, GainTransform.RAW)[0, 1] == pytest.approx(-0.5)
        assert gain_weights(corr, GainTransform.SQUARE)[0, 0] == 0.0


class TestTmfg:
    """Test the Triangulated Maximally Filtered Graph"""

    def test_four_nodes_is_complete(self, rng, correlation_factory):
        """Test n = 4 gives K4"""
        graph = tmfg(CorrelationMatrix(labels=_labels(4), values=correlation_factory(rng, 4)))

        assert graph.edge_set() == set(itertools.combinations(range(4), 2))
        assert len(graph.faces) == 4
        assert graph.insertions == []

    def test_equal_weights(self):
        """Test equal off-diagonal weights still give a valid TMFG"""
        values = np.full((5, 5), 0.5)
        np.fill_diagonal(values, 1.0)

        graph = tmfg(CorrelationMatrix(labels=_labels(5), values=values))

        assert len(graph.edges) == 9
        assert graph.seed == (0, 1, 2, 3)
        assert graph.insertions[0].vertex == 4

    def test_six_nodes_matches_exhaustive_greedy(self, rng, correlation_factory):
        """Test n = 6 agrees with an exhaustive greedy search"""
        corr = correlation_factory(rng, 6)
        graph = tmfg(CorrelationMatrix(labels=_labels(6), values=corr))

        weights = gain_weights(corr, GainTransform.SQUARE)
        assert graph.edge_set() == _greedy_oracle(weights, graph.seed)

    @pytest.mark.parametrize("n", [4, 5, 7, 12, 30, 60])
    @pytest.mark.parametrize("gain", list(GainTransform))
    def test_structure(self, n, gain, correlation_factory):
        """Test edge and face counts, planarity, connectivity and greedy steps"""
        corr = correlation_factory(np.random.default_rng(n), n)

        graph = tmfg(CorrelationMatrix(labels=_labels(n), values=corr), gain)

        _check_tmfg(graph, corr, gain)

    @pytest.mark.parametrize("seed", range(200))
    def test_random_matrices(self, seed, correlation_factory):
        """Test the structural guarantees on random matrices of 4 to 120 nodes"""
        n, gain, corr = _random_draw(seed, correlation_factory)

        graph = tmfg(CorrelationMatrix(labels=_labels(n), values=corr), gain)

        _check_tmfg(graph, corr, gain)

    @pytest.mark.slow
    def test_random_matrices_runtime(self, correlation_factory):
        """Test filtering the 200 random matrices takes under 30 seconds"""
        matrices = [_random_draw(seed, correlation_factory) for seed in range(200)]
        elapsed = 0.0
        for n, gain, corr in matrices:
            matrix = CorrelationMatrix(labels=_labels(n), values=corr)
            started = time.perf_counter()
            tmfg(matrix, gain)
            elapsed += time.perf_counter() - started

        assert elapsed < 30.0

    def test_too_few_nodes(self, rng, correlation_factory):
        """Test fewer than four nodes are rejected"""
        with pytest.raises(GraphConstructionError, match="at least 4"):
            tmfg(CorrelationMatrix(labels=_labels(3), values=correlation_factory(rng, 3)))

    def test_nan_matrix(self):
        """Test NaN correlations never reach the filter"""
        values = np.eye(4)
        values[0, 1] = values[1, 0] = np.nan

        with pytest.raises(ValidationError, match="NaN"):
            CorrelationMatrix(labels=_labels(4), values=values)

    def test_deterministic(self, rng, correlation_factory):
        """Test repeated runs give the same graph"""
        corr = CorrelationMatrix(labels=_labels(20), values=correlation_factory(rng, 20))

        assert tmfg(corr) == tmfg(corr)
