"""
Correlation matrix and filtered graph models
"""

from enum import Enum

import networkx as nx
import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class GainTransform(str, Enum):
    """Transform applied to correlations before TMFG gains are computed"""
    RAW = "raw"
    ABSOLUTE = "abs"
    SQUARE = "square"


class NodeKind(str, Enum):
    """Kind of node in the market graph"""
    STOCK = "stock"
    FACTOR = "factor"


class CorrelationMatrix(BaseModel):
    """Labelled symmetric correlation matrix with unit diagonal"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    labels: list[str] = Field(..., description="Node ids (tickers + factor names)")
    values: np.ndarray = Field(..., description="n x n correlation values")

    @model_validator(mode="after")
    def _check_matrix(self) -> "CorrelationMatrix":
        n = len(self.labels)
        if len(set(self.labels)) != n:
            raise ValueError("labels must be unique")
        if self.values.shape != (n, n):
            raise ValueError(f"matrix shape {self.values.shape} does not match {n} labels")
        if np.isnan(self.values).any():
            raise ValueError("correlation matrix contains NaN")
        if not np.allclose(self.values, self.values.T, atol=1e-12, rtol=0.0):
            raise ValueError("correlation matrix is not symmetric")
        if not np.all(np.diag(self.values) == 1.0):
            raise ValueError("correlation diagonal must be exactly 1")
        return self

    def index_of(self, label: str) -> int:
        return self.labels.index(label)


class Edge(BaseModel):
    """Undirected weighted edge between node indices (source < target)"""
    model_config = ConfigDict(frozen=True)

    source: int = Field(..., ge=0)
    target: int = Field(..., ge=0)
    weight: float = Field(..., description="Signed correlation")

    @model_validator(mode="after")
    def _ordered(self) -> "Edge":
        if self.source >= self.target:
            raise ValueError("edges are stored with source < target")
        return self


class Insertion(BaseModel):
    """One greedy step: vertex placed inside a face"""
    model_config = ConfigDict(frozen=True)

    vertex: int = Field(..., ge=0)
    face: tuple[int, int, int] = Field(..., description="Face (sorted indices) that was split")
    gain: float = Field(..., description="Transformed weight gained by the insertion")


class FilteredGraph(BaseModel):
    """Maximal planar graph produced by TMFG"""
    model_config = ConfigDict(frozen=True)

    nodes: list[str] = Field(..., description="Node labels, index = node id")
    edges: list[Edge] = Field(..., description="3(n-2) edges")
    faces: list[tuple[int, int, int]] = Field(..., description="Triangular faces, 2n-4 at the end")
    seed: tuple[int, int, int, int] = Field(..., description="Initial tetrahedron")
    insertions: list[Insertion] = Field(default_factory=list, description="Greedy steps in order")

    @field_validator("faces")
    @classmethod
    def _sorted_faces(cls, faces: list[tuple[int, int, int]]) -> list[tuple[int, int, int]]:
        return [tuple(sorted(face)) for face in faces]  # type: ignore[misc]

    @model_validator(mode="after")
    def _check_counts(self) -> "FilteredGraph":
        n = len(self.nodes)
        if len(self.edges) != 3 * (n - 2):
            raise ValueError(f"expected {3 * (n - 2)} edges, got {len(self.edges)}")
        if len(self.faces) != 2 * n - 4:
            raise ValueError(f"expected {2 * n - 4} faces, got {len(self.faces)}")
        return self

    def edge_set(self) -> set[tuple[int, int]]:
        return {(edge.source, edge.target) for edge in self.edges}

    def labelled_edges(self) -> list[tuple[str, str, float]]:
        return [(self.nodes[e.source], self.nodes[e.target], e.weight) for e in self.edges]

    def to_networkx(self) -> nx.Graph:
        """Graph keyed by node label with the signed correlation as `weight`"""
        graph = nx.Graph()
        graph.add_nodes_from(self.nodes)
        graph.add_weighted_edges_from(self.labelled_edges())
        return graph
