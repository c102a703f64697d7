"""
node2vec configuration and embedding space models
"""

from enum import Enum

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator


class WeightTransform(str, Enum):
    """Non-negativization of signed edge weights for random walks"""
    CLIP = "clip"
    ABSOLUTE = "abs"
    SQUARE = "square"


class WalkConfig(BaseModel):
    """Biased second-order random walk parameters"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    p: float = Field(default=1.0, gt=0, description="Return parameter")
    q: float = Field(default=1.0, gt=0, description="In-out parameter")
    num_walks: int = Field(default=20, ge=1, description="Walks started from every node")
    walk_length: int = Field(default=80, ge=2, description="Nodes per walk")
    seed: int = Field(default=42, ge=0, lt=2**64, description="64-bit walk seed")
    weight_transform: WeightTransform = Field(
        default=WeightTransform.CLIP, description="Edge weight non-negativization"
    )


class TrainingConfig(BaseModel):
    """Skip-gram with negative sampling hyperparameters"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    dim: int = Field(default=2, ge=2, description="Embedding dimension")
    window: int = Field(default=10, ge=1, description="Context radius")
    negatives: int = Field(default=5, ge=0, description="Negative samples per pair")
    epochs: int = Field(default=5, ge=1, description="Passes over the walk corpus")
    batch_pairs: int = Field(default=128, ge=1, description="Context pairs per update")
    learning_rate: float = Field(default=0.025, gt=0, description="Initial learning rate")
    min_learning_rate: float = Field(default=0.0001, gt=0, description="Final learning rate")
    seed: int = Field(default=42, ge=0, lt=2**64, description="Training seed")
    workers: int = Field(default=1, ge=1, description="1 = deterministic single-threaded")

    @model_validator(mode="after")
    def _check_schedule(self) -> "TrainingConfig":
        if self.min_learning_rate > self.learning_rate:
            raise ValueError("min_learning_rate must not exceed learning_rate")
        return self


class EmbeddingSpace(BaseModel):
    """Node id -> d-dimensional vector, Euclidean metric on the `in` vectors"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    labels: list[str] = Field(..., description="Node ids, row order of the matrices")
    vectors: np.ndarray = Field(..., description="n x d input vectors")
    context_vectors: np.ndarray = Field(..., description="n x d output vectors (training only)")

    @model_validator(mode="after")
    def _check_shapes(self) -> "EmbeddingSpace":
        n = len(self.labels)
        if self.vectors.ndim != 2 or self.vectors.shape[0] != n:
            raise ValueError("vectors must be an n x d matrix")
        if self.context_vectors.shape != self.vectors.shape:
            raise ValueError("context vectors must match vector shape")
        if not np.isfinite(self.vectors).all():
            raise ValueError("embedding contains non-finite entries")
        return self

    @property
    def dimension(self) -> int:
        return int(self.vectors.shape[1])

    def index_of(self, node: str) -> int:
        return self._index()[node]

    def vector(self, node: str) -> np.ndarray:
        return self.vectors[self.index_of(node)]

    def __contains__(self, node: object) -> bool:
        return node in self._index()

    def _index(self) -> dict[str, int]:
        return {label: i for i, label in enumerate(self.labels)}
