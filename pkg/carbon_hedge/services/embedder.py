"""
Graph embedding and Euclidean distance rankings
"""

import logging
from typing import Iterable, Mapping, Optional

import numpy as np

from carbon_hedge.core.errors import EmbeddingError
from carbon_hedge.models.embedding import EmbeddingSpace, TrainingConfig, WalkConfig
from carbon_hedge.models.market import GicsSector
from carbon_hedge.services.node2vec import GraphLike, WalkGraph, generate_walks
from carbon_hedge.services.sgns import train_sgns

logger = logging.getLogger(__name__)

DIVERGENCE_BOUND = 100.0


def embed_graph(
    graph: GraphLike,
    walk_config: WalkConfig,
    training_config: TrainingConfig,
    threads: int = 1,
) -> EmbeddingSpace:
    """node2vec: biased walks followed by skip-gram training"""
    labels = WalkGraph(graph, walk_config.weight_transform).labels
    walks = generate_walks(graph, walk_config, threads=threads)
    space = train_sgns(walks, training_config, labels=labels)
    largest = float(np.abs(space.vectors).max())
    if largest >= DIVERGENCE_BOUND:
        logger.warning(f"Embedding entries reached {largest:.1f}; training may have diverged")
    return space


def distance(space: EmbeddingSpace, a: str, b: str) -> float:
    """Euclidean distance between the in-vectors of two nodes"""
    for node in (a, b):
        if node not in space:
            raise EmbeddingError(f"unknown node {node!r}")
    return float(np.linalg.norm(space.vector(a) - space.vector(b)))


def distances_from(
    space: EmbeddingSpace, anchor: str, candidates: Iterable[str]
) -> dict[str, float]:
    if anchor not in space:
        raise EmbeddingError(f"unknown node {anchor!r}")
    origin = space.vector(anchor)
    result = {}
    for node in candidates:
        if node not in space:
            raise EmbeddingError(f"unknown node {node!r}")
        result[node] = float(np.linalg.norm(space.vector(node) - origin))
    return result


def rank_by_distance(space: EmbeddingSpace, anchor: str, candidates: Iterable[str]) -> list[str]:
    """Candidates by ascending distance to the anchor, ties by ticker"""
    distances = distances_from(space, anchor, candidates)
    return sorted(distances, key=lambda node: (distances[node], node))


def sector_distances(
    space: EmbeddingSpace,
    anchor: str,
    sectors: Mapping[str, GicsSector],
    candidates: Optional[Iterable[str]] = None,
) -> list[tuple[GicsSector, float, int]]:
    """(sector, mean member distance to the anchor, members) ascending by distance"""
    pool = [t for t in (candidates if candidates is not None else sectors) if t in sectors]
    distances = distances_from(space, anchor, pool)
    grouped: dict[GicsSector, list[float]] = {}
    for ticker in sorted(distances):
        grouped.setdefault(sectors[ticker], []).append(distances[ticker])
    summary = [(sector, float(np.mean(values)), len(values)) for sector, values in grouped.items()]
    return sorted(summary, key=lambda row: (row[1], row[0].value))


def nearest_sector(
    space: EmbeddingSpace,
    anchor: str,
    sectors: Mapping[str, GicsSector],
    candidates: Optional[Iterable[str]] = None,
) -> Optional[GicsSector]:
    ranking = sector_distances(space, anchor, sectors, candidates)
    return ranking[0][0] if ranking else None
