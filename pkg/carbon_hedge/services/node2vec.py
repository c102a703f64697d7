"""
Biased second-order random walks (node2vec)
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Hashable, Optional, Union

import networkx as nx
import numpy as np

from carbon_hedge.core.errors import EmbeddingError
from carbon_hedge.core.seeding import derive_seed, rng_for
from carbon_hedge.models.embedding import WalkConfig, WeightTransform
from carbon_hedge.models.graph import FilteredGraph
from carbon_hedge.services.alias import AliasTable

logger = logging.getLogger(__name__)

GraphLike = Union[FilteredGraph, nx.Graph]


def walk_weight(weight: float, transform: WeightTransform) -> float:
    """Non-negative transition mass of a signed edge weight"""
    if transform == WeightTransform.ABSOLUTE:
        return abs(weight)
    if transform == WeightTransform.SQUARE:
        return weight * weight
    return max(weight, 0.0)


class WalkGraph:
    """Index-based adjacency with non-negativized weights and cached alias tables

    Zero-mass edges are left out, so a node can end up without neighbors.
    """

    def __init__(self, graph: GraphLike, transform: WeightTransform = WeightTransform.CLIP):
        if isinstance(graph, FilteredGraph):
            graph = graph.to_networkx()
        self.labels: list[Hashable] = list(graph.nodes())
        self.index = {label: i for i, label in enumerate(self.labels)}
        neighbors: list[list[int]] = [[] for _ in self.labels]
        masses: list[list[float]] = [[] for _ in self.labels]
        for u, v, data in graph.edges(data=True):
            mass = walk_weight(float(data.get("weight", 1.0)), transform)
            if not mass > 0:
                continue
            i, j = self.index[u], self.index[v]
            neighbors[i].append(j)
            masses[i].append(mass)
            neighbors[j].append(i)
            masses[j].append(mass)

        self.neighbors: list[np.ndarray] = []
        self.masses: list[np.ndarray] = []
        for nbrs, mass in zip(neighbors, masses):
            order = np.argsort(nbrs, kind="stable")
            self.neighbors.append(np.asarray(nbrs, dtype=int)[order])
            self.masses.append(np.asarray(mass, dtype=float)[order])
        self.adjacency = [set(n.tolist()) for n in self.neighbors]
        self._node_tables: dict[int, AliasTable] = {}
        self._edge_tables: dict[tuple[int, int], AliasTable] = {}

    def __len__(self) -> int:
        return len(self.labels)

    def probabilities(self, prev: Optional[int], current: int, p: float, q: float) -> np.ndarray:
        """Normalized transition probabilities over `self.neighbors[current]`"""
        nbrs = self.neighbors[current]
        if nbrs.size == 0:
            raise EmbeddingError(f"isolated node {self.labels[current]!r}")
        mass = self.masses[current].copy()
        if prev is not None:
            prev_adjacent = self.adjacency[prev]
            for k, x in enumerate(nbrs):
                if x == prev:
                    mass[k] /= p
                elif x not in prev_adjacent:
                    mass[k] /= q
        return mass / mass.sum()

    def table(self, prev: Optional[int], current: int, p: float, q: float) -> AliasTable:
        if prev is None:
            table = self._node_tables.get(current)
            if table is None:
                table = AliasTable(self.probabilities(None, current, p, q))
                self._node_tables[current] = table
            return table
        key = (prev, current)
        table = self._edge_tables.get(key)
        if table is None:
            table = AliasTable(self.probabilities(prev, current, p, q))
            self._edge_tables[key] = table
        return table

    def walk(self, start: int, config: WalkConfig, rng: np.random.Generator) -> list[int]:
        walk = [start]
        prev: Optional[int] = None
        while len(walk) < config.walk_length:
            current = walk[-1]
            if self.neighbors[current].size == 0:
                break
            step = self.table(prev, current, config.p, config.q).sample(rng)
            prev = current
            walk.append(int(self.neighbors[current][step]))
        return walk


def transition_distribution(
    graph: GraphLike,
    prev: Optional[Hashable],
    current: Hashable,
    config: WalkConfig,
) -> dict[Hashable, float]:
    """Next-step probabilities of a walker at `current` that arrived from `prev`"""
    walk_graph = WalkGraph(graph, config.weight_transform)
    if current not in walk_graph.index:
        raise EmbeddingError(f"unknown node {current!r}")
    i = walk_graph.index[current]
    j = None
    if prev is not None:
        if prev not in walk_graph.index or walk_graph.index[prev] not in walk_graph.adjacency[i]:
            raise EmbeddingError(f"{prev!r} is not a neighbor of {current!r}")
        j = walk_graph.index[prev]
    probs = walk_graph.probabilities(j, i, config.p, config.q)
    return {walk_graph.labels[x]: float(pr) for x, pr in zip(walk_graph.neighbors[i], probs)}


def generate_walks(
    graph: GraphLike, config: WalkConfig, threads: int = 1
) -> list[list[Hashable]]:
    """`num_walks` walks from every node

    Each walk draws from its own generator seeded by (seed, node, walk index),
    so the output does not depend on the thread count.
    """
    walk_graph = WalkGraph(graph, config.weight_transform)
    starts = list(range(len(walk_graph)))

    def one_walk(start: int, round_index: int) -> list[int]:
        rng = np.random.default_rng(derive_seed(config.seed, start, round_index))
        return walk_graph.walk(start, config, rng)

    walks: list[list[int]] = []
    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        for round_index in range(config.num_walks):
            order = rng_for(config.seed, "walk-order", round_index).permutation(starts)
            if pool is not None:
                walks.extend(pool.map(lambda s: one_walk(int(s), round_index), order))
            else:
                walks.extend(one_walk(int(s), round_index) for s in order)
    finally:
        if pool is not None:
            pool.shutdown()

    short = sum(1 for w in walks if len(w) < config.walk_length)
    if short:
        logger.warning(f"{short} walk(s) stopped early at nodes without positive-weight edges")
    logger.info(f"Generated {len(walks)} walks of length {config.walk_length}")
    return [[walk_graph.labels[i] for i in walk] for walk in walks]
