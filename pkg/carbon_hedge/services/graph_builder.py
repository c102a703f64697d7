"""
Pearson correlation network and Triangulated Maximally Filtered Graph
"""

import heapq
import itertools
import logging
from typing import Optional

import numpy as np
import pandas as pd

from carbon_hedge.core.errors import GraphConstructionError
from carbon_hedge.models.graph import (
    CorrelationMatrix,
    Edge,
    FilteredGraph,
    GainTransform,
    Insertion,
)
from carbon_hedge.models.market import ReturnsPanel

logger = logging.getLogger(__name__)

MIN_OBSERVATIONS = 30

Face = tuple[int, int, int]


def pearson_matrix(
    panel: ReturnsPanel,
    extra_columns: Optional[pd.DataFrame] = None,
    min_observations: int = MIN_OBSERVATIONS,
) -> CorrelationMatrix:
    """Sample Pearson correlations of stock columns followed by factor columns"""
    frame = panel.frame
    if extra_columns is not None and not extra_columns.empty:
        if not extra_columns.index.equals(frame.index):
            raise GraphConstructionError("factor columns are not aligned with the return panel")
        frame = pd.concat([frame, extra_columns], axis=1)
    labels = [str(c) for c in frame.columns]
    if len(set(labels)) != len(labels):
        raise GraphConstructionError("factor names collide with tickers")
    if len(frame) < min_observations:
        raise GraphConstructionError(
            f"need at least {min_observations} observations, got {len(frame)}"
        )

    values = frame.to_numpy(dtype=float)
    if not np.isfinite(values).all():
        raise GraphConstructionError("non-finite values in correlation input")
    flat = [labels[i] for i in np.flatnonzero(values.std(axis=0) == 0)]
    if flat:
        raise GraphConstructionError(f"constant column (zero variance): {flat}")

    corr = np.corrcoef(values, rowvar=False)
    corr = np.clip((corr + corr.T) / 2.0, -1.0, 1.0)
    np.fill_diagonal(corr, 1.0)
    return CorrelationMatrix(labels=labels, values=corr)


def gain_weights(corr: np.ndarray, gain: GainTransform) -> np.ndarray:
    """Transformed weight matrix with a zero diagonal"""
    if gain == GainTransform.SQUARE:
        weights = corr * corr
    elif gain == GainTransform.ABSOLUTE:
        weights = np.abs(corr)
    else:
        weights = corr.astype(float, copy=True)
    weights = np.array(weights, dtype=float)
    np.fill_diagonal(weights, 0.0)
    return weights


def seed_tetrahedron(weights: np.ndarray) -> tuple[int, int, int, int]:
    """Four highest row-sum vertices, improved by single swaps until stable"""
    n = weights.shape[0]
    row_sums = weights.sum(axis=1)
    order = sorted(range(n), key=lambda i: (-row_sums[i], i))
    seed = sorted(order[:4])

    def total(vertices: list[int]) -> float:
        return float(sum(weights[a, b] for a, b in itertools.combinations(vertices, 2)))

    best = total(seed)
    improved = True
    while improved:
        improved = False
        best_swap: Optional[list[int]] = None
        for position in range(4):
            for vertex in range(n):
                if vertex in seed:
                    continue
                candidate = sorted(seed[:position] + [vertex] + seed[position + 1 :])
                value = total(candidate)
                if value > best:
                    best, best_swap = value, candidate
        if best_swap is not None:
            seed = best_swap
            improved = True
    return seed[0], seed[1], seed[2], seed[3]


def tmfg(corr: CorrelationMatrix, gain: GainTransform = GainTransform.SQUARE) -> FilteredGraph:
    """Greedy TMFG: seed tetrahedron, then best-gain vertex-into-face insertions

    Ties resolve to the smallest vertex index, then the earliest-created face.
    """
    values = np.asarray(corr.values, dtype=float)
    n = len(corr.labels)
    if n < 4:
        raise GraphConstructionError(f"TMFG needs at least 4 nodes, got {n}")
    if np.isnan(values).any():
        raise GraphConstructionError("correlation matrix contains NaN")

    weights = gain_weights(values, gain)
    seed = seed_tetrahedron(weights)

    edges: list[Edge] = [
        Edge(source=a, target=b, weight=float(values[a, b]))
        for a, b in itertools.combinations(seed, 2)
    ]
    faces: dict[int, Face] = {}
    face_ids = itertools.count()
    remaining = np.array(sorted(set(range(n)) - set(seed)), dtype=int)
    placed = np.zeros(n, dtype=bool)
    placed[list(seed)] = True
    heap: list[tuple[float, int, int]] = []

    def best_for(face_id: int) -> None:
        """Push the face's best unplaced vertex onto the heap"""
        free = remaining[~placed[remaining]]
        if free.size == 0:
            return
        a, b, c = faces[face_id]
        gains = weights[free, a] + weights[free, b] + weights[free, c]
        i = int(np.argmax(gains))
        heapq.heappush(heap, (-float(gains[i]), int(free[i]), face_id))

    def add_face(face: tuple[int, ...]) -> int:
        face_id = next(face_ids)
        faces[face_id] = tuple(sorted(face))  # type: ignore[assignment]
        return face_id

    for face in itertools.combinations(seed, 3):
        best_for(add_face(face))

    insertions: list[Insertion] = []
    while len(insertions) < n - 4:
        neg_gain, vertex, face_id = heapq.heappop(heap)
        if face_id not in faces:
            continue
        if placed[vertex]:
            best_for(face_id)
            continue

        a, b, c = faces.pop(face_id)
        placed[vertex] = True
        insertions.append(Insertion(vertex=vertex, face=(a, b, c), gain=-neg_gain))
        for other in (a, b, c):
            source, target = min(vertex, other), max(vertex, other)
            edges.append(Edge(source=source, target=target, weight=float(values[source, target])))
        for new_face in ((vertex, a, b), (vertex, a, c), (vertex, b, c)):
            best_for(add_face(new_face))

    graph = FilteredGraph(
        nodes=list(corr.labels),
        edges=edges,
        faces=[faces[i] for i in sorted(faces)],
        seed=seed,
        insertions=insertions,
    )
    logger.info(
        f"TMFG over {n} nodes: {len(graph.edges)} edges, {len(graph.faces)} faces, "
        f"seed {[corr.labels[i] for i in seed]}"
    )
    return graph
