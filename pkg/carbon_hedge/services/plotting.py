"""
Static SVG plots of embeddings and filtered graphs
"""

import logging
from pathlib import Path
from typing import Mapping, Optional

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import networkx as nx  # noqa: E402
import numpy as np  # noqa: E402
from matplotlib.figure import Figure  # noqa: E402

from carbon_hedge.models.embedding import EmbeddingSpace  # noqa: E402
from carbon_hedge.models.graph import FilteredGraph, NodeKind  # noqa: E402
from carbon_hedge.models.market import GicsSector  # noqa: E402

logger = logging.getLogger(__name__)

FACTOR_COLOR = "red"
UNKNOWN_COLOR = "lightgrey"
HASH_SALT = "carbon-hedge"
LAYOUT_SEED = 0

SECTOR_COLORS: dict[GicsSector, tuple[float, float, float, float]] = {
    sector: matplotlib.colormaps["tab20"](2 * i % 20 + (i >= 10))
    for i, sector in enumerate(GicsSector)
}


def _save(figure: Figure, path: Optional[Path]) -> None:
    if path is None:
        return
    path.parent.mkdir(parents=True, exist_ok=True)
    # Fixed hash salt and no Date entry keep reruns byte-identical
    with matplotlib.rc_context({"svg.hashsalt": HASH_SALT}):
        figure.savefig(path, format="svg", metadata={"Date": None})
    logger.debug(f"Wrote plot {path}")


def _split_nodes(
    labels: list[str], kinds: Mapping[str, NodeKind]
) -> tuple[list[int], list[int]]:
    stocks = [i for i, n in enumerate(labels) if kinds.get(n, NodeKind.STOCK) == NodeKind.STOCK]
    factors = [i for i, n in enumerate(labels) if kinds.get(n) == NodeKind.FACTOR]
    return stocks, factors


def emit_embedding_map(
    space: EmbeddingSpace,
    kinds: Mapping[str, NodeKind],
    sectors: Mapping[str, GicsSector],
    path: Optional[Path] = None,
    title: Optional[str] = None,
) -> Figure:
    """Scatter of the first two coordinates; stocks by sector, factors red and labelled"""
    if space.dimension > 2:
        logger.warning(
            f"Embedding has {space.dimension} dimensions; plotting the first two coordinates"
        )
    xy = space.vectors[:, :2]
    stocks, factors = _split_nodes(space.labels, kinds)

    figure, ax = plt.subplots(figsize=(8, 6))
    for sector in GicsSector:
        members = [i for i in stocks if sectors.get(space.labels[i]) == sector]
        if members:
            ax.scatter(
                xy[members, 0],
                xy[members, 1],
                s=18,
                color=SECTOR_COLORS[sector],
                label=sector.value,
            )
    unknown = [i for i in stocks if space.labels[i] not in sectors]
    if unknown:
        ax.scatter(xy[unknown, 0], xy[unknown, 1], s=18, color=UNKNOWN_COLOR, label="Unknown")
    if factors:
        ax.scatter(xy[factors, 0], xy[factors, 1], s=60, color=FACTOR_COLOR, marker="D")
        for i in factors:
            ax.annotate(
                space.labels[i],
                (xy[i, 0], xy[i, 1]),
                xytext=(4, 4),
                textcoords="offset points",
                color=FACTOR_COLOR,
                fontweight="bold",
            )

    ax.set_xlabel("x1")
    ax.set_ylabel("x2")
    if title:
        ax.set_title(title)
    if stocks:
        ax.legend(fontsize=7, loc="best", frameon=False)
    figure.tight_layout()
    _save(figure, path)
    return figure


def draw_filtered_graph(
    graph: FilteredGraph,
    kinds: Mapping[str, NodeKind],
    sectors: Mapping[str, GicsSector],
    path: Optional[Path] = None,
    title: Optional[str] = None,
) -> Figure:
    """Filtered graph with edge width proportional to |correlation|"""
    nx_graph = graph.to_networkx()
    positions = nx.spring_layout(nx_graph, seed=LAYOUT_SEED, weight=None)
    stocks, factors = _split_nodes(graph.nodes, kinds)
    stock_nodes = [graph.nodes[i] for i in stocks]
    factor_nodes = [graph.nodes[i] for i in factors]

    weights = np.array([abs(w) for _, _, w in graph.labelled_edges()])
    widths = 0.3 + 2.5 * weights / weights.max() if weights.size and weights.max() > 0 else 0.5

    figure, ax = plt.subplots(figsize=(9, 9))
    nx.draw_networkx_edges(
        nx_graph,
        positions,
        edgelist=[(a, b) for a, b, _ in graph.labelled_edges()],
        width=widths,
        edge_color="grey",
        alpha=0.6,
        ax=ax,
    )
    nx.draw_networkx_nodes(
        nx_graph,
        positions,
        nodelist=stock_nodes,
        node_size=30,
        node_color=[SECTOR_COLORS.get(sectors.get(n), UNKNOWN_COLOR) for n in stock_nodes],
        ax=ax,
    )
    if factor_nodes:
        nx.draw_networkx_nodes(
            nx_graph, positions, nodelist=factor_nodes, node_size=90, node_color=FACTOR_COLOR, ax=ax
        )
        nx.draw_networkx_labels(
            nx_graph,
            positions,
            labels={n: n for n in factor_nodes},
            font_color=FACTOR_COLOR,
            font_weight="bold",
            ax=ax,
        )
    ax.set_axis_off()
    if title:
        ax.set_title(title)
    figure.tight_layout()
    _save(figure, path)
    return figure


def close_figure(figure: Figure) -> None:
    plt.close(figure)
