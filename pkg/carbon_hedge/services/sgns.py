"""
Skip-gram with negative sampling over random-walk corpora
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Hashable, Optional, Sequence

import numpy as np
from scipy.special import expit, log_expit

from carbon_hedge.core.errors import EmbeddingError
from carbon_hedge.core.seeding import rng_for
from carbon_hedge.models.embedding import EmbeddingSpace, TrainingConfig

logger = logging.getLogger(__name__)

NOISE_POWER = 0.75

EpochCallback = Callable[[int, np.ndarray, np.ndarray], None]


def pair_objective(center: np.ndarray, context: np.ndarray, noise: np.ndarray) -> float:
    """log s(z.c) + sum_k log s(-z.n_k) for one (center, context) pair"""
    value = log_expit(center @ context)
    if noise.size:
        value += log_expit(-(noise @ center)).sum()
    return float(value)


def pair_gradient(
    center: np.ndarray, context: np.ndarray, noise: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Gradient of `pair_objective` w.r.t. center, context and noise vectors"""
    positive = 1.0 - expit(center @ context)
    grad_center = positive * context
    grad_context = positive * center
    if noise.size:
        negative = expit(noise @ center)
        grad_center = grad_center - negative @ noise
        grad_noise = -np.outer(negative, center)
    else:
        grad_noise = np.zeros_like(noise)
    return grad_center, grad_context, grad_noise


def context_pairs(walk: Sequence[int], window: int) -> tuple[np.ndarray, np.ndarray]:
    """Every (center, context) index pair within `window` positions"""
    tokens = np.asarray(walk, dtype=int)
    n = tokens.size
    centers, contexts = [], []
    for offset in range(1, min(window, n - 1) + 1):
        centers.append(tokens[:-offset])
        contexts.append(tokens[offset:])
        centers.append(tokens[offset:])
        contexts.append(tokens[:-offset])
    if not centers:
        empty = np.zeros(0, dtype=int)
        return empty, empty
    return np.concatenate(centers), np.concatenate(contexts)


def noise_distribution(walks: Sequence[Sequence[int]], size: int) -> np.ndarray:
    """Unigram occurrence counts raised to 3/4, normalized"""
    counts = np.zeros(size, dtype=float)
    for walk in walks:
        np.add.at(counts, np.asarray(walk, dtype=int), 1.0)
    weights = counts**NOISE_POWER
    return weights / weights.sum()


def sgns_update(
    vectors: np.ndarray,
    context_vectors: np.ndarray,
    centers: np.ndarray,
    contexts: np.ndarray,
    negatives: np.ndarray,
    learning_rate: float,
) -> None:
    """One ascent step on a minibatch of pairs, in place

    Per-pair gradients are summed into each row, as sequential updates within
    the batch would accumulate them.
    """
    z = vectors[centers]
    c = context_vectors[contexts]
    positive = 1.0 - expit(np.einsum("ij,ij->i", z, c))
    grad_z = positive[:, None] * c
    grad_c = positive[:, None] * z

    grad_in = np.zeros_like(vectors)
    grad_out = np.zeros_like(context_vectors)
    np.add.at(grad_out, contexts, grad_c)

    if negatives.size:
        noise = context_vectors[negatives]  # pairs x k x d
        negative = expit(np.einsum("ikd,id->ik", noise, z))
        grad_z = grad_z - np.einsum("ik,ikd->id", negative, noise)
        grad_n = -negative[:, :, None] * z[:, None, :]
        np.add.at(grad_out, negatives.ravel(), grad_n.reshape(-1, z.shape[1]))
    np.add.at(grad_in, centers, grad_z)

    if not (np.isfinite(grad_in).all() and np.isfinite(grad_out).all()):
        raise EmbeddingError(
            f"non-finite gradient (learning rate {learning_rate:.3g}, "
            f"max |vector| {np.abs(vectors).max():.3g}, "
            f"max |context| {np.abs(context_vectors).max():.3g})"
        )
    vectors += learning_rate * grad_in
    context_vectors += learning_rate * grad_out


def draw_negatives(
    rng: np.random.Generator, cumulative: np.ndarray, shape: tuple[int, int]
) -> np.ndarray:
    """Node indices drawn from the noise distribution given its cumulative sum"""
    if shape[1] == 0:
        return np.zeros(shape, dtype=int)
    drawn = np.searchsorted(cumulative, rng.random(shape), side="right")
    return np.minimum(drawn, cumulative.size - 1)


def train_sgns(
    walks: Sequence[Sequence[Hashable]],
    config: TrainingConfig,
    labels: Optional[Sequence[Hashable]] = None,
    on_epoch: Optional[EpochCallback] = None,
) -> EmbeddingSpace:
    """Train in/out vectors on walk co-occurrences

    Each epoch walks are visited in a fresh random order and their pairs are
    streamed in minibatches of `config.batch_pairs`. The learning rate decays
    linearly over every batch of every epoch.
    `labels` fixes the row order (first appearance in the walks otherwise).
    """
    if not walks:
        raise EmbeddingError("no walks to train on")
    if labels is None:
        labels = list(dict.fromkeys(node for walk in walks for node in walk))
    index = {label: i for i, label in enumerate(labels)}
    try:
        corpus = [[index[node] for node in walk] for walk in walks]
    except KeyError as e:
        raise EmbeddingError(f"walk visits unknown node {e.args[0]!r}")

    n, d = len(labels), config.dim
    init_rng = rng_for(config.seed, "sgns-init")
    vectors = init_rng.uniform(-0.5 / d, 0.5 / d, size=(n, d))
    context_vectors = np.zeros((n, d), dtype=float)
    cumulative = np.cumsum(noise_distribution(corpus, n))
    walk_pairs = [context_pairs(walk, config.window) for walk in corpus]
    n_pairs = sum(centers.size for centers, _ in walk_pairs)
    if n_pairs == 0:
        raise EmbeddingError("walks too short to form context pairs")
    per_epoch = -(-n_pairs // config.batch_pairs)
    total = config.epochs * per_epoch

    def learning_rate(step: int) -> float:
        progress = step / max(total - 1, 1)
        span = config.learning_rate - config.min_learning_rate
        return config.learning_rate - span * progress

    def run(epoch: int, worker: int, centers: np.ndarray, contexts: np.ndarray) -> None:
        rng = rng_for(config.seed, "sgns", epoch, worker)
        for b in range(worker, per_epoch, config.workers):
            batch = slice(b * config.batch_pairs, (b + 1) * config.batch_pairs)
            negatives = draw_negatives(
                rng, cumulative, (centers[batch].size, config.negatives)
            )
            sgns_update(
                vectors,
                context_vectors,
                centers[batch],
                contexts[batch],
                negatives,
                learning_rate(epoch * per_epoch + b),
            )

    for epoch in range(config.epochs):
        order = rng_for(config.seed, "sgns-order", epoch).permutation(len(walk_pairs))
        centers = np.concatenate([walk_pairs[w][0] for w in order])
        contexts = np.concatenate([walk_pairs[w][1] for w in order])
        if config.workers > 1:
            # lock-free updates on shared arrays
            with ThreadPoolExecutor(max_workers=config.workers) as pool:
                jobs = [
                    pool.submit(run, epoch, w, centers, contexts)
                    for w in range(config.workers)
                ]
                for job in jobs:
                    job.result()
        else:
            run(epoch, 0, centers, contexts)
        if on_epoch is not None:
            on_epoch(epoch, vectors, context_vectors)
        logger.debug(
            f"SGNS epoch {epoch + 1}/{config.epochs} done ({per_epoch} batches)"
        )

    logger.info(
        f"Trained {d}-dimensional embedding for {n} nodes on {len(walks)} walks"
    )
    return EmbeddingSpace(
        labels=[str(label) for label in labels],
        vectors=vectors,
        context_vectors=context_vectors,
    )
