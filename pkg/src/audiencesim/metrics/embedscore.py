"""Token-embedding greedy-matching scores.

A stand-in for pretrained-scorer similarity that works against any embedding
backend: each token of one text is matched to its most similar token in the
other, and the two directional means are combined into an F1.  With the
deterministic mock embedder the scores are reproducible offline; the
embedder identity is recorded in evaluation reports.
"""

from __future__ import annotations

import random
from itertools import combinations

import numpy as np

from audiencesim.errors import InputError
from audiencesim.gateway.base import EmbeddingBackend
from audiencesim.metrics.textnorm import tokenize

# Cap on scored pairs inside a group; above it a seeded sample is drawn.
DEFAULT_PAIR_LIMIT = 200


def greedy_match_f1(
    text_a: str,
    text_b: str,
    backend: EmbeddingBackend,
    cache: dict[str, np.ndarray] | None = None,
) -> float:
    """Symmetric greedy-matching F1 between two texts, in [-1, 1].

    Precision: mean over tokens of ``text_a`` of the max cosine against
    tokens of ``text_b``.  Recall: same with roles swapped.  F1 is their
    harmonic mean.  Either side tokenizing to nothing scores 0.0.
    """
    if cache is None:
        cache = {}
    va = _token_matrix(tokenize(text_a), backend, cache)
    vb = _token_matrix(tokenize(text_b), backend, cache)
    if va.shape[0] == 0 or vb.shape[0] == 0:
        return 0.0
    sims = np.clip(va @ vb.T, -1.0, 1.0)
    precision = float(sims.max(axis=1).mean())
    recall = float(sims.max(axis=0).mean())
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def embedding_group_score(
    bodies: list[str],
    backend: EmbeddingBackend,
    max_pairs: int = DEFAULT_PAIR_LIMIT,
    seed: int = 0,
) -> float:
    """Mean greedy-matching F1 over comment pairs within one group.

    All unordered pairs are scored up to ``max_pairs``; beyond that a seeded
    sample of pairs is drawn.  Pairing happens after a canonical sort so the
    result does not depend on corpus order.
    """
    if len(bodies) < 2:
        raise InputError("group score needs at least 2 comments")
    if max_pairs < 1:
        raise InputError(f"max_pairs must be >= 1, got {max_pairs}")
    ordered = sorted(bodies)
    pairs = list(combinations(range(len(ordered)), 2))
    if len(pairs) > max_pairs:
        pairs = random.Random(seed).sample(pairs, max_pairs)
    cache: dict[str, np.ndarray] = {}
    scores = [
        greedy_match_f1(ordered[i], ordered[j], backend, cache) for i, j in pairs
    ]
    return float(np.mean(scores))


def embedding_relevance(
    bodies: list[str], summary_text: str, backend: EmbeddingBackend
) -> float:
    """Mean greedy-matching F1 of each comment against the summary."""
    if not bodies:
        raise InputError("corpus must be nonempty")
    if not summary_text.strip():
        raise InputError("summary text must be nonempty")
    cache: dict[str, np.ndarray] = {}
    scores = [greedy_match_f1(b, summary_text, backend, cache) for b in bodies]
    return float(np.mean(scores))


def group_pair_count(group_size: int, max_pairs: int = DEFAULT_PAIR_LIMIT) -> int:
    """How many pairs embedding_group_score actually scores for a group."""
    total = group_size * (group_size - 1) // 2
    return min(total, max_pairs)


def _token_matrix(
    tokens: list[str], backend: EmbeddingBackend, cache: dict[str, np.ndarray]
) -> np.ndarray:
    """Stack unit-normalized token embeddings into an (n, dim) matrix."""
    rows = []
    for token in tokens:
        vec = cache.get(token)
        if vec is None:
            vec = np.asarray(backend.embed(token).values, dtype=np.float64)
            norm = np.linalg.norm(vec)
            if norm == 0.0:
                raise InputError("embedding backend returned a zero vector")
            vec = vec / norm
            cache[token] = vec
        rows.append(vec)
    if not rows:
        return np.zeros((0, 0), dtype=np.float64)
    return np.stack(rows)
