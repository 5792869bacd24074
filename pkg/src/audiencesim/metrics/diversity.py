"""Lexical diversity metrics: distinct n-grams and self-BLEU."""

from __future__ import annotations

import math
import random
from bisect import bisect_left

import numpy as np

from audiencesim.errors import InputError
from audiencesim.metrics import kernels
from audiencesim.metrics.textnorm import ngrams, tokenize

# Smoothing constant for zero higher-order precisions.  A candidate with no
# unigram overlap scores 0.0 exactly; otherwise zero precisions are floored
# at EPS so the geometric mean stays defined.
BLEU_EPS = 1e-9


def distinct_ngrams(bodies: list[str], n: int) -> tuple[float, float]:
    """Mean distinct n-gram count per comment, plus the length-normalized mean.

    The normalized figure divides each comment's distinct count by its total
    n-gram count (0 for comments shorter than ``n`` tokens), making the
    statistic per-comment and therefore invariant under duplicating the
    whole corpus.
    """
    if n not in (1, 2, 3, 4):
        raise InputError(f"n-gram order must be in 1..4, got {n}")
    if not bodies:
        raise InputError("corpus must be nonempty")
    counts = []
    ratios = []
    for body in bodies:
        grams = ngrams(tokenize(body), n)
        distinct = len(set(grams))
        counts.append(distinct)
        ratios.append(distinct / len(grams) if grams else 0.0)
    return float(np.mean(counts)), float(np.mean(ratios))


def self_bleu(
    bodies: list[str],
    max_n: int = 4,
    subsample: int | None = None,
    seed: int = 0,
) -> float:
    """Mean BLEU of each comment against the rest of the group.

    Higher means the comments repeat each other.  With ``subsample`` the
    group is first reduced to a seeded random sample of that size (drawn
    after a canonical sort so the result is independent of input order),
    which is how groups of different sizes are compared on equal footing.

    Per candidate: modified (clipped) n-gram precision for orders
    1..``max_n`` against all other comments as references, geometric mean
    over the orders the candidate actually has n-grams for, times the
    standard brevity penalty against the closest reference length.  A
    candidate with zero unigram overlap scores 0.0; other zero precisions
    are floored at ``BLEU_EPS``.
    """
    if len(bodies) < 2:
        raise InputError("self-BLEU needs at least 2 comments")
    if max_n < 1:
        raise InputError(f"max_n must be >= 1, got {max_n}")
    if subsample is not None:
        if subsample < 2:
            raise InputError(f"subsample must be >= 2, got {subsample}")
        if subsample < len(bodies):
            rng = random.Random(seed)
            bodies = rng.sample(sorted(bodies), subsample)
    token_lists = [tokenize(b) for b in bodies]
    scores = corpus_self_bleu_scores(token_lists, max_n)
    return float(np.mean(scores))


def corpus_self_bleu_scores(
    token_lists: list[list[str]], max_n: int
) -> np.ndarray:
    """Per-candidate BLEU scores with all other comments as references.

    Clipping against "the best reference" is done corpus-wide: for every
    gram we keep the highest and second-highest per-comment count and who
    holds the highest, so each candidate's clip limit is one lookup instead
    of a scan over all references.
    """
    n_comments = len(token_lists)
    lengths = [len(t) for t in token_lists]

    clipped = np.zeros((max_n, n_comments), dtype=np.int64)
    totals = np.zeros((max_n, n_comments), dtype=np.int64)
    for order in range(1, max_n + 1):
        cl, to = _order_clip_stats(token_lists, order)
        clipped[order - 1] = cl
        totals[order - 1] = to

    sorted_lengths = sorted(lengths)
    scores = np.zeros(n_comments, dtype=np.float64)
    for i in range(n_comments):
        scores[i] = _bleu_from_stats(
            clipped[:, i], totals[:, i], lengths[i], sorted_lengths
        )
    return scores


def _order_clip_stats(
    token_lists: list[list[str]], order: int
) -> tuple[np.ndarray, np.ndarray]:
    """(clipped matches, total n-grams) per comment for one n-gram order."""
    gram_ids: dict[tuple[str, ...], int] = {}
    per_comment_unique: list[np.ndarray] = []
    per_comment_counts: list[np.ndarray] = []
    totals = np.zeros(len(token_lists), dtype=np.int64)

    for i, tokens in enumerate(token_lists):
        grams = ngrams(tokens, order)
        totals[i] = len(grams)
        ids = np.fromiter(
            (gram_ids.setdefault(g, len(gram_ids)) for g in grams),
            dtype=np.int64,
            count=len(grams),
        )
        unique, counts = np.unique(ids, return_counts=True)
        per_comment_unique.append(unique)
        per_comment_counts.append(counts.astype(np.int64))

    ugrams = np.concatenate(per_comment_unique) if per_comment_unique else np.zeros(0, np.int64)
    ucounts = np.concatenate(per_comment_counts) if per_comment_counts else np.zeros(0, np.int64)
    owners = np.repeat(
        np.arange(len(token_lists), dtype=np.int64),
        [u.shape[0] for u in per_comment_unique],
    )
    uoffsets = np.zeros(len(token_lists) + 1, dtype=np.int64)
    np.cumsum([u.shape[0] for u in per_comment_unique], out=uoffsets[1:])

    unique_grams, max1, arg1, max2 = kernels.gram_group_stats(ugrams, ucounts, owners)
    clipped = kernels.clipped_totals(
        ugrams, ucounts, uoffsets, unique_grams, max1, arg1, max2
    )
    return clipped, totals


def _bleu_from_stats(
    clipped: np.ndarray, totals: np.ndarray, length: int, sorted_lengths: list[int]
) -> float:
    active = [k for k in range(len(totals)) if totals[k] > 0]
    if not active:
        return 0.0
    precisions = [clipped[k] / totals[k] for k in active]
    if precisions[0] == 0.0:
        return 0.0
    log_sum = sum(math.log(max(p, BLEU_EPS)) for p in precisions)
    geo_mean = math.exp(log_sum / len(active))
    ref_len = closest_reference_length(sorted_lengths, length)
    bp = 1.0 if length >= ref_len else math.exp(1.0 - ref_len / length)
    return bp * geo_mean


def closest_reference_length(sorted_lengths: list[int], candidate_length: int) -> int:
    """Reference length closest to the candidate's, ties to the smaller.

    ``sorted_lengths`` includes the candidate itself once; that occurrence
    is skipped unless another comment shares the same length.
    """
    pos = bisect_left(sorted_lengths, candidate_length)
    # another comment of the same length?
    if pos + 1 < len(sorted_lengths) and sorted_lengths[pos + 1] == candidate_length:
        return candidate_length
    below = sorted_lengths[pos - 1] if pos > 0 else None
    above = sorted_lengths[pos + 1] if pos + 1 < len(sorted_lengths) else None
    if below is None and above is None:
        return candidate_length
    if below is None:
        return above
    if above is None:
        return below
    if candidate_length - below <= above - candidate_length:
        return below
    return above
