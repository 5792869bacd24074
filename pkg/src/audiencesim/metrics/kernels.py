"""Hot numeric kernels behind the n-gram metrics.

Two interchangeable implementations exist for each kernel: a numba
``@njit`` version and a pure numpy/Python fallback.  Set
``AUDIENCESIM_NO_NUMBA=1`` to force the fallback (it is also selected
automatically when numba is unavailable).  ``benchmarks/bench_kernels.py``
compares the two.

Kernels:

- ``lcs_length``: longest-common-subsequence length over integer token ids
  (the O(len_a * len_b) dynamic program behind ROUGE-L).
- ``gram_group_stats``: per-gram (max count, owner, runner-up count) across
  a corpus, which turns "clip against the best reference" from an
  O(corpus^2) scan into one linear pass.
- ``clipped_totals``: per-comment clipped n-gram matches against those
  group stats.
"""

from __future__ import annotations

import os

import numpy as np

USE_NUMBA = os.environ.get("AUDIENCESIM_NO_NUMBA", "") not in ("1", "true", "yes")
if USE_NUMBA:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover
        USE_NUMBA = False


def _lcs_length_impl(a, b):
    # Rolling single-row DP; a is the shorter sequence after the swap below.
    n_a = a.shape[0]
    n_b = b.shape[0]
    if n_a == 0 or n_b == 0:
        return 0
    row = np.zeros(n_a + 1, dtype=np.int64)
    for j in range(n_b):
        prev_diag = 0
        for i in range(n_a):
            tmp = row[i + 1]
            if a[i] == b[j]:
                row[i + 1] = prev_diag + 1
            elif row[i] > row[i + 1]:
                row[i + 1] = row[i]
            prev_diag = tmp
    return int(row[n_a])


def _gram_group_stats_impl(starts, ends, counts, owners, max1, arg1, max2):
    # starts/ends delimit runs of one gram id in the globally sorted arrays.
    for u in range(starts.shape[0]):
        m1 = 0
        a1 = -1
        m2 = 0
        for k in range(starts[u], ends[u]):
            c = counts[k]
            if c > m1:
                m2 = m1
                m1 = c
                a1 = owners[k]
            elif c > m2:
                m2 = c
        max1[u] = m1
        arg1[u] = a1
        max2[u] = m2


def _clipped_totals_impl(ugrams, ucounts, uoffsets, unique_grams, max1, arg1, max2, out):
    # Two-pointer merge of each comment's sorted unique grams against the
    # corpus-wide sorted unique grams.
    n_comments = uoffsets.shape[0] - 1
    for i in range(n_comments):
        lo = uoffsets[i]
        hi = uoffsets[i + 1]
        total = 0
        k = 0
        for j in range(lo, hi):
            g = ugrams[j]
            while k < unique_grams.shape[0] and unique_grams[k] < g:
                k += 1
            # every comment gram is present in the corpus-wide table
            ref = max1[k] if arg1[k] != i else max2[k]
            c = ucounts[j]
            total += c if c < ref else ref
        out[i] = total


if USE_NUMBA:
    lcs_length_core = njit(cache=True)(_lcs_length_impl)
    gram_group_stats_core = njit(cache=True)(_gram_group_stats_impl)
    clipped_totals_core = njit(cache=True)(_clipped_totals_impl)
else:
    lcs_length_core = _lcs_length_impl
    gram_group_stats_core = _gram_group_stats_impl
    clipped_totals_core = _clipped_totals_impl


def lcs_length(a: np.ndarray, b: np.ndarray) -> int:
    """LCS length of two int id sequences."""
    a = np.ascontiguousarray(a, dtype=np.int64)
    b = np.ascontiguousarray(b, dtype=np.int64)
    if a.shape[0] > b.shape[0]:
        a, b = b, a
    return int(lcs_length_core(a, b))


def gram_group_stats(
    gram_ids: np.ndarray, counts: np.ndarray, owners: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Per-unique-gram max/argmax/second-max counts across comments.

    Input rows are (gram id, count in comment, comment index), one row per
    (comment, unique gram).  Returns ``(unique_grams, max1, arg1, max2)``
    with ``unique_grams`` sorted; the best reference count of gram ``g``
    for candidate ``i`` is ``max1`` unless ``arg1 == i``, then ``max2``.
    """
    order = np.argsort(gram_ids, kind="stable")
    g = np.ascontiguousarray(gram_ids[order], dtype=np.int64)
    c = np.ascontiguousarray(counts[order], dtype=np.int64)
    o = np.ascontiguousarray(owners[order], dtype=np.int64)
    if g.shape[0] == 0:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty.copy(), empty.copy(), empty.copy()
    run_mask = np.empty(g.shape[0], dtype=bool)
    run_mask[0] = True
    np.not_equal(g[1:], g[:-1], out=run_mask[1:])
    starts = np.flatnonzero(run_mask).astype(np.int64)
    ends = np.append(starts[1:], g.shape[0]).astype(np.int64)
    n_unique = starts.shape[0]
    max1 = np.zeros(n_unique, dtype=np.int64)
    arg1 = np.zeros(n_unique, dtype=np.int64)
    max2 = np.zeros(n_unique, dtype=np.int64)
    gram_group_stats_core(starts, ends, c, o, max1, arg1, max2)
    return g[starts], max1, arg1, max2


def clipped_totals(
    ugrams: np.ndarray,
    ucounts: np.ndarray,
    uoffsets: np.ndarray,
    unique_grams: np.ndarray,
    max1: np.ndarray,
    arg1: np.ndarray,
    max2: np.ndarray,
) -> np.ndarray:
    """Per-comment clipped match totals against the rest of the corpus.

    ``ugrams``/``ucounts`` concatenate each comment's sorted unique grams,
    delimited by ``uoffsets`` (length n_comments + 1).
    """
    n_comments = uoffsets.shape[0] - 1
    out = np.zeros(n_comments, dtype=np.int64)
    clipped_totals_core(
        np.ascontiguousarray(ugrams, dtype=np.int64),
        np.ascontiguousarray(ucounts, dtype=np.int64),
        np.ascontiguousarray(uoffsets, dtype=np.int64),
        np.ascontiguousarray(unique_grams, dtype=np.int64),
        np.ascontiguousarray(max1, dtype=np.int64),
        np.ascontiguousarray(arg1, dtype=np.int64),
        np.ascontiguousarray(max2, dtype=np.int64),
        out,
    )
    return out
