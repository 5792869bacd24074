"""Corpus-level evaluation: runs the full metric battery and renders reports.

A report row records the corpus, the metric, its value, the sample size it
was computed over, and every parameter needed to reproduce it (n-gram order,
subsample size, model identities).
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy import stats

from audiencesim.errors import InputError
from audiencesim.gateway.base import ChatBackend, EmbeddingBackend
from audiencesim.metrics.diversity import distinct_ngrams, self_bleu
from audiencesim.metrics.embedscore import (
    DEFAULT_PAIR_LIMIT,
    embedding_group_score,
    embedding_relevance,
    group_pair_count,
)
from audiencesim.metrics.relevance import (
    llm_relevance,
    rouge_l_precision,
    rouge_n_precision,
)


@dataclass(frozen=True)
class CommentCorpus:
    """A labeled group of comment bodies to evaluate as one condition."""

    label: str
    comments: tuple[str, ...]

    def __init__(self, label: str, comments: Sequence[str]):
        if not label.strip():
            raise InputError("corpus label must be nonempty")
        bodies = tuple(comments)
        if not bodies:
            raise InputError(f"corpus '{label}' has no comments")
        for i, body in enumerate(bodies):
            if not body.strip():
                raise InputError(f"corpus '{label}' comment {i + 1} is empty")
        object.__setattr__(self, "label", label)
        object.__setattr__(self, "comments", bodies)

    def __len__(self) -> int:
        return len(self.comments)


@dataclass
class MetricReport:
    """One metric value for one corpus, with reproduction parameters."""

    corpus_label: str
    metric_name: str
    value: float
    normalized_value: float | None = None
    sample_size: int = 1
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.sample_size < 1:
            raise InputError("sample_size must be >= 1")

    def to_dict(self) -> dict:
        return {
            "corpus_label": self.corpus_label,
            "metric_name": self.metric_name,
            "value": self.value,
            "normalized_value": self.normalized_value,
            "sample_size": self.sample_size,
            "params": self.params,
        }


def evaluate(
    corpora: Sequence[CommentCorpus],
    summary_text: str | None,
    embed_backend: EmbeddingBackend,
    judges: Sequence[ChatBackend] = (),
    *,
    distinct_orders: Sequence[int] = (1, 2, 3, 4),
    bleu_max_n: int = 4,
    seed: int = 0,
    max_pairs: int = DEFAULT_PAIR_LIMIT,
    equalize: bool = True,
) -> list[MetricReport]:
    """Full metric battery per corpus.

    With ``equalize`` and several corpora, self-BLEU is additionally scored
    on seeded subsamples of the smallest corpus size, so groups of different
    sizes are compared on equal footing.  Without a summary only the
    diversity metrics run; the relevance block needs a reference.
    """
    if not corpora:
        raise InputError("need at least one corpus")
    if summary_text is not None and not summary_text.strip():
        raise InputError("summary text must be nonempty")
    embed_model = embed_backend.config.model_name
    equalized_size = min(len(c) for c in corpora)

    reports: list[MetricReport] = []
    for corpus in corpora:
        bodies = list(corpus.comments)
        n_comments = len(bodies)

        reports.append(
            MetricReport(
                corpus_label=corpus.label,
                metric_name="avg_char_length",
                value=float(np.mean([len(b) for b in bodies])),
                sample_size=n_comments,
                params={"unit": "characters"},
            )
        )

        for order in distinct_orders:
            count, ratio = distinct_ngrams(bodies, order)
            reports.append(
                MetricReport(
                    corpus_label=corpus.label,
                    metric_name=f"distinct_{order}",
                    value=count,
                    normalized_value=ratio,
                    sample_size=n_comments,
                    params={"n": order},
                )
            )

        reports.append(
            MetricReport(
                corpus_label=corpus.label,
                metric_name="self_bleu",
                value=self_bleu(bodies, max_n=bleu_max_n, seed=seed),
                sample_size=n_comments,
                params={"max_n": bleu_max_n, "subsample": None, "seed": seed},
            )
        )
        if equalize:
            reports.append(
                MetricReport(
                    corpus_label=corpus.label,
                    metric_name="self_bleu_equalized",
                    value=self_bleu(
                        bodies, max_n=bleu_max_n, subsample=equalized_size, seed=seed
                    ),
                    sample_size=min(equalized_size, n_comments),
                    params={
                        "max_n": bleu_max_n,
                        "subsample": equalized_size,
                        "seed": seed,
                    },
                )
            )

        reports.append(
            MetricReport(
                corpus_label=corpus.label,
                metric_name="embedding_group_score",
                value=embedding_group_score(
                    bodies, embed_backend, max_pairs=max_pairs, seed=seed
                ),
                sample_size=group_pair_count(n_comments, max_pairs),
                params={
                    "max_pairs": max_pairs,
                    "seed": seed,
                    "embed_model": embed_model,
                },
            )
        )

        if summary_text is None:
            continue

        for order in (1, 2):
            reports.append(
                MetricReport(
                    corpus_label=corpus.label,
                    metric_name=f"rouge_{order}",
                    value=float(
                        np.mean(
                            [rouge_n_precision(b, summary_text, order) for b in bodies]
                        )
                    ),
                    sample_size=n_comments,
                    params={"n": order},
                )
            )
        reports.append(
            MetricReport(
                corpus_label=corpus.label,
                metric_name="rouge_l",
                value=float(
                    np.mean([rouge_l_precision(b, summary_text) for b in bodies])
                ),
                sample_size=n_comments,
                params={},
            )
        )

        reports.append(
            MetricReport(
                corpus_label=corpus.label,
                metric_name="embedding_relevance",
                value=embedding_relevance(bodies, summary_text, embed_backend),
                sample_size=n_comments,
                params={"embed_model": embed_model},
            )
        )

        for judge in judges:
            reports.append(
                MetricReport(
                    corpus_label=corpus.label,
                    metric_name="llm_relevance",
                    value=float(
                        np.mean([llm_relevance(b, summary_text, judge) for b in bodies])
                    ),
                    sample_size=n_comments,
                    params={"judge_model": judge.config.model_name},
                )
            )
    return reports


def load_corpus_file(path: str | Path, label: str) -> CommentCorpus:
    """Read a corpus file: one comment per line, or JSON lines with a body
    field.  Blank lines are skipped; the format is detected from the first
    nonblank line."""
    path = Path(path)
    if not path.is_file():
        raise InputError(f"corpus file not found: {path}")
    lines = path.read_text(encoding="utf-8").splitlines()
    numbered = [(i + 1, line) for i, line in enumerate(lines) if line.strip()]
    if not numbered:
        raise InputError(f"corpus file is empty: {path}")

    jsonl = numbered[0][1].lstrip().startswith("{")
    bodies: list[str] = []
    for lineno, line in numbered:
        if jsonl:
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise InputError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
            if not isinstance(record, dict) or "body" not in record:
                raise InputError(f"{path}:{lineno}: expected an object with a body key")
            body = record["body"]
            if not isinstance(body, str) or not body.strip():
                raise InputError(f"{path}:{lineno}: body must be a nonempty string")
            bodies.append(body)
        else:
            bodies.append(line)
    return CommentCorpus(label=label, comments=bodies)


def report_to_json(reports: Sequence[MetricReport]) -> str:
    """Render reports as a JSON array, stable for byte comparison."""
    return json.dumps(
        [r.to_dict() for r in reports], indent=2, sort_keys=True, ensure_ascii=False
    )


def report_to_csv(reports: Sequence[MetricReport]) -> str:
    """Render reports as CSV; the params map is JSON-encoded in one column."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(
        ["corpus_label", "metric_name", "value", "normalized_value", "sample_size", "params"]
    )
    for r in reports:
        writer.writerow(
            [
                r.corpus_label,
                r.metric_name,
                repr(r.value),
                "" if r.normalized_value is None else repr(r.normalized_value),
                r.sample_size,
                json.dumps(r.params, sort_keys=True),
            ]
        )
    return buffer.getvalue()


def wilcoxon_bonferroni(
    score_columns: dict[str, Sequence[float]], alpha: float = 0.05
) -> list[dict]:
    """Paired signed-rank tests over every pair of score columns, with the
    significance threshold divided by the number of comparisons.

    Columns must be paired: equal lengths, same underlying items.  A pair
    whose scores are identical everywhere gets statistic 0 and p-value 1.
    """
    if len(score_columns) < 2:
        raise InputError("need at least two score columns to compare")
    if not 0.0 < alpha < 1.0:
        raise InputError(f"alpha must be in (0, 1), got {alpha}")
    labels = list(score_columns)
    length = len(score_columns[labels[0]])
    if length < 1:
        raise InputError("score columns must be nonempty")
    for label in labels:
        if len(score_columns[label]) != length:
            raise InputError(
                f"score columns are not paired: '{label}' has "
                f"{len(score_columns[label])} entries, expected {length}"
            )

    pairs = list(combinations(labels, 2))
    corrected_alpha = alpha / len(pairs)
    results = []
    for a_label, b_label in pairs:
        a = np.asarray(score_columns[a_label], dtype=np.float64)
        b = np.asarray(score_columns[b_label], dtype=np.float64)
        if np.all(a == b):
            statistic, p_value = 0.0, 1.0
        else:
            outcome = stats.wilcoxon(a, b)
            statistic, p_value = float(outcome.statistic), float(outcome.pvalue)
        results.append(
            {
                "pair": (a_label, b_label),
                "statistic": statistic,
                "p_value": p_value,
                "corrected_alpha": corrected_alpha,
                "significant": p_value < corrected_alpha,
            }
        )
    return results
