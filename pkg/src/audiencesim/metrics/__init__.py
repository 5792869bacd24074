"""Evaluation metrics for comment corpora.

Diversity: distinct n-grams, self-BLEU, intra-group embedding score.
Relevance: ROUGE-1/2/L precision vs. a reference summary, embedding
relevance, and a judge-model 0-100 rating.
"""

from audiencesim.metrics.diversity import distinct_ngrams, self_bleu
from audiencesim.metrics.embedscore import (
    embedding_group_score,
    embedding_relevance,
    greedy_match_f1,
)
from audiencesim.metrics.evaluate import (
    CommentCorpus,
    MetricReport,
    evaluate,
    load_corpus_file,
    report_to_csv,
    report_to_json,
    wilcoxon_bonferroni,
)
from audiencesim.metrics.relevance import (
    llm_relevance,
    rouge_l_precision,
    rouge_n_precision,
)
from audiencesim.metrics.textnorm import tokenize

__all__ = [
    "CommentCorpus",
    "MetricReport",
    "distinct_ngrams",
    "embedding_group_score",
    "embedding_relevance",
    "evaluate",
    "greedy_match_f1",
    "llm_relevance",
    "load_corpus_file",
    "report_to_csv",
    "report_to_json",
    "rouge_l_precision",
    "rouge_n_precision",
    "self_bleu",
    "tokenize",
    "wilcoxon_bonferroni",
]
