"""Relevance of comments to the video summary: ROUGE precision and an
LLM judge score."""

from __future__ import annotations

import re
from collections import Counter

import numpy as np

from audiencesim.errors import CompletionParseError, InputError
from audiencesim.gateway.base import ChatBackend
from audiencesim.gateway.mock import TAG_RELEVANCE
from audiencesim.gateway.types import ChatExchange, ChatMessage
from audiencesim.metrics import kernels
from audiencesim.metrics.textnorm import ngrams, tokenize

_BARE_INT_RE = re.compile(r"\d{1,3}")

JUDGE_SYSTEM_INSTRUCTION = (
    "You are a strict grader. You score how relevant a viewer comment is to "
    "a video, given the video's summary."
)

_JUDGE_PROMPT = (
    f"{TAG_RELEVANCE}\n"
    "Rate the relevance of the comment to the video summarized below on a "
    "scale from 0 to 100, where a higher score indicates greater relevance.\n"
    "Reply with a single integer and nothing else.\n"
    "\n"
    "Video summary:\n{summary}\n"
    "\n"
    "Comment:\n{comment}"
)

_JUDGE_RETRY = (
    "That reply was not a bare integer. Reply with only one integer between "
    "0 and 100, with no other words or punctuation."
)


def rouge_n_precision(comment: str, reference_summary: str, n: int) -> float:
    """Clipped n-gram overlap with the summary, divided by the comment's
    n-gram count.

    Precision orientation: the share of the comment's n-grams that also
    appear in the summary.  A comment with fewer than ``n`` tokens scores 0.
    """
    if n not in (1, 2):
        raise InputError(f"ROUGE-N order must be 1 or 2, got {n}")
    comment_grams = ngrams(tokenize(comment), n)
    if not comment_grams:
        return 0.0
    summary_counts = Counter(ngrams(tokenize(reference_summary), n))
    comment_counts = Counter(comment_grams)
    clipped = sum(
        min(count, summary_counts[gram]) for gram, count in comment_counts.items()
    )
    return clipped / len(comment_grams)


def rouge_l_precision(comment: str, reference_summary: str) -> float:
    """Longest common subsequence with the summary, divided by comment length."""
    comment_tokens = tokenize(comment)
    if not comment_tokens:
        return 0.0
    summary_tokens = tokenize(reference_summary)
    if not summary_tokens:
        return 0.0
    vocab: dict[str, int] = {}
    a = np.fromiter(
        (vocab.setdefault(t, len(vocab)) for t in comment_tokens),
        dtype=np.int64,
        count=len(comment_tokens),
    )
    b = np.fromiter(
        (vocab.setdefault(t, len(vocab)) for t in summary_tokens),
        dtype=np.int64,
        count=len(summary_tokens),
    )
    return kernels.lcs_length(a, b) / len(comment_tokens)


def llm_relevance(comment: str, summary_text: str, judge: ChatBackend) -> int:
    """Ask a chat backend to grade comment relevance as an integer 0..100.

    One retry with a sterner instruction if the reply is not a bare in-range
    integer; a second failure raises with the raw completion attached.
    """
    if not comment.strip():
        raise InputError("comment must be nonempty")
    if not summary_text.strip():
        raise InputError("summary text must be nonempty")
    prompt = _JUDGE_PROMPT.format(summary=summary_text, comment=comment)
    exchange = ChatExchange(
        system_instruction=JUDGE_SYSTEM_INSTRUCTION,
        messages=[ChatMessage(role="user", content=prompt)],
    )
    reply = judge.complete(exchange)
    score = _parse_score(reply)
    if score is not None:
        return score

    retry_exchange = ChatExchange(
        system_instruction=JUDGE_SYSTEM_INSTRUCTION,
        messages=[
            ChatMessage(role="user", content=prompt),
            ChatMessage(role="assistant", content=reply or "(empty)"),
            ChatMessage(role="user", content=_JUDGE_RETRY),
        ],
    )
    retry_reply = judge.complete(retry_exchange)
    score = _parse_score(retry_reply)
    if score is not None:
        return score
    raise CompletionParseError(
        "judge did not return an integer in 0..100 after one retry",
        raw_completion=retry_reply,
    )


def _parse_score(reply: str) -> int | None:
    match = _BARE_INT_RE.fullmatch(reply.strip())
    if match is None:
        return None
    value = int(match.group())
    if 0 <= value <= 100:
        return value
    return None
