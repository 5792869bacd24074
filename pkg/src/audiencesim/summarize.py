"""Video summarization: one chat call that turns the caption timeline and
transcript into a summary plus retrieval keywords.

The completion must come back as two delimited blocks (SUMMARY:, KEYWORDS:)
so keyword extraction is a parse, not a guess.  Over-budget prompts fail
loudly before any call; there is no truncation or chunked fallback.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from audiencesim.errors import CompletionParseError, InputError
from audiencesim.gateway.base import ChatBackend, check_budget
from audiencesim.gateway.mock import TAG_SUMMARIZE
from audiencesim.gateway.types import ChatExchange, ChatMessage, TranscriptSegment
from audiencesim.video.captioning import FrameCaption
from audiencesim.video.frames import VideoAsset

MAX_KEYWORDS = 15
MAX_KEYWORD_WORDS = 6

NO_NARRATION_MARKER = "(no narration)"

_SYSTEM_INSTRUCTION = (
    "You are a careful video analyst. You read a video's caption timeline "
    "and narration and produce a faithful summary plus search keywords."
)

_OUTPUT_INSTRUCTION = (
    "Write your answer as exactly two blocks.\n"
    "First a line starting with 'SUMMARY:' followed by a paragraph "
    "summarizing the whole video in chronological order.\n"
    "Then a line starting with 'KEYWORDS:' followed by 5 to 15 "
    "comma-separated lowercase keywords or short phrases (at most "
    f"{MAX_KEYWORD_WORDS} words each) that describe the video's topics."
)

_RETRY_INSTRUCTION = (
    "Your previous reply did not contain both required blocks. Reply again "
    "with exactly one 'SUMMARY:' block and one 'KEYWORDS:' block of 5 to 15 "
    "comma-separated keywords, and nothing else."
)

_COMPLETION_RE = re.compile(
    r"SUMMARY:\s*(?P<summary>.*?)\s*KEYWORDS:\s*(?P<keywords>.*)\s*\Z", re.DOTALL
)


@dataclass(frozen=True)
class VideoSummary:
    """A video's summary text plus its normalized retrieval keywords."""

    summary_text: str
    keywords: tuple[str, ...]
    source_video: str

    def __post_init__(self):
        if not self.summary_text.strip():
            raise InputError("summary_text must be nonempty")
        if not self.source_video.strip():
            raise InputError("source_video must be nonempty")
        if not 1 <= len(self.keywords) <= MAX_KEYWORDS:
            raise InputError(
                f"keyword count must be 1..{MAX_KEYWORDS}, got {len(self.keywords)}"
            )
        seen = set()
        for keyword in self.keywords:
            if not keyword.strip():
                raise InputError("keywords must be nonempty")
            if keyword != keyword.casefold():
                raise InputError(f"keyword not case-folded: {keyword!r}")
            if len(keyword.split()) > MAX_KEYWORD_WORDS:
                raise InputError(
                    f"keyword longer than {MAX_KEYWORD_WORDS} words: {keyword!r}"
                )
            if keyword in seen:
                raise InputError(f"duplicate keyword: {keyword!r}")
            seen.add(keyword)


def build_summary_prompt(
    captions: list[FrameCaption],
    transcript: list[TranscriptSegment],
    asset: VideoAsset,
    chat_config=None,
) -> ChatExchange:
    """Render the summarization prompt.

    Captions and transcript segments interleave by timestamp ascending; at
    an exact tie the caption comes first, since it sets the scene the
    dialogue happens in.  Passing the chat gateway config makes the token
    budget fail here, before any call is attempted.
    """
    if not captions:
        raise InputError("cannot summarize a video with no captions")

    events: list[tuple[float, int, str]] = []
    for caption in captions:
        events.append(
            (caption.timestamp, 0, f"[{caption.timestamp:g}s] Scene: {caption.text}")
        )
    for segment in transcript:
        events.append(
            (
                segment.start,
                1,
                f"[{segment.start:g}s-{segment.end:g}s] Narration: {segment.text}",
            )
        )
    events.sort(key=lambda e: (e[0], e[1]))

    lines = [
        TAG_SUMMARIZE,
        f"Title: {asset.title}",
        f"Author: {asset.author or '(unknown)'}",
        f"Description: {asset.description or '(none)'}",
        "",
        "Timeline:",
    ]
    lines.extend(text for _, _, text in events)
    if not transcript:
        lines.append(NO_NARRATION_MARKER)
    lines.extend(["", _OUTPUT_INSTRUCTION])

    exchange = ChatExchange(
        system_instruction=_SYSTEM_INSTRUCTION,
        messages=[ChatMessage(role="user", content="\n".join(lines))],
    )
    if chat_config is not None:
        check_budget(exchange, chat_config)
    return exchange


def summarize(prompt: ChatExchange, backend: ChatBackend, video_id: str) -> VideoSummary:
    """Run the summary call and parse the completion.

    A malformed completion gets one retry with a sterner instruction; a
    second failure raises with the raw completion attached for inspection.
    """
    check_budget(prompt, backend.config)
    raw = backend.complete(prompt)
    try:
        return parse_summary_completion(raw, video_id)
    except CompletionParseError:
        retry = ChatExchange(
            system_instruction=prompt.system_instruction,
            messages=[
                *prompt.messages,
                ChatMessage(role="assistant", content=raw or "(empty)"),
                ChatMessage(role="user", content=_RETRY_INSTRUCTION),
            ],
            temperature=prompt.temperature,
        )
        raw_retry = backend.complete(retry)
        return parse_summary_completion(raw_retry, video_id)


def parse_summary_completion(raw: str, video_id: str) -> VideoSummary:
    """Split a completion into its SUMMARY and KEYWORDS blocks."""
    match = _COMPLETION_RE.search(raw)
    if match is None:
        raise CompletionParseError(
            "completion is missing the SUMMARY/KEYWORDS blocks", raw_completion=raw
        )
    summary_text = match.group("summary").strip()
    if not summary_text:
        raise CompletionParseError(
            "completion has an empty SUMMARY block", raw_completion=raw
        )
    keywords = normalize_keywords(match.group("keywords").split(","))
    if not keywords:
        raise CompletionParseError(
            "completion has no usable keywords", raw_completion=raw
        )
    return VideoSummary(
        summary_text=summary_text, keywords=tuple(keywords), source_video=video_id
    )


def render_summary_completion(summary: VideoSummary) -> str:
    """Inverse of the parser, used for round-trip tests and fixtures."""
    return (
        f"SUMMARY: {summary.summary_text}\nKEYWORDS: {', '.join(summary.keywords)}"
    )


def normalize_keywords(raw_keywords: list[str]) -> list[str]:
    """Trim, case-fold, collapse whitespace, dedupe in order, drop phrases
    over the word limit, clamp to the maximum count."""
    normalized = []
    seen = set()
    for raw in raw_keywords:
        keyword = " ".join(raw.split()).casefold()
        if not keyword or len(keyword.split()) > MAX_KEYWORD_WORDS:
            continue
        if keyword in seen:
            continue
        seen.add(keyword)
        normalized.append(keyword)
        if len(normalized) == MAX_KEYWORDS:
            break
    return normalized


def summary_to_record(summary: VideoSummary, model_name: str, created_at: str) -> dict:
    """Persisted artifact shape for a video summary."""
    return {
        "summary_text": summary.summary_text,
        "keywords": list(summary.keywords),
        "model_name": model_name,
        "created_at": created_at,
    }


def summary_from_record(record: dict, video_id: str) -> VideoSummary:
    return VideoSummary(
        summary_text=record["summary_text"],
        keywords=tuple(record["keywords"]),
        source_video=video_id,
    )
