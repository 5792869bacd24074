"""Prompt templates for the four comment kinds.

Every prompt carries, in order: the role instruction, the few-shot example
comments, the persona block (omitted in ablation mode), the video metadata,
the summary, and the keywords.  The ordering is load-bearing: tests
snapshot it, and the deterministic mock derives bodies from the rendered
text, so any template change shows up as a fixture diff.
"""

from __future__ import annotations

from audiencesim.comments.model import Comment
from audiencesim.errors import InputError
from audiencesim.gateway.mock import TAG_COMMENT
from audiencesim.gateway.types import ChatExchange, ChatMessage
from audiencesim.personas import Persona
from audiencesim.summarize import VideoSummary
from audiencesim.video.frames import VideoAsset

ROLE_INSTRUCTION = (
    "You write YouTube-style viewer comments. Match how real viewers write: "
    "casual tone, first person, concrete reactions to moments in the video, "
    "sometimes a question or a light joke. One comment only, no hashtags, "
    "no emoji spam, no quotation marks around the comment."
)

# Genre-neutral starter examples; deployments can swap in real comments.
DEFAULT_FEWSHOT: tuple[str, ...] = (
    "I was not expecting that ending, had to rewatch the last minute twice.",
    "The part at the halfway mark genuinely made my day, thank you for this.",
    "Been following since the early uploads and the quality keeps going up.",
    "Can you do a follow-up on the thing you mentioned near the start?",
    "Watching this on my lunch break and now I want to try it myself.",
    "My whole family ended up watching this together, instant favorite.",
)


def build_primary_prompt(
    summary: VideoSummary,
    asset: VideoAsset,
    persona: Persona | None,
    fewshot: tuple[str, ...] = DEFAULT_FEWSHOT,
) -> ChatExchange:
    """Prompt for a fresh root-level comment.

    ``persona=None`` is the ablation mode: the persona block is left out
    entirely and the comment reacts to the video alone.
    """
    lines = _common_block(summary, asset, persona, fewshot)
    lines.append(
        "Write one new top-level comment reacting to this video. "
        "Reply with the comment text only."
    )
    return _exchange(lines)


def build_thread_prompt(
    parent: Comment,
    summary: VideoSummary,
    asset: VideoAsset,
    persona: Persona | None,
    fewshot: tuple[str, ...] = DEFAULT_FEWSHOT,
) -> ChatExchange:
    """Prompt for a comment that continues an existing top-level thread."""
    lines = _common_block(summary, asset, persona, fewshot)
    lines.extend(
        [
            "You are replying under this existing comment by "
            f"{parent.author_name}:",
            parent.body,
            "",
            "Write one reply that continues the thread naturally. "
            "Reply with the comment text only.",
        ]
    )
    return _exchange(lines)


def build_reply_prompt(
    replied: Comment,
    user_reply_text: str,
    summary: VideoSummary,
    asset: VideoAsset,
    persona: Persona | None,
    fewshot: tuple[str, ...] = DEFAULT_FEWSHOT,
) -> ChatExchange:
    """Prompt for responding after the video's creator replied in a thread.

    Includes both the original comment and the creator's reply, and keeps
    the original commenter's persona so the voice stays consistent.
    """
    lines = _common_block(summary, asset, persona, fewshot)
    lines.extend(
        [
            f"Earlier you commented: {replied.body}",
            f"The video's creator replied to you: {user_reply_text}",
            "",
            "Write one response continuing the conversation in the same "
            "voice. Reply with the comment text only.",
        ]
    )
    return _exchange(lines)


def build_custom_prompt(
    summary: VideoSummary,
    asset: VideoAsset,
    persona: Persona,
    fewshot: tuple[str, ...] = DEFAULT_FEWSHOT,
) -> ChatExchange:
    """Prompt for a comment from a user-specified persona; same shape as a
    primary comment, persona mandatory."""
    return build_primary_prompt(summary, asset, persona, fewshot)


def _common_block(
    summary: VideoSummary,
    asset: VideoAsset,
    persona: Persona | None,
    fewshot: tuple[str, ...],
) -> list[str]:
    if not fewshot:
        raise InputError("fewshot example list must be nonempty")
    # The role instruction rides in the system slot; rendered_text() places
    # it ahead of these lines, preserving the documented prompt order.
    lines = [TAG_COMMENT, "Example comments:"]
    lines.extend(f"- {example}" for example in fewshot)
    lines.append("")
    if persona is not None:
        lines.extend(["You are this person:", persona.text, ""])
    lines.extend(
        [
            f"Video title: {asset.title}",
            f"Channel author: {asset.author or '(unknown)'}",
            f"Video description: {asset.description or '(none)'}",
            f"Thumbnail: {'provided with the upload' if asset.thumbnail else '(none)'}",
            "",
            "Video summary:",
            summary.summary_text,
            "",
            f"Video keywords: {', '.join(summary.keywords)}",
            "",
        ]
    )
    return lines


def _exchange(lines: list[str]) -> ChatExchange:
    return ChatExchange(
        system_instruction=ROLE_INSTRUCTION,
        messages=[ChatMessage(role="user", content="\n".join(lines))],
    )
