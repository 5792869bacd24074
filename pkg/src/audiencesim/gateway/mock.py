"""Deterministic mock backends.

Every mock is a pure function of its inputs: the same bytes or text produce
byte-identical output on any machine, which is what makes the offline test
suite and the reproducible pipeline runs possible.  The exact output
contracts are frozen here and asserted in tests; downstream code may rely
on them.
"""

from __future__ import annotations

import hashlib

import numpy as np

from audiencesim.errors import InputError
from audiencesim.gateway.base import CallCounter, GatewayConfig, check_budget
from audiencesim.gateway.types import (
    ChatExchange,
    EmbeddingVector,
    MediaClip,
    TranscriptSegment,
)

# Tags the prompt builders embed so the mock chat backend can produce
# shape-correct completions for each caller.
TAG_SUMMARIZE = "[SUMMARIZE]"
TAG_COMMENT = "[COMMENT]"
TAG_RELEVANCE = "[RELEVANCE]"

_KEYWORD_POOL = (
    "travel", "cooking", "music", "gaming", "science", "history", "comedy",
    "sports", "nature", "technology", "art", "fitness", "education", "pets",
    "fashion", "finance",
)


def content_hash(data: bytes) -> str:
    """12-hex-digit content fingerprint used in all mock outputs."""
    return hashlib.sha256(data).hexdigest()[:12]


def _is_silent(data: bytes) -> bool:
    # The mock's notion of silence: no payload, or all-zero payload.
    return len(data) == 0 or not any(data)


class MockTranscriptionBackend:
    """Returns one segment spanning the clip: ``mock transcript <hash>``."""

    def __init__(self, config: GatewayConfig | None = None):
        self.config = config or GatewayConfig(model_name="mock-transcriber")
        self.calls = CallCounter()

    def transcribe(self, clip: MediaClip) -> list[TranscriptSegment]:
        self.calls.bump("transcribe")
        if _is_silent(clip.data):
            return []
        if clip.duration <= 0:
            raise InputError("clip with audio content must have duration > 0")
        text = f"mock transcript {content_hash(clip.data)}"
        return [TranscriptSegment(start=0.0, end=clip.duration, text=text)]


class MockCaptionBackend:
    """Caption contract: ``mock caption for panel <image-hash> with dialogue
    <first 8 words>``; empty dialogue renders as ``none``."""

    def __init__(self, config: GatewayConfig | None = None):
        self.config = config or GatewayConfig(model_name="mock-captioner")
        self.calls = CallCounter()

    def caption(self, image_png: bytes, dialogue: str, instruction: str) -> str:
        self.calls.bump("caption")
        if not image_png:
            raise InputError("caption requires an encoded image")
        if not instruction.strip():
            raise InputError("caption requires a nonempty instruction")
        words = dialogue.split()
        snippet = " ".join(words[:8]) if words else "none"
        return f"mock caption for panel {content_hash(image_png)} with dialogue {snippet}"


class MockChatBackend:
    """Scripted completions keyed by the tag in the last user message.

    - TAG_SUMMARIZE: a well-formed SUMMARY/KEYWORDS block whose keywords are
      drawn deterministically from a fixed pool using the prompt hash.
    - TAG_COMMENT: a short comment body derived from the prompt hash.
    - TAG_RELEVANCE: a bare integer in 0..100 derived from the prompt hash.
    - anything else: ``mock completion <hash>``.
    """

    def __init__(self, config: GatewayConfig | None = None):
        self.config = config or GatewayConfig(
            model_name="mock-chat", context_budget=200_000
        )
        self.calls = CallCounter()

    def complete(self, exchange: ChatExchange) -> str:
        check_budget(exchange, self.config)
        self.calls.bump("complete")
        rendered = exchange.rendered_text()
        digest = hashlib.sha256(rendered.encode("utf-8")).digest()
        h = digest.hex()[:12]
        last = exchange.last_user_content()

        if TAG_SUMMARIZE in last:
            picks = []
            for i in range(6):
                word = _KEYWORD_POOL[digest[i] % len(_KEYWORD_POOL)]
                if word not in picks:
                    picks.append(word)
            keywords = ["mock video", *picks]
            return (
                f"SUMMARY: Mock summary of video content {h}. "
                "The footage is described scene by scene and narrated throughout.\n"
                f"KEYWORDS: {', '.join(keywords)}"
            )
        if TAG_RELEVANCE in last:
            score = int.from_bytes(digest[:4], "big") % 101
            return str(score)
        if TAG_COMMENT in last:
            return (
                f"Mock comment {h}: really enjoyed this part of the video, "
                "it matches my interests."
            )
        return f"mock completion {h}"


class MockEmbeddingBackend:
    """Unit-norm vector from a PRNG seeded with the text's content hash.

    Same text always embeds to the identical vector; distinct texts land in
    effectively random directions of the unit sphere.
    """

    def __init__(self, config: GatewayConfig | None = None, dimension: int = 64):
        self.config = config or GatewayConfig(model_name="mock-embedding")
        self.dimension = dimension
        self.calls = CallCounter()

    def embed(self, text: str) -> EmbeddingVector:
        self.calls.bump("embed")
        if not text.strip():
            raise InputError("cannot embed empty text")
        digest = hashlib.sha256(text.encode("utf-8")).digest()
        seed = int.from_bytes(digest[:8], "big")
        rng = np.random.default_rng(seed)
        vec = rng.standard_normal(self.dimension)
        vec /= np.linalg.norm(vec)
        return EmbeddingVector(vec)
