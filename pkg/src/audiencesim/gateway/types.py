"""Wire-level value types shared by all gateway backends."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from audiencesim.errors import InputError


@dataclass(frozen=True)
class MediaClip:
    """An encoded media payload plus the duration the caller knows for it."""

    data: bytes
    duration: float

    def __post_init__(self):
        if self.duration < 0:
            raise InputError(f"clip duration must be >= 0, got {self.duration}")


@dataclass(frozen=True)
class TranscriptSegment:
    """One timed span of transcribed speech."""

    start: float
    end: float
    text: str

    def __post_init__(self):
        if self.start < 0:
            raise InputError(f"segment start must be >= 0, got {self.start}")
        if not self.start < self.end:
            raise InputError(
                f"segment start must precede end, got ({self.start}, {self.end})"
            )
        if not self.text.strip():
            raise InputError("segment text must be nonempty")


def normalize_segments(segments: list[TranscriptSegment]) -> list[TranscriptSegment]:
    """Sort segments by start time and reject overlapping spans.

    Backends may return segments in any order; callers always see a sorted,
    non-overlapping transcript or an InputError naming the offending pair.
    """
    ordered = sorted(segments, key=lambda s: (s.start, s.end))
    for prev, cur in zip(ordered, ordered[1:]):
        if cur.start < prev.end:
            raise InputError(
                f"transcript segments overlap: ({prev.start}, {prev.end}) "
                f"and ({cur.start}, {cur.end})"
            )
    return ordered


class EmbeddingVector:
    """A fixed-dimension embedding; values are finite float64."""

    __slots__ = ("values", "dimension")

    def __init__(self, values):
        arr = np.asarray(values, dtype=np.float64)
        if arr.ndim != 1:
            raise InputError(f"embedding must be 1-D, got shape {arr.shape}")
        if arr.size == 0:
            raise InputError("embedding must be nonempty")
        if not np.all(np.isfinite(arr)):
            raise InputError("embedding contains non-finite values")
        self.values = arr
        self.dimension = int(arr.size)

    def tolist(self) -> list[float]:
        return self.values.tolist()

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, EmbeddingVector)
            and self.dimension == other.dimension
            and bool(np.array_equal(self.values, other.values))
        )

    def __repr__(self) -> str:
        return f"EmbeddingVector(dim={self.dimension})"


@dataclass(frozen=True)
class ChatMessage:
    role: str  # "user" | "assistant"
    content: str


@dataclass
class ChatExchange:
    """A chat prompt: system instruction plus alternating user/assistant turns."""

    system_instruction: str
    messages: list[ChatMessage] = field(default_factory=list)
    temperature: float = 0.0

    def __post_init__(self):
        if not self.messages:
            raise InputError("chat exchange needs at least one message")
        if not 0.0 <= self.temperature <= 2.0:
            raise InputError(f"temperature must be in [0, 2], got {self.temperature}")
        for i, msg in enumerate(self.messages):
            expected = "user" if i % 2 == 0 else "assistant"
            if msg.role != expected:
                raise InputError(
                    f"message {i} must have role '{expected}', got '{msg.role}'"
                )

    def rendered_text(self) -> str:
        """Full prompt text as the token estimator sees it."""
        parts = [self.system_instruction]
        parts.extend(m.content for m in self.messages)
        return "\n".join(parts)

    def last_user_content(self) -> str:
        for msg in reversed(self.messages):
            if msg.role == "user":
                return msg.content
        return ""


def cosine_similarity(a: EmbeddingVector, b: EmbeddingVector) -> float:
    """Cosine similarity of two embeddings, clamped to [-1, 1].

    Raises InputError on dimension mismatch or a zero vector.
    """
    if a.dimension != b.dimension:
        raise InputError(
            f"dimension mismatch: {a.dimension} vs {b.dimension}"
        )
    na = float(np.linalg.norm(a.values))
    nb = float(np.linalg.norm(b.values))
    if na == 0.0 or nb == 0.0:
        raise InputError("cosine similarity undefined for a zero vector")
    value = float(np.dot(a.values, b.values) / (na * nb))
    if math.isnan(value):
        raise InputError("cosine similarity produced NaN")
    return max(-1.0, min(1.0, value))
