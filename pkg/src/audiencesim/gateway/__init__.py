"""Model gateways: transcription, captioning, chat completion, embedding.

Each modality is a small protocol with a deterministic mock backend and an
HTTP remote backend, so the rest of the toolkit runs offline in tests.
"""

from audiencesim.gateway.base import (
    CaptionBackend,
    ChatBackend,
    EmbeddingBackend,
    GatewayConfig,
    TranscriptionBackend,
    check_budget,
    estimate_tokens,
)
from audiencesim.gateway.factory import build_backend
from audiencesim.gateway.mock import (
    MockCaptionBackend,
    MockChatBackend,
    MockEmbeddingBackend,
    MockTranscriptionBackend,
)
from audiencesim.gateway.types import (
    ChatExchange,
    ChatMessage,
    EmbeddingVector,
    MediaClip,
    TranscriptSegment,
    normalize_segments,
)

__all__ = [
    "CaptionBackend",
    "ChatBackend",
    "ChatExchange",
    "ChatMessage",
    "EmbeddingBackend",
    "EmbeddingVector",
    "GatewayConfig",
    "MediaClip",
    "MockCaptionBackend",
    "MockChatBackend",
    "MockEmbeddingBackend",
    "MockTranscriptionBackend",
    "TranscriptSegment",
    "TranscriptionBackend",
    "build_backend",
    "check_budget",
    "estimate_tokens",
    "normalize_segments",
]
