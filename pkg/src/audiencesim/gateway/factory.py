"""Build a backend instance from a GatewayConfig."""

from __future__ import annotations

from audiencesim.errors import InputError
from audiencesim.gateway.base import GatewayConfig
from audiencesim.gateway.mock import (
    MockCaptionBackend,
    MockChatBackend,
    MockEmbeddingBackend,
    MockTranscriptionBackend,
)
from audiencesim.gateway.remote import (
    RemoteCaptionBackend,
    RemoteChatBackend,
    RemoteEmbeddingBackend,
    RemoteTranscriptionBackend,
)

MODALITIES = ("transcription", "caption", "chat", "embedding")

_MOCKS = {
    "transcription": MockTranscriptionBackend,
    "caption": MockCaptionBackend,
    "chat": MockChatBackend,
    "embedding": MockEmbeddingBackend,
}
_REMOTES = {
    "transcription": RemoteTranscriptionBackend,
    "caption": RemoteCaptionBackend,
    "chat": RemoteChatBackend,
    "embedding": RemoteEmbeddingBackend,
}


def build_backend(modality: str, config: GatewayConfig):
    if modality not in MODALITIES:
        raise InputError(f"unknown modality {modality!r}, expected one of {MODALITIES}")
    if modality == "chat" and config.context_budget is None:
        raise InputError("chat backends require a context_budget")
    table = _MOCKS if config.backend_kind == "mock" else _REMOTES
    return table[modality](config)
