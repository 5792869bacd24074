"""Backend protocols, gateway configuration, and the prompt budget guard."""

from __future__ import annotations

import os
import re
from dataclasses import dataclass, field
from typing import Protocol, runtime_checkable

from audiencesim.errors import BudgetError, InputError
from audiencesim.gateway.types import (
    ChatExchange,
    EmbeddingVector,
    MediaClip,
    TranscriptSegment,
)

BACKEND_KINDS = ("remote", "mock")

# Environment-variable names are the only credential reference we accept; a
# pasted secret would not match and gets rejected up front.
_ENV_NAME_RE = re.compile(r"^[A-Z][A-Z0-9_]*$")


@dataclass
class GatewayConfig:
    """Configuration for one model backend.

    ``api_key_ref`` names the environment variable holding the credential;
    the secret itself never lives in config or logs.  ``context_budget``
    applies to chat backends only.
    """

    backend_kind: str = "mock"
    model_name: str = "mock"
    endpoint_url: str = ""
    api_key_ref: str = ""
    timeout: float = 60.0
    max_retries: int = 2
    context_budget: int | None = None

    def __post_init__(self):
        if self.backend_kind not in BACKEND_KINDS:
            raise InputError(
                f"backend_kind must be one of {BACKEND_KINDS}, got {self.backend_kind!r}"
            )
        if self.timeout <= 0:
            raise InputError(f"timeout must be > 0, got {self.timeout}")
        if self.max_retries < 0:
            raise InputError(f"max_retries must be >= 0, got {self.max_retries}")
        if self.context_budget is not None and self.context_budget <= 0:
            raise InputError(
                f"context_budget must be > 0, got {self.context_budget}"
            )
        if self.api_key_ref and not _ENV_NAME_RE.match(self.api_key_ref):
            raise InputError(
                "api_key_ref must be an environment variable name "
                f"(got {self.api_key_ref!r}); never put the secret itself in config"
            )
        if self.backend_kind == "remote" and not self.endpoint_url:
            raise InputError("remote backends require endpoint_url")

    def resolve_api_key(self) -> str:
        if not self.api_key_ref:
            return ""
        return os.environ.get(self.api_key_ref, "")


def estimate_tokens(text: str) -> int:
    """Heuristic token count: ceil(len / 4).

    Monotone in text length, so estimate(a + b) >= estimate(a) always holds.
    Backends that report exact counts may override this at the call site.
    """
    return (len(text) + 3) // 4


def check_budget(exchange: ChatExchange, config: GatewayConfig) -> None:
    """Raise BudgetError before any model call if the prompt will not fit."""
    if config.context_budget is None:
        return
    estimated = estimate_tokens(exchange.rendered_text())
    if estimated > config.context_budget:
        raise BudgetError(estimated=estimated, budget=config.context_budget)


@dataclass
class CallRecord:
    """One attempt against a backend, kept for observability."""

    op: str
    attempt: int
    status: str  # "ok" | "retry" | "error"
    detail: str = ""


@runtime_checkable
class TranscriptionBackend(Protocol):
    config: GatewayConfig

    def transcribe(self, clip: MediaClip) -> list[TranscriptSegment]:
        """Transcribe speech; empty list for silent audio."""
        ...


@runtime_checkable
class CaptionBackend(Protocol):
    config: GatewayConfig

    def caption(self, image_png: bytes, dialogue: str, instruction: str) -> str:
        """Describe one encoded image given aligned dialogue text."""
        ...


@runtime_checkable
class ChatBackend(Protocol):
    config: GatewayConfig

    def complete(self, exchange: ChatExchange) -> str:
        """Run a chat completion; enforces the context budget first."""
        ...


@runtime_checkable
class EmbeddingBackend(Protocol):
    config: GatewayConfig
    dimension: int

    def embed(self, text: str) -> EmbeddingVector:
        """Embed nonempty text into the backend's fixed dimension."""
        ...


class CallCounter:
    """Per-operation call counts; mocks expose one so tests can assert
    which pipeline stages actually ran."""

    def __init__(self):
        self.counts: dict[str, int] = {}

    def bump(self, op: str) -> None:
        self.counts[op] = self.counts.get(op, 0) + 1

    def get(self, op: str) -> int:
        return self.counts.get(op, 0)

    def reset(self) -> None:
        self.counts.clear()
