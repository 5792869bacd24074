"""HTTP remote backends.

All four modalities speak UTF-8 JSON with bearer-token auth; the payload
schemas live in docs/gateways.md.  Transient failures (connection errors,
429, 5xx) are retried up to ``max_retries`` times with exponential backoff;
every attempt lands in ``call_log`` so tests and operators can count them.
Credentials are resolved from the environment at call time and never appear
in logs or error text.
"""

from __future__ import annotations

import base64
import logging
import time

import httpx

from audiencesim.errors import InputError, TransportError
from audiencesim.gateway.base import (
    CallRecord,
    GatewayConfig,
    check_budget,
)
from audiencesim.gateway.types import (
    ChatExchange,
    EmbeddingVector,
    MediaClip,
    TranscriptSegment,
    normalize_segments,
)

logger = logging.getLogger(__name__)

_RETRYABLE_STATUS = {429, 500, 502, 503, 504}
_BACKOFF_BASE = 0.5


class _RemoteBase:
    def __init__(self, config: GatewayConfig, client: httpx.Client | None = None):
        if config.backend_kind != "remote":
            raise InputError("remote backend requires backend_kind 'remote'")
        self.config = config
        self.call_log: list[CallRecord] = []
        self._client = client or httpx.Client(timeout=config.timeout)
        self._sleep = time.sleep  # injectable for tests

    def _headers(self) -> dict[str, str]:
        headers = {"Accept": "application/json"}
        key = self.config.resolve_api_key()
        if key:
            headers["Authorization"] = f"Bearer {key}"
        return headers

    def _post(self, op: str, path: str, **kwargs) -> httpx.Response:
        url = self.config.endpoint_url.rstrip("/") + path
        attempts = self.config.max_retries + 1
        for attempt in range(attempts):
            try:
                response = self._client.post(url, headers=self._headers(), **kwargs)
            except httpx.HTTPError as exc:
                self.call_log.append(
                    CallRecord(op, attempt, "retry", type(exc).__name__)
                )
                if attempt + 1 == attempts:
                    raise TransportError(
                        f"{op}: backend unreachable after {attempts} attempts "
                        f"({type(exc).__name__})"
                    ) from None
            else:
                if response.status_code in _RETRYABLE_STATUS:
                    self.call_log.append(
                        CallRecord(op, attempt, "retry", f"HTTP {response.status_code}")
                    )
                    if attempt + 1 == attempts:
                        raise TransportError(
                            f"{op}: backend kept failing with HTTP "
                            f"{response.status_code} after {attempts} attempts"
                        )
                elif response.status_code >= 400:
                    self.call_log.append(
                        CallRecord(op, attempt, "error", f"HTTP {response.status_code}")
                    )
                    raise InputError(
                        f"{op}: backend rejected the request "
                        f"(HTTP {response.status_code})"
                    )
                else:
                    self.call_log.append(CallRecord(op, attempt, "ok"))
                    return response
            if attempt + 1 < attempts:
                self._sleep(_BACKOFF_BASE * (2**attempt))
        raise TransportError(f"{op}: retry loop exhausted")  # pragma: no cover


class RemoteTranscriptionBackend(_RemoteBase):
    """POST /transcribe with the media payload; expects {"segments": [...]}"""

    def transcribe(self, clip: MediaClip) -> list[TranscriptSegment]:
        response = self._post(
            "transcribe",
            "/transcribe",
            json={
                "model": self.config.model_name,
                "media_b64": base64.b64encode(clip.data).decode("ascii"),
                "duration": clip.duration,
            },
        )
        payload = response.json()
        segments = [
            TranscriptSegment(
                start=float(s["start"]), end=float(s["end"]), text=str(s["text"])
            )
            for s in payload.get("segments", [])
        ]
        return normalize_segments(segments)


class RemoteCaptionBackend(_RemoteBase):
    """POST /caption; the instruction string is forwarded byte-identical."""

    def caption(self, image_png: bytes, dialogue: str, instruction: str) -> str:
        if not instruction.strip():
            raise InputError("caption requires a nonempty instruction")
        response = self._post(
            "caption",
            "/caption",
            json={
                "model": self.config.model_name,
                "image_b64": base64.b64encode(image_png).decode("ascii"),
                "dialogue": dialogue,
                "instruction": instruction,
            },
        )
        text = str(response.json().get("caption", ""))
        if not text.strip():
            raise TransportError("caption: backend returned an empty caption")
        return text


class RemoteChatBackend(_RemoteBase):
    """POST /chat with system + messages; expects {"text": ...}."""

    def complete(self, exchange: ChatExchange) -> str:
        check_budget(exchange, self.config)
        response = self._post(
            "complete",
            "/chat",
            json={
                "model": self.config.model_name,
                "system": exchange.system_instruction,
                "messages": [
                    {"role": m.role, "content": m.content} for m in exchange.messages
                ],
                "temperature": exchange.temperature,
            },
        )
        text = str(response.json().get("text", ""))
        if not text.strip():
            raise TransportError("complete: backend returned an empty completion")
        return text


class RemoteEmbeddingBackend(_RemoteBase):
    """POST /embed; the first call pins the backend's dimension."""

    def __init__(self, config: GatewayConfig, client: httpx.Client | None = None):
        super().__init__(config, client)
        self.dimension = 0  # learned from the first response

    def embed(self, text: str) -> EmbeddingVector:
        if not text.strip():
            raise InputError("cannot embed empty text")
        response = self._post(
            "embed",
            "/embed",
            json={"model": self.config.model_name, "text": text},
        )
        vector = EmbeddingVector(response.json().get("embedding", []))
        if self.dimension == 0:
            self.dimension = vector.dimension
        elif vector.dimension != self.dimension:
            raise TransportError(
                f"embed: backend changed dimension from {self.dimension} "
                f"to {vector.dimension}"
            )
        return vector
