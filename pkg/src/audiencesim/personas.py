"""Persona corpus loading, one-time embedding, and top-k retrieval.

Retrieval is an exhaustive cosine scan over the index.  A few thousand
personas fit easily in memory, and exactness keeps the brute-force oracle
tests meaningful.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
from dataclasses import dataclass
from pathlib import Path

from audiencesim.errors import GatewayError, InputError, StaleIndexError
from audiencesim.gateway.base import EmbeddingBackend
from audiencesim.gateway.types import EmbeddingVector, cosine_similarity

__all__ = [
    "INDEX_FORMAT_VERSION",
    "Persona",
    "PersonaIndex",
    "RankedPersona",
    "build_index",
    "cosine_similarity",
    "derive_persona_id",
    "load_index",
    "load_personas",
    "rank_personas",
    "save_index",
]

logger = logging.getLogger(__name__)

INDEX_FORMAT_VERSION = 1

MAX_PERSONA_CHARS = 1000

PERSONA_SOURCES = ("dataset", "user_defined")


@dataclass(frozen=True)
class Persona:
    """A short textual description of a person: personality, background,
    hobbies."""

    persona_id: str
    text: str
    source: str = "dataset"

    def __post_init__(self):
        if not self.persona_id.strip():
            raise InputError("persona_id must be nonempty")
        if not self.text.strip():
            raise InputError("persona text must be nonempty")
        if len(self.text) > MAX_PERSONA_CHARS:
            raise InputError(
                f"persona text exceeds {MAX_PERSONA_CHARS} characters "
                f"({len(self.text)})"
            )
        if self.source not in PERSONA_SOURCES:
            raise InputError(f"persona source must be one of {PERSONA_SOURCES}")


@dataclass(frozen=True)
class RankedPersona:
    persona_id: str
    score: float


@dataclass(frozen=True)
class PersonaIndex:
    """Embedded persona corpus; read-only once built.

    Entries are (persona_id, text, vector) in corpus order.  The embedding
    model name travels with the index so queries against a different model
    are rejected instead of silently returning garbage.
    """

    model_name: str
    dimension: int
    entries: tuple[tuple[str, str, EmbeddingVector], ...]

    def __len__(self) -> int:
        return len(self.entries)

    def text_of(self, persona_id: str) -> str:
        for pid, text, _ in self.entries:
            if pid == persona_id:
                return text
        raise InputError(f"persona_id not in index: {persona_id}")


def derive_persona_id(text: str) -> str:
    """Stable content-derived identifier; identical text collapses to one."""
    return "p_" + hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]


def load_personas(path: str | Path) -> list[Persona]:
    """Read a persona file: one persona per line, or JSON lines with a text
    field and an optional persona_id.

    Lines with identical derived ids collapse to a single persona.  An
    explicit persona_id reused for different text is an error.
    """
    path = Path(path)
    if not path.is_file():
        raise InputError(f"persona file not found: {path}")
    lines = path.read_text(encoding="utf-8").splitlines()
    numbered = [(i + 1, line) for i, line in enumerate(lines) if line.strip()]
    if not numbered:
        raise InputError(f"persona file is empty: {path}")

    jsonl = numbered[0][1].lstrip().startswith("{")
    by_id: dict[str, Persona] = {}
    for lineno, line in numbered:
        if jsonl:
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise InputError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
            if not isinstance(record, dict) or "text" not in record:
                raise InputError(f"{path}:{lineno}: expected an object with a text key")
            text = record["text"]
            if not isinstance(text, str) or not text.strip():
                raise InputError(f"{path}:{lineno}: text must be a nonempty string")
            persona_id = record.get("persona_id") or derive_persona_id(text)
        else:
            text = line.strip()
            persona_id = derive_persona_id(text)
        try:
            persona = Persona(persona_id=persona_id, text=text)
        except InputError as exc:
            raise InputError(f"{path}:{lineno}: {exc}") from exc
        existing = by_id.get(persona_id)
        if existing is not None and existing.text != persona.text:
            raise InputError(
                f"{path}:{lineno}: persona_id '{persona_id}' reused for different text"
            )
        by_id.setdefault(persona_id, persona)
    return list(by_id.values())


def build_index(personas: list[Persona], backend: EmbeddingBackend) -> PersonaIndex:
    """Embed every persona once.  Failures name the persona and nothing is
    kept, so a partial index can never exist."""
    if not personas:
        raise InputError("cannot build an index from zero personas")
    entries = []
    dimension = None
    for persona in personas:
        try:
            vector = backend.embed(persona.text)
        except Exception as exc:
            raise GatewayError(
                f"embedding failed for persona '{persona.persona_id}': {exc}"
            ) from exc
        if dimension is None:
            dimension = vector.dimension
        elif vector.dimension != dimension:
            raise GatewayError(
                f"embedding for persona '{persona.persona_id}' has dimension "
                f"{vector.dimension}, expected {dimension}"
            )
        entries.append((persona.persona_id, persona.text, vector))
    return PersonaIndex(
        model_name=backend.config.model_name,
        dimension=dimension,
        entries=tuple(entries),
    )


def save_index(index: PersonaIndex, path: str | Path) -> None:
    """Persist as JSON, atomically: same inputs produce identical bytes."""
    path = Path(path)
    payload = {
        "version": INDEX_FORMAT_VERSION,
        "model_name": index.model_name,
        "dimension": index.dimension,
        "personas": [
            {"persona_id": pid, "text": text, "vector": vector.tolist()}
            for pid, text, vector in index.entries
        ],
    }
    rendered = json.dumps(payload, sort_keys=True, ensure_ascii=False)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(rendered, encoding="utf-8")
    os.replace(tmp, path)


def load_index(path: str | Path, expected_model_name: str | None = None) -> PersonaIndex:
    """Load a persisted index; reject one built by a different embedding
    model with a stale-index error demanding a rebuild."""
    path = Path(path)
    if not path.is_file():
        raise InputError(f"persona index not found: {path}")
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InputError(f"persona index is not valid JSON: {path}: {exc}") from exc
    if not isinstance(payload, dict) or payload.get("version") != INDEX_FORMAT_VERSION:
        raise InputError(
            f"persona index {path} has unsupported format version "
            f"{payload.get('version')!r}; rebuild with 'persona index'"
        )
    model_name = payload["model_name"]
    if expected_model_name is not None and model_name != expected_model_name:
        raise StaleIndexError(
            f"persona index was built with embedding model '{model_name}' but "
            f"'{expected_model_name}' is configured; rebuild with 'persona index'"
        )
    dimension = payload["dimension"]
    entries = []
    for row in payload["personas"]:
        vector = EmbeddingVector(row["vector"])
        if vector.dimension != dimension:
            raise InputError(
                f"persona '{row['persona_id']}' vector has dimension "
                f"{vector.dimension}, index declares {dimension}"
            )
        entries.append((row["persona_id"], row["text"], vector))
    if not entries:
        raise InputError(f"persona index is empty: {path}")
    return PersonaIndex(
        model_name=model_name, dimension=dimension, entries=tuple(entries)
    )


def rank_personas(
    index: PersonaIndex,
    keywords: list[str],
    k: int,
    backend: EmbeddingBackend,
    min_score: float = 0.0,
) -> list[RankedPersona]:
    """Top-k personas by cosine similarity to the joined keyword query.

    The keywords are joined into one comma-separated string and embedded
    once.  Sorting is score-descending with ties broken by persona_id, so
    the result is deterministic.  Personas scoring below ``min_score`` are
    dropped even inside the top k: an irrelevant persona writes worse
    comments than no persona at all.
    """
    if len(index) == 0:
        raise InputError("persona index is empty")
    if k < 1:
        raise InputError(f"k must be >= 1, got {k}")
    cleaned = [kw.strip() for kw in keywords if kw.strip()]
    if not cleaned:
        raise InputError("at least one nonempty keyword is required")
    if k > len(index):
        logger.warning(
            "requested top %d personas but index holds %d; clamping", k, len(index)
        )
        k = len(index)
    query = backend.embed(", ".join(cleaned))
    scored = [
        RankedPersona(persona_id=pid, score=cosine_similarity(query, vector))
        for pid, _, vector in index.entries
    ]
    scored = [r for r in scored if r.score >= min_score]
    scored.sort(key=lambda r: (-r.score, r.persona_id))
    return scored[:k]
