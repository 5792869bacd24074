"""Generation of the four comment kinds and whole batches.

Batch layout: the requested count splits 70/30 into primaries and threads.
Primaries consume the top-ranked personas in rank order; threads take the
next ranks.  Thread parents are drawn uniformly without replacement from
the batch's primaries with a seeded rng.  Comment ids and identities are
allocated up front in a fixed order, so concurrent body generation cannot
change any output.
"""

from __future__ import annotations

import random
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence

from audiencesim.comments.model import Comment, IdentityPool, plan_batch
from audiencesim.comments.identity import assign_identity
from audiencesim.comments.prompts import (
    DEFAULT_FEWSHOT,
    build_custom_prompt,
    build_primary_prompt,
    build_reply_prompt,
    build_thread_prompt,
)
from audiencesim.errors import CompletionParseError, GatewayError, InputError
from audiencesim.gateway.base import ChatBackend
from audiencesim.gateway.types import ChatExchange, ChatMessage
from audiencesim.personas import Persona, derive_persona_id
from audiencesim.summarize import VideoSummary
from audiencesim.video.frames import VideoAsset

_RETRY_INSTRUCTION = (
    "Your previous reply was empty or unusable. Write the single comment "
    "now, as plain text with actual content."
)


def clean_body(raw: str) -> str:
    """Post-filter for generated bodies: strip one layer of surrounding
    quotes, collapse whitespace runs, empty result means failure."""
    text = " ".join(raw.split())
    for quote in ('"', "'", "“”", "‘’"):
        if len(quote) == 1:
            opening = closing = quote
        else:
            opening, closing = quote
        if len(text) >= 2 and text.startswith(opening) and text.endswith(closing):
            text = text[1:-1].strip()
            break
    return text


def generate_body(backend: ChatBackend, prompt: ChatExchange) -> str:
    """One completion with the body post-filter; a blank body earns one
    retry, then a gateway error."""
    raw = backend.complete(prompt)
    body = clean_body(raw)
    if body:
        return body
    retry = ChatExchange(
        system_instruction=prompt.system_instruction,
        messages=[
            *prompt.messages,
            ChatMessage(role="assistant", content=raw or "(empty)"),
            ChatMessage(role="user", content=_RETRY_INSTRUCTION),
        ],
        temperature=prompt.temperature,
    )
    body = clean_body(backend.complete(retry))
    if body:
        return body
    raise CompletionParseError(
        "comment body was empty after the retry", raw_completion=raw
    )


def generate_primary(
    summary: VideoSummary,
    asset: VideoAsset,
    persona: Persona | None,
    backend: ChatBackend,
    *,
    comment_id: str,
    pool: IdentityPool,
    created_at: str = "",
    fewshot: tuple[str, ...] = DEFAULT_FEWSHOT,
) -> Comment:
    """A root-level comment; persona=None runs the no-persona ablation."""
    prompt = build_primary_prompt(summary, asset, persona, fewshot)
    body = generate_body(backend, prompt)
    name, avatar = assign_identity(pool, comment_id)
    return Comment(
        comment_id=comment_id,
        video_id=asset.video_id,
        kind="primary",
        body=body,
        author_name=name,
        avatar_seed=avatar,
        persona_id=persona.persona_id if persona else None,
        created_at=created_at,
    )


def generate_thread(
    parent: Comment,
    persona: Persona | None,
    summary: VideoSummary,
    asset: VideoAsset,
    backend: ChatBackend,
    *,
    comment_id: str,
    pool: IdentityPool,
    created_at: str = "",
    fewshot: tuple[str, ...] = DEFAULT_FEWSHOT,
) -> Comment:
    """A comment under an existing primary, written by a different persona."""
    if parent.kind != "primary":
        raise InputError(
            f"thread comments attach to primary comments, not {parent.kind}"
        )
    prompt = build_thread_prompt(parent, summary, asset, persona, fewshot)
    body = generate_body(backend, prompt)
    name, avatar = assign_identity(pool, comment_id)
    return Comment(
        comment_id=comment_id,
        video_id=asset.video_id,
        kind="thread",
        body=body,
        author_name=name,
        avatar_seed=avatar,
        persona_id=persona.persona_id if persona else None,
        parent_id=parent.comment_id,
        created_at=created_at,
    )


def generate_reply(
    replied: Comment,
    user_reply_text: str,
    summary: VideoSummary,
    asset: VideoAsset,
    persona: Persona | None,
    backend: ChatBackend,
    *,
    comment_id: str,
    parent_id: str,
    pool: IdentityPool,
    created_at: str = "",
    fewshot: tuple[str, ...] = DEFAULT_FEWSHOT,
) -> Comment:
    """The simulated commenter's response after the creator replied.

    ``persona`` should be the replied-to comment's original persona so the
    voice stays consistent; ``parent_id`` is the creator's reply node, which
    the caller persists before this call.
    """
    if not user_reply_text.strip():
        raise InputError("reply text must be nonempty")
    prompt = build_reply_prompt(
        replied, user_reply_text, summary, asset, persona, fewshot
    )
    body = generate_body(backend, prompt)
    name, avatar = assign_identity(pool, comment_id)
    return Comment(
        comment_id=comment_id,
        video_id=asset.video_id,
        kind="reply",
        body=body,
        author_name=name,
        avatar_seed=avatar,
        persona_id=persona.persona_id if persona else None,
        parent_id=parent_id,
        created_at=created_at,
    )


def generate_custom(
    persona_text: str,
    summary: VideoSummary,
    asset: VideoAsset,
    backend: ChatBackend,
    *,
    comment_id: str,
    pool: IdentityPool,
    created_at: str = "",
    fewshot: tuple[str, ...] = DEFAULT_FEWSHOT,
) -> tuple[Persona, Comment]:
    """A root comment from a user-specified persona.

    Returns the user_defined Persona alongside the comment so the caller
    can persist both; the persona is never inserted into the retrieval
    index.
    """
    if not persona_text.strip():
        raise InputError("persona text must be nonempty")
    persona = Persona(
        persona_id=derive_persona_id(persona_text),
        text=persona_text,
        source="user_defined",
    )
    prompt = build_custom_prompt(summary, asset, persona, fewshot)
    body = generate_body(backend, prompt)
    name, avatar = assign_identity(pool, comment_id)
    comment = Comment(
        comment_id=comment_id,
        video_id=asset.video_id,
        kind="custom_persona",
        body=body,
        author_name=name,
        avatar_seed=avatar,
        persona_id=persona.persona_id,
        created_at=created_at,
    )
    return persona, comment


def generate_batch(
    summary: VideoSummary,
    asset: VideoAsset,
    ranked_personas: Sequence[Persona] | None,
    backend: ChatBackend,
    count: int,
    *,
    pool: IdentityPool,
    rng_seed: int,
    allocate_id: Callable[[], str],
    clock: Callable[[], str],
    fewshot: tuple[str, ...] = DEFAULT_FEWSHOT,
    parallelism: int = 4,
) -> list[Comment]:
    """One quota-complete batch of primary and thread comments.

    ``ranked_personas`` is the retrieval result in rank order; ``None``
    runs the ablation where every comment generates without a persona.
    When the ranked pool is smaller than the batch, persona assignment
    wraps around; a thread whose wrapped persona would equal its parent's
    advances to the next rank when the pool allows.
    """
    if ranked_personas is not None and not ranked_personas:
        raise InputError("ranked persona list is empty; check the keyword query")
    ranked = ranked_personas
    plan = plan_batch(count)

    def persona_at(rank: int) -> Persona | None:
        if ranked is None:
            return None
        return ranked[rank % len(ranked)]

    # Ids, identities, parent links, and timestamps are fixed before any
    # model call, in (kind, rank) order.
    primary_ids = [allocate_id() for _ in range(plan.primary_count)]
    thread_ids = [allocate_id() for _ in range(plan.thread_count)]
    rng = random.Random(rng_seed)
    parent_slots = rng.sample(range(plan.primary_count), plan.thread_count)

    primary_personas = [persona_at(i) for i in range(plan.primary_count)]
    thread_personas: list[Persona | None] = []
    for j in range(plan.thread_count):
        rank = plan.primary_count + j
        persona = persona_at(rank)
        if ranked is not None and len(ranked) > 1:
            parent_persona = primary_personas[parent_slots[j]]
            bump = 0
            while (
                persona is not None
                and parent_persona is not None
                and persona.persona_id == parent_persona.persona_id
                and bump < len(ranked)
            ):
                bump += 1
                persona = persona_at(rank + bump)
        thread_personas.append(persona)

    def primary_task(i: int) -> str:
        return generate_body(
            backend, build_primary_prompt(summary, asset, primary_personas[i], fewshot)
        )

    with ThreadPoolExecutor(max_workers=parallelism) as executor:
        primary_bodies = list(executor.map(primary_task, range(plan.primary_count)))

    primaries = []
    for i in range(plan.primary_count):
        name, avatar = assign_identity(pool, primary_ids[i])
        persona = primary_personas[i]
        primaries.append(
            Comment(
                comment_id=primary_ids[i],
                video_id=asset.video_id,
                kind="primary",
                body=primary_bodies[i],
                author_name=name,
                avatar_seed=avatar,
                persona_id=persona.persona_id if persona else None,
                created_at=clock(),
            )
        )

    def thread_task(j: int) -> str:
        parent = primaries[parent_slots[j]]
        return generate_body(
            backend,
            build_thread_prompt(parent, summary, asset, thread_personas[j], fewshot),
        )

    with ThreadPoolExecutor(max_workers=parallelism) as executor:
        thread_bodies = list(executor.map(thread_task, range(plan.thread_count)))

    threads = []
    for j in range(plan.thread_count):
        name, avatar = assign_identity(pool, thread_ids[j])
        persona = thread_personas[j]
        threads.append(
            Comment(
                comment_id=thread_ids[j],
                video_id=asset.video_id,
                kind="thread",
                body=thread_bodies[j],
                author_name=name,
                avatar_seed=avatar,
                persona_id=persona.persona_id if persona else None,
                parent_id=primaries[parent_slots[j]].comment_id,
                created_at=clock(),
            )
        )
    return primaries + threads
