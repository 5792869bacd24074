"""Comment records and batch arithmetic."""

from __future__ import annotations

from dataclasses import dataclass

from audiencesim.errors import InputError

COMMENT_KINDS = ("primary", "thread", "reply", "custom_persona")

# Kinds that live at the root of the comment forest.
ROOT_KINDS = ("primary", "custom_persona")

MAX_BODY_CHARS = 2000

# Share of a batch that lands as root-level primary comments.
PRIMARY_SHARE_PERCENT = 70


@dataclass(frozen=True)
class Comment:
    """One comment node.  Primary and custom-persona comments are roots;
    thread and reply comments hang under a parent on the same video."""

    comment_id: str
    video_id: str
    kind: str
    body: str
    author_name: str
    avatar_seed: str
    persona_id: str | None = None
    parent_id: str | None = None
    created_at: str = ""

    def __post_init__(self):
        if self.kind not in COMMENT_KINDS:
            raise InputError(f"comment kind must be one of {COMMENT_KINDS}")
        if not self.comment_id.strip():
            raise InputError("comment_id must be nonempty")
        if not self.video_id.strip():
            raise InputError("video_id must be nonempty")
        if not self.body.strip():
            raise InputError("comment body must be nonempty")
        if len(self.body) > MAX_BODY_CHARS:
            raise InputError(
                f"comment body exceeds {MAX_BODY_CHARS} characters ({len(self.body)})"
            )
        if not self.author_name.strip():
            raise InputError("author_name must be nonempty")
        if not self.avatar_seed.strip():
            raise InputError("avatar_seed must be nonempty")
        if self.kind in ROOT_KINDS and self.parent_id is not None:
            raise InputError(f"{self.kind} comments must not have a parent")
        if self.kind not in ROOT_KINDS and not self.parent_id:
            raise InputError(f"{self.kind} comments require a parent_id")
        if self.parent_id == self.comment_id:
            raise InputError("a comment cannot be its own parent")


@dataclass(frozen=True)
class CommentBatchPlan:
    """How a requested batch splits into primary and thread comments."""

    total: int
    primary_count: int
    thread_count: int

    def __post_init__(self):
        if self.total < 1:
            raise InputError(f"batch total must be >= 1, got {self.total}")
        if self.primary_count < 1:
            raise InputError("a batch contains at least one primary comment")
        if self.primary_count + self.thread_count != self.total:
            raise InputError(
                f"plan does not add up: {self.primary_count} + "
                f"{self.thread_count} != {self.total}"
            )


@dataclass(frozen=True)
class IdentityPool:
    """The names and seed from which comment identities are drawn."""

    names: tuple[str, ...]
    rng_seed: int = 0

    def __post_init__(self):
        if not self.names:
            raise InputError("identity pool needs at least one name")
        if len(set(self.names)) != len(self.names):
            raise InputError("identity pool names must be distinct")


def comment_to_record(comment: Comment) -> dict:
    """Serialized artifact/store shape for one comment."""
    return {
        "comment_id": comment.comment_id,
        "video_id": comment.video_id,
        "kind": comment.kind,
        "body": comment.body,
        "author_name": comment.author_name,
        "avatar_seed": comment.avatar_seed,
        "persona_id": comment.persona_id,
        "parent_id": comment.parent_id,
        "created_at": comment.created_at,
    }


def comment_from_record(record: dict) -> Comment:
    return Comment(
        comment_id=record["comment_id"],
        video_id=record["video_id"],
        kind=record["kind"],
        body=record["body"],
        author_name=record["author_name"],
        avatar_seed=record["avatar_seed"],
        persona_id=record.get("persona_id"),
        parent_id=record.get("parent_id"),
        created_at=record.get("created_at", ""),
    )


def plan_batch(total: int) -> CommentBatchPlan:
    """Split a batch 70/30 into primaries and threads, half-up on the
    primary share.  Exact integer arithmetic; no float rounding."""
    if total < 1:
        raise InputError(f"batch total must be >= 1, got {total}")
    primary = (PRIMARY_SHARE_PERCENT * total + 50) // 100
    return CommentBatchPlan(
        total=total, primary_count=primary, thread_count=total - primary
    )
