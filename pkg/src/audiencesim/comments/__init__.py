"""Comment generation: batch planning, prompting, identities, and the four
comment kinds."""

from audiencesim.comments.engine import (
    generate_batch,
    generate_custom,
    generate_primary,
    generate_reply,
    generate_thread,
)
from audiencesim.comments.identity import (
    DEFAULT_NAMES,
    assign_identity,
    avatar_seed_for,
    load_name_file,
)
from audiencesim.comments.model import (
    COMMENT_KINDS,
    MAX_BODY_CHARS,
    Comment,
    CommentBatchPlan,
    IdentityPool,
    comment_from_record,
    comment_to_record,
    plan_batch,
)
from audiencesim.comments.prompts import (
    DEFAULT_FEWSHOT,
    build_custom_prompt,
    build_primary_prompt,
    build_reply_prompt,
    build_thread_prompt,
)

__all__ = [
    "COMMENT_KINDS",
    "Comment",
    "CommentBatchPlan",
    "DEFAULT_FEWSHOT",
    "DEFAULT_NAMES",
    "IdentityPool",
    "MAX_BODY_CHARS",
    "assign_identity",
    "avatar_seed_for",
    "build_custom_prompt",
    "comment_from_record",
    "comment_to_record",
    "build_primary_prompt",
    "build_reply_prompt",
    "build_thread_prompt",
    "generate_batch",
    "generate_custom",
    "generate_primary",
    "generate_reply",
    "generate_thread",
    "load_name_file",
    "plan_batch",
]
