import itertools
from collections import Counter
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from audiencesim.comments.engine import (
    clean_body,
    generate_batch,
    generate_body,
    generate_custom,
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
    MAX_BODY_CHARS,
    Comment,
    IdentityPool,
    comment_from_record,
    comment_to_record,
    plan_batch,
)
from audiencesim.comments.prompts import (
    DEFAULT_FEWSHOT,
    build_primary_prompt,
    build_reply_prompt,
    build_thread_prompt,
)
from audiencesim.errors import CompletionParseError, InputError
from audiencesim.gateway.base import GatewayConfig
from audiencesim.gateway.mock import MockChatBackend
from audiencesim.personas import Persona
from audiencesim.summarize import VideoSummary
from audiencesim.video.frames import VideoAsset

SUMMARY = VideoSummary(
    summary_text="A quiet walk through an autumn forest.",
    keywords=("autumn", "forest walk", "leaves"),
    source_video="vid_c",
)
ASSET = VideoAsset(
    video_id="vid_c",
    file_path=Path("/dev/null"),
    title="Autumn Walk",
    description="No talking, just trees.",
    author="walker",
    duration=60.0,
)
PERSONA = Persona(
    persona_id="p_hiker", text="retired park ranger who hikes daily", source="dataset"
)
POOL = IdentityPool(names=DEFAULT_NAMES, rng_seed=7)


# -- batch arithmetic -----------------------------------------------------


@pytest.mark.parametrize(
    "total,primary,thread", [(30, 21, 9), (1, 1, 0), (10, 7, 3), (2, 1, 1)]
)
def test_plan_batch_examples(total, primary, thread):
    plan = plan_batch(total)
    assert (plan.primary_count, plan.thread_count) == (primary, thread)


def test_plan_batch_sweep():
    for total in range(1, 201):
        plan = plan_batch(total)
        assert plan.primary_count + plan.thread_count == total
        assert plan.primary_count >= 1
        # integer half-up on the 70% share
        assert plan.primary_count == (70 * total + 50) // 100


def test_plan_batch_rejects_zero():
    with pytest.raises(InputError):
        plan_batch(0)


# -- comment invariants ---------------------------------------------------


def make_comment(**overrides):
    base = dict(
        comment_id="vid_c.c00001",
        video_id="vid_c",
        kind="primary",
        body="nice video",
        author_name="Ann",
        avatar_seed="abc123",
    )
    base.update(overrides)
    return Comment(**base)


def test_comment_roots_reject_parent():
    with pytest.raises(InputError):
        make_comment(parent_id="vid_c.c00000")


def test_comment_thread_requires_parent():
    with pytest.raises(InputError):
        make_comment(kind="thread")


def test_comment_rejects_self_parent():
    with pytest.raises(InputError):
        make_comment(kind="thread", parent_id="vid_c.c00001")


def test_comment_rejects_unknown_kind():
    with pytest.raises(InputError):
        make_comment(kind="spam")


def test_comment_body_length_cap():
    make_comment(body="x" * MAX_BODY_CHARS)
    with pytest.raises(InputError):
        make_comment(body="x" * (MAX_BODY_CHARS + 1))


def test_comment_record_round_trip():
    original = make_comment(kind="thread", parent_id="vid_c.c00000", persona_id="p_x")
    assert comment_from_record(comment_to_record(original)) == original


# -- identities -----------------------------------------------------------


def test_identity_deterministic():
    assert assign_identity(POOL, "vid_c.c00003") == assign_identity(POOL, "vid_c.c00003")


def test_identity_varies_with_seed_and_id():
    name_a, _ = assign_identity(POOL, "vid_c.c00001")
    names = {assign_identity(POOL, f"vid_c.c{i:05d}")[0] for i in range(40)}
    assert len(names) > 1
    other_pool = IdentityPool(names=DEFAULT_NAMES, rng_seed=8)
    assert any(
        assign_identity(POOL, f"x{i}")[0] != assign_identity(other_pool, f"x{i}")[0]
        for i in range(20)
    )
    assert name_a in DEFAULT_NAMES


def test_name_pick_roughly_uniform():
    # chi-square over a 10-name pool, 5000 draws; df=9, p=0.001 cutoff 27.88
    pool = IdentityPool(names=tuple("abcdefghij"), rng_seed=0)
    counts = Counter(assign_identity(pool, f"c{i}")[0] for i in range(5000))
    expected = 5000 / 10
    chi2 = sum((counts[n] - expected) ** 2 / expected for n in pool.names)
    assert chi2 < 27.88


def test_avatar_seeds_collision_free_at_scale():
    seeds = {avatar_seed_for(f"vid.c{i:05d}") for i in range(10_000)}
    assert len(seeds) == 10_000


def test_avatar_seed_independent_of_pool():
    assert assign_identity(POOL, "z")[1] == avatar_seed_for("z")


def test_default_pool_names_distinct():
    assert len(set(DEFAULT_NAMES)) == len(DEFAULT_NAMES)
    assert len(DEFAULT_NAMES) >= 300


def test_identity_pool_rejects_duplicates():
    with pytest.raises(InputError):
        IdentityPool(names=("Ann", "Ann"))


def test_load_name_file(tmp_path):
    path = tmp_path / "names.txt"
    path.write_text("Ann\n\nBo\nAnn\n  Cy  \n", encoding="utf-8")
    assert load_name_file(path) == ("Ann", "Bo", "Cy")
    with pytest.raises(InputError):
        load_name_file(tmp_path / "missing.txt")


# -- prompt content -------------------------------------------------------


def test_primary_prompt_carries_video_context():
    text = build_primary_prompt(SUMMARY, ASSET, PERSONA).rendered_text()
    assert "Autumn Walk" in text
    for keyword in SUMMARY.keywords:
        assert keyword in text
    assert text.count(PERSONA.text) == 1
    assert SUMMARY.summary_text in text


def test_primary_prompt_fewshot_in_order():
    text = build_primary_prompt(SUMMARY, ASSET, PERSONA).rendered_text()
    positions = [text.index(example) for example in DEFAULT_FEWSHOT]
    assert positions == sorted(positions)


def test_primary_prompt_ablation_omits_persona_block():
    text = build_primary_prompt(SUMMARY, ASSET, None).rendered_text()
    assert "You are this person" not in text


def test_thread_prompt_quotes_parent():
    parent = make_comment(body="that bridge shot was unreal", author_name="Kim")
    text = build_thread_prompt(parent, SUMMARY, ASSET, PERSONA).rendered_text()
    assert "Kim" in text
    assert "that bridge shot was unreal" in text


def test_reply_prompt_recaps_both_sides():
    replied = make_comment(body="loved the river part")
    text = build_reply_prompt(
        replied, "thanks, filmed it at dawn", SUMMARY, ASSET, PERSONA
    ).rendered_text()
    assert "Earlier you commented: loved the river part" in text
    assert "thanks, filmed it at dawn" in text


def test_prompt_rejects_empty_fewshot():
    with pytest.raises(InputError):
        build_primary_prompt(SUMMARY, ASSET, PERSONA, fewshot=())


# -- body cleaning --------------------------------------------------------


@pytest.mark.parametrize(
    "raw,expected",
    [
        ("  spaced   out\n\ttext ", "spaced out text"),
        ('"quoted comment"', "quoted comment"),
        ("'single quoted'", "single quoted"),
        ("“curly quoted”", "curly quoted"),
        ("‘curly single’", "curly single"),
        ('"only one layer stripped"', "only one layer stripped"),
        ('""', ""),
        ('say "this part" was great', 'say "this part" was great'),
    ],
)
def test_clean_body(raw, expected):
    assert clean_body(raw) == expected


def test_clean_body_strips_one_layer_only():
    assert clean_body('""doubled""') == '"doubled"'


class ScriptedChat:
    def __init__(self, replies):
        self.config = GatewayConfig(model_name="scripted", context_budget=100_000)
        self.replies = list(replies)
        self.prompts = []

    def complete(self, exchange):
        self.prompts.append(exchange)
        return self.replies.pop(0)


def test_generate_body_retries_blank_then_succeeds():
    backend = ScriptedChat(["   ", "second try works"])
    prompt = build_primary_prompt(SUMMARY, ASSET, PERSONA)
    assert generate_body(backend, prompt) == "second try works"
    assert len(backend.prompts) == 2
    retry_text = backend.prompts[1].rendered_text()
    assert "empty or unusable" in retry_text


def test_generate_body_gives_up_after_retry():
    backend = ScriptedChat(['""', "''"])
    prompt = build_primary_prompt(SUMMARY, ASSET, PERSONA)
    with pytest.raises(CompletionParseError):
        generate_body(backend, prompt)
    assert len(backend.prompts) == 2


# -- single-comment generators -------------------------------------------


def test_generate_thread_rejects_non_primary_parent():
    parent = make_comment(kind="thread", parent_id="vid_c.c00000")
    with pytest.raises(InputError):
        generate_thread(
            parent,
            PERSONA,
            SUMMARY,
            ASSET,
            MockChatBackend(),
            comment_id="vid_c.c00009",
            pool=POOL,
        )


def test_generate_reply_keeps_persona_and_parent():
    replied = make_comment(persona_id=PERSONA.persona_id)
    reply = generate_reply(
        replied,
        "appreciate you watching",
        SUMMARY,
        ASSET,
        PERSONA,
        MockChatBackend(),
        comment_id="vid_c.c00011",
        parent_id="vid_c.c00010",
        pool=POOL,
    )
    assert reply.kind == "reply"
    assert reply.persona_id == PERSONA.persona_id
    assert reply.parent_id == "vid_c.c00010"
    assert reply.avatar_seed == avatar_seed_for("vid_c.c00011")


def test_generate_reply_rejects_blank_text():
    with pytest.raises(InputError):
        generate_reply(
            make_comment(),
            "  ",
            SUMMARY,
            ASSET,
            PERSONA,
            MockChatBackend(),
            comment_id="c",
            parent_id="p",
            pool=POOL,
        )


def test_generate_custom_returns_user_defined_persona():
    persona, comment = generate_custom(
        "a luthier who restores violins",
        SUMMARY,
        ASSET,
        MockChatBackend(),
        comment_id="vid_c.c00020",
        pool=POOL,
    )
    assert persona.source == "user_defined"
    assert comment.kind == "custom_persona"
    assert comment.persona_id == persona.persona_id
    assert comment.parent_id is None


# -- batches --------------------------------------------------------------


def ranked(n):
    return [
        Persona(persona_id=f"p_{i:03d}", text=f"persona number {i}", source="dataset")
        for i in range(n)
    ]


def run_batch(count, personas, seed=3, backend=None):
    ids = (f"vid_c.c{i:05d}" for i in itertools.count(1))
    ticks = (f"2020-01-01T00:00:{i:02d}Z" for i in itertools.count())
    return generate_batch(
        SUMMARY,
        ASSET,
        personas,
        backend or MockChatBackend(),
        count,
        pool=POOL,
        rng_seed=seed,
        allocate_id=lambda: next(ids),
        clock=lambda: next(ticks),
    )


def test_batch_shape_and_kinds():
    batch = run_batch(10, ranked(20))
    kinds = Counter(c.kind for c in batch)
    assert kinds == {"primary": 7, "thread": 3}
    primary_ids = {c.comment_id for c in batch if c.kind == "primary"}
    for c in batch:
        if c.kind == "thread":
            assert c.parent_id in primary_ids


def test_batch_personas_follow_rank_order():
    batch = run_batch(10, ranked(20))
    primaries = [c for c in batch if c.kind == "primary"]
    assert [c.persona_id for c in primaries] == [f"p_{i:03d}" for i in range(7)]


def test_batch_deterministic_given_seed():
    a = run_batch(12, ranked(20), seed=5)
    b = run_batch(12, ranked(20), seed=5)
    assert a == b


def test_batch_parent_slots_change_with_seed():
    def slots(seed):
        batch = run_batch(20, ranked(30), seed=seed)
        return tuple(c.parent_id for c in batch if c.kind == "thread")

    assert any(slots(0) != slots(s) for s in range(1, 6))


def test_batch_wraps_small_persona_pool():
    batch = run_batch(10, ranked(3))
    assert all(c.persona_id in {"p_000", "p_001", "p_002"} for c in batch)


def test_batch_thread_persona_differs_from_parent():
    batch = run_batch(20, ranked(4))
    by_id = {c.comment_id: c for c in batch}
    for c in batch:
        if c.kind == "thread":
            assert c.persona_id != by_id[c.parent_id].persona_id


def test_batch_single_persona_pool_waives_distinctness():
    batch = run_batch(4, ranked(1))
    assert all(c.persona_id == "p_000" for c in batch)


def test_batch_ablation_leaves_personas_unset():
    batch = run_batch(10, None)
    assert all(c.persona_id is None for c in batch)


def test_batch_rejects_empty_ranked_list():
    with pytest.raises(InputError):
        run_batch(5, [])


@given(st.integers(min_value=1, max_value=60), st.integers(min_value=0, max_value=99))
@settings(max_examples=20, deadline=None)
def test_batch_quota_property(count, seed):
    batch = run_batch(count, ranked(10), seed=seed)
    plan = plan_batch(count)
    kinds = Counter(c.kind for c in batch)
    assert kinds.get("primary", 0) == plan.primary_count
    assert kinds.get("thread", 0) == plan.thread_count
    assert len({c.comment_id for c in batch}) == count
    assert len({c.avatar_seed for c in batch}) == count
