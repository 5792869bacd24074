import numpy as np
import pytest

from audiencesim.errors import InputError
from audiencesim.gateway.mock import MockEmbeddingBackend
from audiencesim.gateway.types import EmbeddingVector, cosine_similarity
from audiencesim.metrics.embedscore import (
    embedding_group_score,
    embedding_relevance,
    greedy_match_f1,
    group_pair_count,
)
from oracles import greedy_f1_oracle, group_score_oracle


@pytest.fixture(scope="module")
def backend():
    return MockEmbeddingBackend()


def vec(values):
    return EmbeddingVector(np.asarray(values, dtype=np.float64))


# -- cosine ---------------------------------------------------------------


def test_cosine_identity_and_orthogonal():
    a = vec([1.0, 0.0, 0.0])
    b = vec([0.0, 2.0, 0.0])
    assert cosine_similarity(a, a) == pytest.approx(1.0)
    assert cosine_similarity(a, b) == pytest.approx(0.0)


def test_cosine_rejects_zero_vector_and_mismatch():
    with pytest.raises(InputError):
        cosine_similarity(vec([0.0, 0.0]), vec([1.0, 0.0]))
    with pytest.raises(InputError):
        cosine_similarity(vec([1.0, 0.0]), vec([1.0, 0.0, 0.0]))


def test_cosine_symmetry_and_scale_invariance():
    rng = np.random.default_rng(0)
    for _ in range(100):
        a = vec(rng.standard_normal(16))
        b = vec(rng.standard_normal(16))
        assert abs(cosine_similarity(a, b) - cosine_similarity(b, a)) <= 1e-12
        scaled = vec(3.7 * np.asarray(a.values))
        assert abs(cosine_similarity(scaled, b) - cosine_similarity(a, b)) <= 1e-9


# -- greedy match ---------------------------------------------------------


def test_greedy_identical_texts(backend):
    assert greedy_match_f1("the cat sat", "the cat sat", backend) == pytest.approx(1.0)


def test_greedy_empty_side_scores_zero(backend):
    assert greedy_match_f1("", "hello", backend) == 0.0
    assert greedy_match_f1("hello", "!!!", backend) == 0.0


def test_greedy_symmetric(backend):
    a, b = "the cat sat on the mat", "a dog ran fast"
    assert greedy_match_f1(a, b, backend) == pytest.approx(
        greedy_match_f1(b, a, backend), abs=1e-12
    )


def test_greedy_matches_oracle(backend):
    import random

    rng = random.Random(4)
    words = ["the", "cat", "sat", "dog", "ran", "mat", "fast", "red"]
    for _ in range(25):
        a = " ".join(rng.choices(words, k=rng.randint(1, 12)))
        b = " ".join(rng.choices(words, k=rng.randint(1, 12)))
        assert greedy_match_f1(a, b, backend) == pytest.approx(
            greedy_f1_oracle(a, b, backend), abs=1e-9
        )


def test_greedy_cache_is_transparent(backend):
    cache = {}
    a, b = "red dog ran", "cat sat red"
    first = greedy_match_f1(a, b, backend, cache=cache)
    assert cache  # populated
    assert greedy_match_f1(a, b, backend, cache=cache) == first


# -- group score ----------------------------------------------------------


def test_group_score_matches_all_pairs_oracle(backend):
    bodies = ["the cat sat", "dog ran fast", "red mat", "cat ran", "sat on mat"]
    got = embedding_group_score(bodies, backend)
    assert got == pytest.approx(group_score_oracle(bodies, backend), abs=1e-9)


def test_group_score_input_order_invariant(backend):
    bodies = ["alpha beta", "gamma delta", "epsilon zeta", "eta theta"]
    assert embedding_group_score(bodies, backend) == embedding_group_score(
        list(reversed(bodies)), backend
    )


def test_group_score_sampling_deterministic(backend):
    bodies = [f"comment number {i} about topic {i % 3}" for i in range(25)]
    # 300 pairs > default cap of 200, so the sampled path engages
    a = embedding_group_score(bodies, backend, max_pairs=50, seed=1)
    b = embedding_group_score(bodies, backend, max_pairs=50, seed=1)
    c = embedding_group_score(bodies, backend, max_pairs=50, seed=2)
    assert a == b
    assert a != c


def test_group_pair_count():
    assert group_pair_count(5) == 10
    assert group_pair_count(30) == 200  # capped
    assert group_pair_count(2) == 1


def test_group_score_needs_two(backend):
    with pytest.raises(InputError):
        embedding_group_score(["solo"], backend)


# -- relevance against a summary -----------------------------------------


def test_embedding_relevance_identical_summary(backend):
    bodies = ["space garlic bread tasting"]
    score = embedding_relevance(bodies, "space garlic bread tasting", backend)
    assert score == pytest.approx(1.0)


def test_embedding_relevance_is_mean_of_pairwise(backend):
    bodies = ["the cat sat", "dog ran"]
    summary = "a cat and a dog"
    expected = np.mean(
        [greedy_f1_oracle(b, summary, backend) for b in bodies]
    )
    assert embedding_relevance(bodies, summary, backend) == pytest.approx(
        float(expected), abs=1e-9
    )
