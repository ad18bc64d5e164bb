import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symstory.actions import (
    BASE_ACTION_TERMS,
    ActionEmbedding,
    ActiveCharacter,
    BaseActionLexicon,
    blend_topk,
    cosine_similarity,
    interpolate,
    rank_actions,
    topk_weights,
)
from symstory.embeddings import PseudoEmbeddingProvider


def oracle_rank(query, vectors):
    """Plain-python cosine ranking, independent of the numpy path."""
    def cos(a, b):
        num = math.fsum(x * y for x, y in zip(a, b))
        na = math.sqrt(math.fsum(x * x for x in a))
        nb = math.sqrt(math.fsum(x * x for x in b))
        return num / (na * nb)

    sims = [cos(query, v) for v in vectors]
    order = sorted(range(len(sims)), key=lambda i: -sims[i])
    return [(i, sims[i]) for i in order]


def oracle_topk(query, vectors, k):
    ranked = oracle_rank(query, vectors)[:k]
    clamped = [max(0.0, s) for _, s in ranked]
    total = math.fsum(clamped)
    if total == 0.0:
        return [(i, 1.0 / k) for i, _ in ranked]
    return [(i, c / total) for (i, _), c in zip(ranked, clamped)]


@pytest.fixture(scope="module")
def lexicon():
    return BaseActionLexicon.from_provider(PseudoEmbeddingProvider(dimension=64, seed=7))


class TestCosine:
    def test_identical(self):
        v = np.array([1.0, 2.0, 3.0])
        assert cosine_similarity(v, v) == pytest.approx(1.0)

    def test_orthogonal(self):
        assert cosine_similarity(np.array([1.0, 0.0]), np.array([0.0, 2.0])) == pytest.approx(0.0)

    def test_analytic_value(self):
        got = cosine_similarity(np.array([1.0, 0.0]), np.array([1.0, 1.0]))
        assert got == pytest.approx(math.sqrt(2) / 2)

    def test_zero_vector_rejected(self):
        with pytest.raises(ValueError):
            cosine_similarity(np.zeros(3), np.ones(3))

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            cosine_similarity(np.ones(3), np.ones(4))


class TestRankActions:
    def test_exact_match_ranks_first(self, lexicon):
        query = lexicon.embedding_of("hug")
        ranked = rank_actions(query, lexicon)
        assert ranked[0][0] == "hug"
        assert ranked[0][1] == pytest.approx(1.0)

    def test_permutation_of_lexicon(self, lexicon):
        query = ActionEmbedding(np.ones(lexicon.dimension))
        ranked = rank_actions(query, lexicon)
        assert sorted(t for t, _ in ranked) == sorted(BASE_ACTION_TERMS)
        sims = [s for _, s in ranked]
        assert sims == sorted(sims, reverse=True)

    def test_tie_breaks_by_lexicon_order(self):
        # two identical base embeddings: the earlier term wins
        base = PseudoEmbeddingProvider(dimension=8, seed=1)
        embs = [base.embed(t) for t in BASE_ACTION_TERMS]
        embs[5] = embs[2]
        lex = BaseActionLexicon(BASE_ACTION_TERMS, embs)
        ranked = rank_actions(embs[2], lex)
        assert ranked[0][0] == BASE_ACTION_TERMS[2]
        assert ranked[1][0] == BASE_ACTION_TERMS[5]

    def test_dimension_mismatch(self, lexicon):
        with pytest.raises(ValueError):
            rank_actions(ActionEmbedding(np.ones(3)), lexicon)

    def test_matches_plain_python_oracle(self, lexicon):
        rng = np.random.default_rng(3)
        for _ in range(20):
            q = rng.standard_normal(lexicon.dimension)
            got = rank_actions(ActionEmbedding(q), lexicon)
            want = oracle_rank(q.tolist(), [e.vector.tolist() for e in lexicon.embeddings])
            assert [t for t, _ in got] == [BASE_ACTION_TERMS[i] for i, _ in want]
            for (_, s_got), (_, s_want) in zip(got, want):
                assert s_got == pytest.approx(s_want, abs=1e-12)


class TestTopkWeights:
    def test_two_term_normalization(self):
        # construct exact similarities: hug 0.9, kiss 0.8, everything else 0.05
        dim = 2 + len(BASE_ACTION_TERMS)
        embs = []
        for i, term in enumerate(BASE_ACTION_TERMS):
            v = np.zeros(dim)
            if term == "hug":
                v[0], v[1] = 0.9, math.sqrt(1 - 0.81)
            elif term == "kiss":
                v[0], v[2 + i] = 0.8, 0.6
            else:
                v[0] = 0.05
                v[2 + i] = math.sqrt(1 - 0.0025)
            embs.append(ActionEmbedding(v))
        lex = BaseActionLexicon(BASE_ACTION_TERMS, embs)
        query = np.zeros(dim)
        query[0] = 1.0
        got = topk_weights(ActionEmbedding(query), lex, k=2)
        assert got[0][0] == "hug"
        assert got[0][1] == pytest.approx(0.9 / 1.7)
        assert got[1][0] == "kiss"
        assert got[1][1] == pytest.approx(0.8 / 1.7)

    def test_k1_gives_unit_weight(self, lexicon):
        got = topk_weights(lexicon.embedding_of("chase"), lexicon, k=1)
        assert got == [("chase", 1.0)]

    def test_all_negative_fallback_uniform(self):
        dim = 4
        embs = []
        for i, term in enumerate(BASE_ACTION_TERMS):
            v = np.zeros(dim)
            v[0] = -1.0
            v[1] = 0.001 * (i + 1)
            embs.append(ActionEmbedding(v / np.linalg.norm(v)))
        lex = BaseActionLexicon(BASE_ACTION_TERMS, embs)
        q = np.zeros(dim)
        q[0] = 1.0
        got = topk_weights(ActionEmbedding(q), lex, k=3)
        assert [w for _, w in got] == pytest.approx([1 / 3] * 3)

    def test_k_out_of_range(self, lexicon):
        q = lexicon.embedding_of("hug")
        with pytest.raises(ValueError):
            topk_weights(q, lexicon, k=0)
        with pytest.raises(ValueError):
            topk_weights(q, lexicon, k=32)

    @settings(max_examples=100)
    @given(seed=st.integers(min_value=0, max_value=10_000), k=st.integers(min_value=1, max_value=31))
    def test_weights_properties(self, lexicon, seed, k):
        rng = np.random.default_rng(seed)
        q = ActionEmbedding(rng.standard_normal(lexicon.dimension))
        got = topk_weights(q, lexicon, k)
        assert len(got) == k
        weights = [w for _, w in got]
        assert all(w >= 0 for w in weights)
        assert sum(weights) == pytest.approx(1.0, abs=1e-9)
        ranked = [t for t, _ in rank_actions(q, lexicon)[:k]]
        assert [t for t, _ in got] == ranked

    @settings(max_examples=50)
    @given(seed=st.integers(min_value=0, max_value=10_000), c=st.floats(min_value=0.01, max_value=100))
    def test_query_scale_invariance(self, lexicon, seed, c):
        rng = np.random.default_rng(seed)
        v = rng.standard_normal(lexicon.dimension)
        got1 = topk_weights(ActionEmbedding(v), lexicon, 4)
        got2 = topk_weights(ActionEmbedding(c * v), lexicon, 4)
        assert [t for t, _ in got1] == [t for t, _ in got2]
        for (_, w1), (_, w2) in zip(got1, got2):
            assert w1 == pytest.approx(w2, abs=1e-9)


class TestInterpolate:
    def test_single_weight(self):
        v = np.array([1.0, 2.0, 3.0])
        assert interpolate([1.0], [v]) == pytest.approx(v)

    def test_symmetric_cancellation(self):
        v = np.array([2.0, -1.0])
        got = interpolate([0.5, 0.5], [v, -v])
        assert got == pytest.approx(np.zeros(2))

    def test_arithmetic(self):
        got = interpolate([0.75, 0.25], [np.array([4.0, 0.0]), np.array([0.0, 4.0])])
        assert got == pytest.approx(np.array([3.0, 1.0]))

    def test_weights_must_sum_to_one(self):
        with pytest.raises(ValueError):
            interpolate([0.5, 0.6], [np.zeros(2), np.zeros(2)])

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            interpolate([0.5, 0.5], [np.zeros(2), np.zeros(3)])

    @settings(max_examples=100)
    @given(seed=st.integers(min_value=0, max_value=10_000))
    def test_convex_hull_bound(self, seed):
        rng = np.random.default_rng(seed)
        vs = [rng.uniform(-5, 5, size=6) for _ in range(4)]
        w = rng.uniform(0.05, 1.0, size=4)
        w = w / w.sum()
        got = interpolate(w.tolist(), vs)
        stacked = np.stack(vs)
        assert np.all(got <= stacked.max(axis=0) + 1e-12)
        assert np.all(got >= stacked.min(axis=0) - 1e-12)


class TestBlendAgainstOracle:
    @settings(max_examples=100)
    @given(seed=st.integers(min_value=0, max_value=100_000), k=st.integers(min_value=1, max_value=8))
    def test_matches_oracle(self, lexicon, seed, k):
        rng = np.random.default_rng(seed)
        q = rng.standard_normal(lexicon.dimension)
        got = blend_topk(ActionEmbedding(q), lexicon, k)
        pairs = oracle_topk(q.tolist(), [e.vector.tolist() for e in lexicon.embeddings], k)
        want = np.zeros(lexicon.dimension)
        for i, w in pairs:
            want += w * lexicon.embeddings[i].vector
        assert np.max(np.abs(got.vector - want)) < 1e-9


class TestActiveCharacter:
    def test_validation(self):
        with pytest.raises(ValueError):
            ActiveCharacter(2)

    def test_swap(self):
        assert ActiveCharacter(0).swapped() == ActiveCharacter(1)
