import math

import numpy as np
import pytest

from symstory.actions import (
    ActionEmbedding,
    ActionInfo,
    ActiveCharacter,
    BASE_ACTION_TERMS,
    BaseActionLexicon,
)
from symstory.embeddings import (
    PseudoEmbeddingProvider,
    PseudoTokenEmbeddingProvider,
    ScriptedTextGenerator,
    StubTextGenerator,
)
from symstory.prompts import PAD_TOKENS, StorySettings
from symstory.textgen import (
    build_soft_prompt,
    build_story_prompt,
    generate_sentence,
    text2action,
    text2action_info,
    text2char,
)

from test_actions import oracle_topk


@pytest.fixture(scope="module")
def lexicon():
    return BaseActionLexicon.from_provider(PseudoEmbeddingProvider(dimension=24, seed=5))


@pytest.fixture(scope="module")
def tokens():
    return PseudoTokenEmbeddingProvider(dimension=6, seed=5)


@pytest.fixture
def settings():
    return StorySettings(name0="Mira", name1="Rook", scene="a pier at dusk")


class ConstantTokens:
    """dimension-1 token provider with a fixed value per term."""

    dimension = 1

    def __init__(self, table):
        self.table = table

    def token_embeddings(self, term, pad_to=PAD_TOKENS):
        return np.full((pad_to, 1), float(self.table[term]))


class TestBuildSoftPrompt:
    def test_linear_combination_example(self, lexicon):
        # equal weights over push/pull with constant blocks 1 and 3 -> 2
        query_dim = lexicon.dimension
        q = 0.5 * lexicon.embedding_of("push").vector + 0.5 * lexicon.embedding_of("pull").vector
        tokens = ConstantTokens({t: 3.0 if t == "pull" else 1.0 for t in BASE_ACTION_TERMS})
        block, pairs = build_soft_prompt(ActionEmbedding(q), lexicon, tokens, k=2)
        terms = {t for t, _ in pairs}
        assert terms == {"push", "pull"}
        w = dict(pairs)
        want = w["push"] * 1.0 + w["pull"] * 3.0
        assert block.rows == pytest.approx(np.full((5, 1), want))

    def test_k1_exact_block(self, lexicon, tokens):
        q = lexicon.embedding_of("encircle")
        block, pairs = build_soft_prompt(q, lexicon, tokens, k=1)
        assert pairs == [("encircle", 1.0)]
        assert np.array_equal(block.rows, tokens.token_embeddings("encircle"))
        assert block.fallback_text == "encircle"

    def test_row_count_always_five(self, lexicon, tokens):
        rng = np.random.default_rng(0)
        for _ in range(10):
            q = ActionEmbedding(rng.standard_normal(lexicon.dimension))
            block, _ = build_soft_prompt(q, lexicon, tokens, k=4)
            assert block.rows.shape[0] == 5

    def test_matches_bruteforce_oracle(self, lexicon, tokens):
        rng = np.random.default_rng(77)
        for _ in range(50):
            q = rng.standard_normal(lexicon.dimension)
            block, _ = build_soft_prompt(ActionEmbedding(q), lexicon, tokens, k=4)
            pairs = oracle_topk(
                q.tolist(), [e.vector.tolist() for e in lexicon.embeddings], 4
            )
            want = np.zeros((5, tokens.dimension))
            for i, w in pairs:
                want += w * tokens.token_embeddings(BASE_ACTION_TERMS[i])
            assert np.max(np.abs(block.rows - want)) < 1e-9


class TestGenerateSentence:
    def test_stub_roundtrip(self, settings, lexicon, tokens):
        info = ActionInfo(lexicon.embedding_of("chase"), ActiveCharacter(0))
        prompt = build_story_prompt(settings, info, lexicon, tokens)
        out = generate_sentence(StubTextGenerator(), prompt)
        assert out and out == out.strip()

    def test_trims_whitespace(self):
        g = ScriptedTextGenerator(["  a sentence \n"])
        from symstory.prompts import SoftPrompt

        assert generate_sentence(g, SoftPrompt().text("x")) == "a sentence"

    def test_empty_output_rejected(self):
        g = ScriptedTextGenerator(["   "])
        from symstory.prompts import SoftPrompt

        with pytest.raises(ValueError):
            generate_sentence(g, SoftPrompt().text("x"))


class TestText2Action:
    def test_matches_normalize_and_interpolate_oracle(self, lexicon):
        provider = PseudoEmbeddingProvider(dimension=24, seed=5)
        sentence = "Mira chased Rook across the pier."
        got = text2action(sentence, provider, lexicon, k=2)
        q = provider.embed(sentence).vector
        pairs = oracle_topk(q.tolist(), [e.vector.tolist() for e in lexicon.embeddings], 2)
        want = np.zeros(lexicon.dimension)
        for i, w in pairs:
            want += w * lexicon.embeddings[i].vector
        assert np.max(np.abs(got.vector - want)) < 1e-9

    def test_orthogonal_lexicon_collapse(self):
        # orthogonal base vectors: a sentence mapping exactly onto term A
        # leaves zero similarity for every other term
        dim = len(BASE_ACTION_TERMS)
        embs = []
        for i, term in enumerate(BASE_ACTION_TERMS):
            v = np.zeros(dim)
            v[i] = 1.0
            embs.append(ActionEmbedding(v))
        lex = BaseActionLexicon(BASE_ACTION_TERMS, embs)

        class OneHotProvider:
            dimension = dim

            def embed(self, text):
                return lex.embedding_of("poke")

        got = text2action("anything", OneHotProvider(), lex, k=2)
        assert got.vector == pytest.approx(lex.embedding_of("poke").vector)

    def test_empty_sentence_rejected(self, lexicon):
        with pytest.raises(ValueError):
            text2action("  ", PseudoEmbeddingProvider(dimension=24, seed=5), lexicon)

    def test_deterministic(self, lexicon):
        provider = PseudoEmbeddingProvider(dimension=24, seed=5)
        a = text2action("Rook pulled Mira ashore.", provider, lexicon)
        b = text2action("Rook pulled Mira ashore.", provider, lexicon)
        assert np.array_equal(a.vector, b.vector)


class TestText2Char:
    def test_parses_zero(self, settings, lexicon, tokens):
        gen = ScriptedTextGenerator(["0"])
        got = text2char("s", lexicon.embedding_of("hug"), settings, gen, lexicon, tokens)
        assert got.indicator == 0

    def test_parses_one_with_whitespace(self, settings, lexicon, tokens):
        gen = ScriptedTextGenerator([" 1\n"])
        got = text2char("s", lexicon.embedding_of("hug"), settings, gen, lexicon, tokens)
        assert got.indicator == 1

    def test_prose_reply_raises_with_raw_text(self, settings, lexicon, tokens):
        gen = ScriptedTextGenerator(["the first one"])
        with pytest.raises(ValueError, match="the first one"):
            text2char("s", lexicon.embedding_of("hug"), settings, gen, lexicon, tokens)

    def test_full_text_first_path(self, settings, lexicon, tokens):
        provider = PseudoEmbeddingProvider(dimension=24, seed=5)
        gen = ScriptedTextGenerator(["1"])
        info = text2action_info(
            "Rook dragged the boat in.", provider, settings, gen, lexicon, tokens
        )
        assert info.active.indicator == 1
        assert info.embedding.dimension == lexicon.dimension
        # the A.2 prompt carried the question
        assert "which character is taking" in gen.calls[0]
