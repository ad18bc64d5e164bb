import numpy as np
import pytest

from symstory.prompts import (
    PAD_TOKENS,
    SoftPrompt,
    StorySettings,
    TextSegment,
    VectorsSegment,
    active_character_prompt,
    parse_character_reply,
    story_sentence_prompt,
)

from golden_oracle import (
    ACTION_PLACEHOLDER,
    FOLLOWING,
    GOLDEN_DIR,
    HISTORY,
    SENTENCE,
    SETTINGS,
    USER_PROMPT,
    combo_name,
)


@pytest.fixture
def settings():
    return StorySettings(
        name0=SETTINGS["name0"],
        name1=SETTINGS["name1"],
        description0=SETTINGS["description0"],
        description1=SETTINGS["description1"],
        scene=SETTINGS["scene"],
    )


def _block():
    return VectorsSegment(np.zeros((PAD_TOKENS, 4)), fallback_text="hug")


@pytest.mark.parametrize("history", [False, True])
@pytest.mark.parametrize("following", [False, True])
@pytest.mark.parametrize("escape", [False, True])
@pytest.mark.parametrize("user", [False, True])
def test_story_template_matches_golden(settings, history, following, escape, user):
    top_terms = ["escape", "chase"] if escape else ["hug", "kiss"]
    prompt = story_sentence_prompt(
        settings,
        active=0,
        action_block=_block(),
        history=HISTORY if history else (),
        following=FOLLOWING if following else (),
        top_terms=top_terms,
        user_prompt=USER_PROMPT if user else None,
    )
    got = prompt.render_text(vectors_as=ACTION_PLACEHOLDER)
    want = (GOLDEN_DIR / combo_name(history, following, escape, user)).read_text()
    assert got == want


def test_char_template_matches_golden(settings):
    prompt = active_character_prompt(settings, SENTENCE, _block())
    got = prompt.render_text(vectors_as=ACTION_PLACEHOLDER)
    assert got == (GOLDEN_DIR / "active_char.txt").read_text()


def test_active_one_swaps_agent(settings):
    prompt = story_sentence_prompt(settings, active=1, action_block=_block())
    text = prompt.render_text(vectors_as="{action}")
    assert "Rook should actively do the below action" in text
    assert "while Mira usually being the subject of Rook's action" in text
    # header order never changes
    assert text.index("- Mira:") < text.index("- Rook:")


def test_evasive_terms_trigger_set(settings):
    for term in ("avoid", "escape", "ignore", "leave"):
        prompt = story_sentence_prompt(
            settings, active=0, action_block=_block(), top_terms=[term]
        )
        assert "Only if the action is close to" in prompt.render_text()
    prompt = story_sentence_prompt(
        settings, active=0, action_block=_block(), top_terms=["chase", "hug"]
    )
    assert "Only if the action is close to" not in prompt.render_text()


class TestSoftPrompt:
    def test_vectors_block_must_have_five_rows(self):
        with pytest.raises(ValueError):
            VectorsSegment(np.zeros((4, 8)))
        VectorsSegment(np.zeros((5, 8)))  # exact row count passes

    def test_render_uses_fallback_term(self):
        p = SoftPrompt()
        p.text("Action: ").vectors(np.zeros((5, 2)), fallback_text="poke")
        assert p.render_text() == "Action: poke"

    def test_wire_format(self):
        p = SoftPrompt()
        p.text("hi ").vectors(np.ones((5, 2)))
        wire = p.to_wire()
        assert wire[0] == {"type": "text", "value": "hi "}
        assert wire[1]["type"] == "vectors"
        assert len(wire[1]["rows"]) == 5


class TestSettings:
    def test_names_must_differ(self):
        with pytest.raises(ValueError):
            StorySettings(name0="A", name1="A")

    def test_names_must_be_nonempty(self):
        with pytest.raises(ValueError):
            StorySettings(name0="", name1="B")

    def test_roundtrip(self, settings):
        assert StorySettings.from_dict(settings.to_dict()) == settings


class TestParseReply:
    def test_zero(self):
        assert parse_character_reply("0") == 0

    def test_one_with_whitespace(self):
        assert parse_character_reply(" 1\n") == 1

    def test_prose_rejected(self):
        with pytest.raises(ValueError, match="the first one"):
            parse_character_reply("the first one")
