"""Independent transcription of the two prompt templates.

This renderer is written directly from the template text, separately from
the engine's implementation, and is used only to produce/refresh the golden
files under tests/golden/prompts/. Run as a script to regenerate them.
"""
from pathlib import Path

GOLDEN_DIR = Path(__file__).parent / "golden" / "prompts"

SETTINGS = {
    "name0": "Mira",
    "name1": "Rook",
    "description0": "a wary scout with quick hands",
    "description1": "a patient hunter who rarely speaks",
    "scene": "An abandoned lighthouse on a storm-beaten cliff.",
}

HISTORY = ["Mira crept along the rocks.", "Rook watched from the shadows."]
FOLLOWING = ["The storm finally broke over the cliff."]
USER_PROMPT = "Make it suspenseful."
SENTENCE = "Mira lunged for the lantern before Rook could react."
ACTION_PLACEHOLDER = "{action}"


def render_story_template(
    names, active, history_text, following_text, escape_clause, user_prompt, action
):
    name0, desc0 = names["name0"], names["description0"]
    name1, desc1 = names["name1"], names["description1"]
    scene = names["scene"]
    agent = name0 if active == 0 else name1
    other = name1 if active == 0 else name0
    s = (
        "My story has the following characters:\n"
        "- " + name0 + ": " + desc0 + "\n"
        "- " + name1 + ": " + desc1 + "\n"
        "\n"
        "The overall description of the scene is given below:\n" + scene + "\n"
    )
    if history_text:
        s += "\nThe previous story look like below: " + history_text + "\n"
    if following_text:
        s += (
            "\nNote that after the sentence you are going to write, below sentences "
            "will follow. That is, your sentence will come before the following "
            "sentences: " + following_text + "\n"
        )
    s += (
        "\n-----\n"
        "Task:\n"
        "Without preamble, write a story sentence that continues the previous story "
        "into an interesting way. The sentence should be fewer than 30 words. In the "
        "story sentence to write, " + agent + " should actively do the below action, "
        "while " + other + " usually being the subject of " + agent + "'s action "
        "(e.g., for 'throw', " + agent + " throws " + other + ", for 'approach', "
        + agent + " approaches " + other + ").\n"
    )
    if escape_clause:
        s += (
            "Only if the action is close to [escape, leave, avoid, ignore], "
            + other + " should cause " + agent + " to take the action, like chasing "
            "or bothering " + agent + ".\n"
        )
    s += "Action: " + action
    if user_prompt:
        s += (
            "\n\nTry to consider following instruction also when writing the "
            "sentence (but prioritize the action that characters should take): "
            + user_prompt
        )
    return s


def render_char_template(names, sentence, action):
    return (
        "My story has the following characters:\n"
        "- character_0: " + names["name0"] + "\n"
        "- character_1: " + names["name1"] + "\n"
        "Consider this sentence: " + sentence + "\n"
        "\n"
        "Regarding this sentence, which character is taking the following action?\n"
        "Action: " + action + "\n"
        "\n"
        "Answer with a number 0 or 1, without any preamble."
    )


def combo_name(history, following, escape, user):
    return f"story_h{int(history)}_f{int(following)}_e{int(escape)}_u{int(user)}.txt"


def write_goldens():
    GOLDEN_DIR.mkdir(parents=True, exist_ok=True)
    for h in (False, True):
        for f in (False, True):
            for e in (False, True):
                for u in (False, True):
                    text = render_story_template(
                        SETTINGS,
                        active=0,
                        history_text=" ".join(HISTORY) if h else "",
                        following_text=" ".join(FOLLOWING) if f else "",
                        escape_clause=e,
                        user_prompt=USER_PROMPT if u else None,
                        action=ACTION_PLACEHOLDER,
                    )
                    (GOLDEN_DIR / combo_name(h, f, e, u)).write_text(text)
    (GOLDEN_DIR / "active_char.txt").write_text(
        render_char_template(SETTINGS, SENTENCE, ACTION_PLACEHOLDER)
    )


if __name__ == "__main__":
    write_goldens()
    print(f"wrote goldens to {GOLDEN_DIR}")
