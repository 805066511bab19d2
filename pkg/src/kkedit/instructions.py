"""Template instructions over a closed vocabulary.

Instructions are short word sequences ("make the circle red") produced by
deterministic template fill. The vocabulary is closed and small so that
instructions can be tokenized for the model and parsed back into their
semantic fields (category, target shape kind, target descriptor) for
probe-based direction embeddings.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .scenes import EditSpec, SceneSpec, SceneError

PAD_TOKEN = "<pad>"
MAX_INSTRUCTION_LEN = 16

# hue-name centers on the color wheel, degrees
COLOR_HUES = {
    "red": 0.0,
    "orange": 30.0,
    "yellow": 60.0,
    "green": 120.0,
    "cyan": 180.0,
    "blue": 240.0,
    "purple": 280.0,
    "magenta": 320.0,
}

_COLOR_WORDS = tuple(COLOR_HUES)
_KIND_WORDS = ("circle", "square", "triangle")
_DIR_WORDS = ("left", "right", "up", "down")

_TEMPLATES = {
    "recolor": [
        "make the {kind} {color}",
        "turn the {kind} {color}",
        "recolor the {kind} to {color}",
        "paint the {kind} {color}",
    ],
    "resize_grow": [
        "make the {kind} bigger",
        "grow the {kind}",
        "enlarge the {kind}",
    ],
    "resize_shrink": [
        "make the {kind} smaller",
        "shrink the {kind}",
        "reduce the {kind}",
    ],
    "desaturate": [
        "desaturate the {kind}",
        "mute the {kind} colors",
        "wash out the {kind}",
        "fade the {kind}",
    ],
    "soften": [
        "soften the {kind} edges",
        "blur the {kind} outline",
        "smooth the {kind} edges",
    ],
    "background_style_up": [
        "add pattern to the background",
        "make the background more patterned",
        "boost the background style",
    ],
    "background_style_down": [
        "flatten the background",
        "make the background plainer",
        "reduce the background style",
    ],
    "background_hue": [
        "tint the background {color}",
        "shift the background toward {color}",
        "make the background {color}",
    ],
    "move": [
        "move the {kind} {dir}",
        "slide the {kind} {dir}",
        "push the {kind} {dir}",
    ],
}


def _build_vocab() -> tuple[str, ...]:
    words: list[str] = [PAD_TOKEN]
    seen = {PAD_TOKEN}
    for family in _TEMPLATES.values():
        for template in family:
            for word in template.split():
                if word.startswith("{"):
                    continue
                if word not in seen:
                    seen.add(word)
                    words.append(word)
    for group in (_KIND_WORDS, _COLOR_WORDS, _DIR_WORDS):
        for word in group:
            if word not in seen:
                seen.add(word)
                words.append(word)
    return tuple(words)


VOCAB: tuple[str, ...] = _build_vocab()
VOCAB_SIZE = len(VOCAB)
TOKEN_IDS = {word: i for i, word in enumerate(VOCAB)}
PAD_ID = TOKEN_IDS[PAD_TOKEN]

assert VOCAB_SIZE <= 256, "vocabulary must stay closed and small"


def hue_to_color_name(hue: float) -> str:
    """Nearest named color on the wheel (circular distance)."""
    hue = hue % 360.0
    best, best_d = "red", 361.0
    for name, center in COLOR_HUES.items():
        d = abs((hue - center + 180.0) % 360.0 - 180.0)
        if d < best_d:
            best, best_d = name, d
    return best


def encode(words: list[str]) -> tuple[int, ...]:
    try:
        return tuple(TOKEN_IDS[w] for w in words)
    except KeyError as exc:
        raise SceneError(f"word outside the closed vocabulary: {exc}") from exc


def decode_string(tokens: tuple[int, ...]) -> str:
    return " ".join(VOCAB[t] for t in tokens if t != PAD_ID)


def _template_key(edit: EditSpec, scene: SceneSpec) -> str:
    if edit.category == "resize":
        src = scene.shapes[edit.target_index].size
        tgt = float(edit.attribute_delta["size"])
        return "resize_grow" if tgt >= src else "resize_shrink"
    if edit.category == "background_style":
        src = scene.background.style
        tgt = float(edit.attribute_delta["style"])
        return "background_style_up" if tgt >= src else "background_style_down"
    return edit.category


def _move_direction(edit: EditSpec, scene: SceneSpec) -> str:
    shape = scene.shapes[edit.target_index]
    tu, tv = edit.attribute_delta["center"]
    du = float(tu) - shape.center[0]
    dv = float(tv) - shape.center[1]
    if abs(du) >= abs(dv):
        return "right" if du >= 0 else "left"
    return "down" if dv >= 0 else "up"


def generate_instruction(edit: EditSpec, scene: SceneSpec, seed: int) -> tuple[int, ...]:
    """Deterministic template fill. Same (edit, scene, seed) gives same tokens."""
    edit.validate(scene)
    key = _template_key(edit, scene)
    rng = random.Random(f"{key}:{seed}")
    template = rng.choice(_TEMPLATES[key])

    fields = {}
    if "{kind}" in template:
        fields["kind"] = scene.shapes[edit.target_index].kind
    if "{color}" in template:
        fields["color"] = hue_to_color_name(float(edit.attribute_delta["hue"]))
    if "{dir}" in template:
        fields["dir"] = _move_direction(edit, scene)
    words = template.format(**fields).split()
    if len(words) > MAX_INSTRUCTION_LEN:
        raise SceneError("instruction exceeds the maximum token length")
    return encode(words)


@dataclass(frozen=True)
class InstructionSemantics:
    """Semantic fields recovered from an instruction's tokens."""

    category: str
    shape_kind: str | None = None
    color: str | None = None
    direction: str | None = None
    sign: int = +1  # +1 grow/boost, -1 shrink/flatten for resize and style edits


def parse_instruction(tokens: tuple[int, ...]) -> InstructionSemantics:
    """Recover (category, kind, target descriptor) from template tokens."""
    words = [VOCAB[t] for t in tokens if t != PAD_ID]
    wordset = set(words)
    kind = next((w for w in words if w in _KIND_WORDS), None)
    color = next((w for w in words if w in _COLOR_WORDS), None)
    direction = next((w for w in words if w in _DIR_WORDS), None)

    if "background" in wordset:
        if color is not None:
            return InstructionSemantics("background_hue", color=color)
        sign = -1 if wordset & {"flatten", "plainer", "reduce"} else +1
        return InstructionSemantics("background_style", sign=sign)
    if color is not None:
        return InstructionSemantics("recolor", shape_kind=kind, color=color)
    if wordset & {"bigger", "grow", "enlarge"}:
        return InstructionSemantics("resize", shape_kind=kind, sign=+1)
    if wordset & {"smaller", "shrink", "reduce"}:
        return InstructionSemantics("resize", shape_kind=kind, sign=-1)
    if wordset & {"desaturate", "mute", "wash", "fade"}:
        return InstructionSemantics("desaturate", shape_kind=kind)
    if wordset & {"soften", "blur", "smooth"}:
        return InstructionSemantics("soften", shape_kind=kind)
    if direction is not None:
        return InstructionSemantics("move", shape_kind=kind, direction=direction)
    raise SceneError(f"unparseable instruction: {' '.join(words)!r}")
