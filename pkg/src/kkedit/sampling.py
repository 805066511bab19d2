"""Random scene/edit generators used by dataset building and calibration.

Edits are drawn with a floor on their magnitude so that legitimate samples
are well separated from no-op failures.
"""

from __future__ import annotations

import numpy as np

from .scenes import (
    Background,
    EditSpec,
    SceneSpec,
    ShapePrimitive,
    SHAPE_KINDS,
    EDIT_CATEGORIES,
)


def _random_shape(rng: np.random.Generator, low_softness: bool = False) -> ShapePrimitive:
    size = float(rng.uniform(0.10, 0.20))
    cu = float(rng.uniform(size + 0.02, 1.0 - size - 0.02))
    cv = float(rng.uniform(size + 0.02, 1.0 - size - 0.02))
    return ShapePrimitive(
        kind=str(rng.choice(SHAPE_KINDS)),
        center=(cu, cv),
        size=size,
        hue=float(rng.uniform(0.0, 360.0)),
        saturation=float(rng.uniform(0.7, 1.0)),
        edge_softness=float(rng.uniform(0.0, 0.25)) if low_softness else float(rng.uniform(0.0, 0.6)),
    )


def random_scene(rng: np.random.Generator, category: str | None = None) -> SceneSpec:
    """A random scene, biased so the given edit category has room to act."""
    num_shapes = int(rng.integers(1, 4))
    if category in ("background_hue", "background_style") and rng.random() < 0.3:
        num_shapes = int(rng.integers(0, 3))
    low_softness = category == "soften"
    shapes = tuple(_random_shape(rng, low_softness) for _ in range(num_shapes))
    style = float(rng.uniform(0.0, 0.5))
    if category == "background_hue":
        style = float(rng.uniform(0.4, 0.9))
    elif category == "background_style":
        style = float(rng.uniform(0.0, 0.2)) if rng.random() < 0.5 else float(rng.uniform(0.7, 1.0))
    return SceneSpec(
        shapes=shapes,
        background=Background(
            base_gray=float(rng.uniform(0.3, 0.7)),
            hue=float(rng.uniform(0.0, 360.0)),
            style=style,
        ),
    )


def random_edit(rng: np.random.Generator, scene: SceneSpec, category: str) -> EditSpec:
    """An edit of the given category with non-trivial magnitude."""
    if category == "background_hue":
        target = (scene.background.hue + float(rng.uniform(90.0, 180.0)) * float(rng.choice([-1, 1]))) % 360.0
        return EditSpec("background_hue", None, {"hue": target})
    if category == "background_style":
        if scene.background.style < 0.5:
            target = float(rng.uniform(0.7, 1.0))
        else:
            target = float(rng.uniform(0.0, 0.2))
        return EditSpec("background_style", None, {"style": target})

    idx = int(rng.integers(len(scene.shapes)))
    shape = scene.shapes[idx]
    if category == "recolor":
        target = (shape.hue + float(rng.uniform(70.0, 180.0)) * float(rng.choice([-1, 1]))) % 360.0
        return EditSpec("recolor", idx, {"hue": target})
    if category == "resize":
        u, v = shape.center
        limit = min(0.5, u, v, 1.0 - u, 1.0 - v)
        grow = limit >= shape.size * 1.5 and rng.random() < 0.5
        if grow:
            target = float(min(limit, shape.size * rng.uniform(1.5, 1.9)))
        else:
            target = float(shape.size * rng.uniform(0.4, 0.6))
        return EditSpec("resize", idx, {"size": target})
    if category == "desaturate":
        return EditSpec("desaturate", idx, {"saturation": float(rng.uniform(0.0, 0.15))})
    if category == "soften":
        return EditSpec("soften", idx, {"edge_softness": float(rng.uniform(0.75, 1.0))})
    if category == "move":
        step = float(rng.uniform(0.18, 0.3))
        angle = float(rng.uniform(0.0, 2.0 * np.pi))
        m = shape.size + 0.01
        tu = float(np.clip(shape.center[0] + step * np.cos(angle), m, 1.0 - m))
        tv = float(np.clip(shape.center[1] + step * np.sin(angle), m, 1.0 - m))
        return EditSpec("move", idx, {"center": (tu, tv)})
    raise ValueError(f"unknown category {category!r}")


def random_scene_edit(rng: np.random.Generator) -> tuple[SceneSpec, EditSpec, str]:
    """Sample a category, then a compatible (scene, edit) pair."""
    category = str(rng.choice(EDIT_CATEGORIES))
    scene = random_scene(rng, category)
    if category not in ("background_hue", "background_style") and not scene.shapes:
        scene = random_scene(rng, "recolor")
    edit = random_edit(rng, scene, category)
    return scene, edit, category
