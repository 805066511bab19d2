"""Parametric toy scenes: rendering, graded edits, and trajectory synthesis.

A scene is a handful of soft-edged shapes over a tinted background. Every
image in the project is produced by `render`, and every edit is a linear
interpolation of scene attributes, so ground-truth trajectories at any
strength are exact and free.
"""

from __future__ import annotations

import colorsys
import math
from dataclasses import dataclass, field, replace

import numpy as np

MAX_SHAPES = 4
SHAPE_KINDS = ("circle", "square", "triangle")

EDIT_CATEGORIES = (
    "recolor",
    "resize",
    "desaturate",
    "soften",
    "background_style",
    "background_hue",
    "move",
)

# Attribute group touched by each category; "center" covers both coordinates.
_CATEGORY_ATTRS = {
    "recolor": ("hue",),
    "resize": ("size",),
    "desaturate": ("saturation",),
    "soften": ("edge_softness",),
    "background_style": ("style",),
    "background_hue": ("hue",),
    "move": ("center",),
}

_BACKGROUND_CATEGORIES = ("background_style", "background_hue")


class SceneError(ValueError):
    """Invalid scene, shape, or edit parameters."""


@dataclass(frozen=True)
class ShapePrimitive:
    kind: str
    center: tuple[float, float]
    size: float
    hue: float
    saturation: float
    edge_softness: float

    def validate(self) -> None:
        if self.kind not in SHAPE_KINDS:
            raise SceneError(f"unknown shape kind {self.kind!r}")
        u, v = self.center
        if not (0.0 <= u <= 1.0 and 0.0 <= v <= 1.0):
            raise SceneError(f"center {self.center} outside the unit square")
        if not (0.0 < self.size <= 0.5):
            raise SceneError(f"size {self.size} outside (0, 0.5]")
        if self.size > min(u, v, 1.0 - u, 1.0 - v) + 1e-12:
            raise SceneError(
                f"shape of size {self.size} at {self.center} leaves the unit square"
            )
        if not (0.0 <= self.hue < 360.0):
            raise SceneError(f"hue {self.hue} outside [0, 360)")
        if not (0.0 <= self.saturation <= 1.0):
            raise SceneError(f"saturation {self.saturation} outside [0, 1]")
        if not (0.0 <= self.edge_softness <= 1.0):
            raise SceneError(f"edge_softness {self.edge_softness} outside [0, 1]")

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "center": list(self.center),
            "size": self.size,
            "hue": self.hue,
            "saturation": self.saturation,
            "edge_softness": self.edge_softness,
        }

    @staticmethod
    def from_json(obj: dict) -> "ShapePrimitive":
        shape = ShapePrimitive(
            kind=obj["kind"],
            center=(float(obj["center"][0]), float(obj["center"][1])),
            size=float(obj["size"]),
            hue=float(obj["hue"]),
            saturation=float(obj["saturation"]),
            edge_softness=float(obj["edge_softness"]),
        )
        shape.validate()
        return shape


@dataclass(frozen=True)
class Background:
    base_gray: float = 0.5
    hue: float = 0.0
    style: float = 0.0

    def validate(self) -> None:
        if not (0.0 <= self.base_gray <= 1.0):
            raise SceneError(f"base_gray {self.base_gray} outside [0, 1]")
        if not (0.0 <= self.hue < 360.0):
            raise SceneError(f"background hue {self.hue} outside [0, 360)")
        if not (0.0 <= self.style <= 1.0):
            raise SceneError(f"style {self.style} outside [0, 1]")

    def to_json(self) -> dict:
        return {"base_gray": self.base_gray, "hue": self.hue, "style": self.style}

    @staticmethod
    def from_json(obj: dict) -> "Background":
        bg = Background(
            base_gray=float(obj["base_gray"]),
            hue=float(obj["hue"]),
            style=float(obj["style"]),
        )
        bg.validate()
        return bg


@dataclass(frozen=True)
class SceneSpec:
    shapes: tuple[ShapePrimitive, ...] = ()
    background: Background = field(default_factory=Background)

    def validate(self) -> None:
        if len(self.shapes) > MAX_SHAPES:
            raise SceneError(f"at most {MAX_SHAPES} shapes allowed")
        for shape in self.shapes:
            shape.validate()
        self.background.validate()

    def to_json(self) -> dict:
        return {
            "shapes": [s.to_json() for s in self.shapes],
            "background": self.background.to_json(),
        }

    @staticmethod
    def from_json(obj: dict) -> "SceneSpec":
        scene = SceneSpec(
            shapes=tuple(ShapePrimitive.from_json(s) for s in obj["shapes"]),
            background=Background.from_json(obj["background"]),
        )
        scene.validate()
        return scene


@dataclass(frozen=True)
class EditSpec:
    """One graded edit: which attribute group moves and where it lands.

    `attribute_delta` maps attribute names to target values. `target_index`
    is the shape index for object edits and None for background edits.
    """

    category: str
    target_index: int | None
    attribute_delta: dict

    def validate(self, scene: SceneSpec) -> None:
        if self.category not in EDIT_CATEGORIES:
            raise SceneError(f"unknown edit category {self.category!r}")
        allowed = _CATEGORY_ATTRS[self.category]
        extra = set(self.attribute_delta) - set(allowed)
        if extra:
            raise SceneError(f"{self.category} edit may not touch {sorted(extra)}")
        if not self.attribute_delta:
            raise SceneError("attribute_delta is empty")
        if self.category in _BACKGROUND_CATEGORIES:
            if self.target_index is not None:
                raise SceneError("background edits take target_index=None")
        else:
            if self.target_index is None:
                raise SceneError(f"{self.category} edit needs a target shape index")
            if not (0 <= self.target_index < len(scene.shapes)):
                raise SceneError(
                    f"target_index {self.target_index} out of range for "
                    f"{len(scene.shapes)} shapes"
                )
            shape = scene.shapes[self.target_index]
            if "size" in self.attribute_delta:
                target = float(self.attribute_delta["size"])
                u, v = shape.center
                if not (0.0 < target <= min(0.5, u, v, 1.0 - u, 1.0 - v) + 1e-12):
                    raise SceneError(f"target size {target} invalid at {shape.center}")
            if "center" in self.attribute_delta:
                tu, tv = self.attribute_delta["center"]
                margin = shape.size
                if not (margin <= tu <= 1.0 - margin and margin <= tv <= 1.0 - margin):
                    raise SceneError(f"target center {(tu, tv)} leaves the unit square")
        for attr in ("hue",):
            if attr in self.attribute_delta:
                h = float(self.attribute_delta[attr])
                if not (0.0 <= h < 360.0):
                    raise SceneError(f"target hue {h} outside [0, 360)")
        for attr in ("saturation", "edge_softness", "style"):
            if attr in self.attribute_delta:
                x = float(self.attribute_delta[attr])
                if not (0.0 <= x <= 1.0):
                    raise SceneError(f"target {attr} {x} outside [0, 1]")

    def to_json(self) -> dict:
        delta = {
            k: (list(v) if isinstance(v, (tuple, list)) else v)
            for k, v in self.attribute_delta.items()
        }
        return {
            "category": self.category,
            "target_index": self.target_index,
            "attribute_delta": delta,
        }

    @staticmethod
    def from_json(obj: dict) -> "EditSpec":
        delta = dict(obj["attribute_delta"])
        if "center" in delta:
            delta["center"] = (float(delta["center"][0]), float(delta["center"][1]))
        return EditSpec(
            category=obj["category"],
            target_index=obj["target_index"],
            attribute_delta=delta,
        )


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------

def _hsv_to_rgb(h_deg: float, s: float, v) -> np.ndarray:
    """HSV to RGB; v may be an array for per-pixel value maps."""
    h = (h_deg % 360.0) / 60.0
    i = int(h) % 6
    f = h - int(h)
    v = np.asarray(v, dtype=np.float64)
    p = v * (1.0 - s)
    q = v * (1.0 - s * f)
    t = v * (1.0 - s * (1.0 - f))
    lut = [(v, t, p), (q, v, p), (p, v, t), (p, q, v), (t, p, v), (v, p, q)]
    r, g, b = lut[i]
    return np.stack(np.broadcast_arrays(r, g, b), axis=-1)


def _signed_distance(shape: ShapePrimitive, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    cu, cv = shape.center
    du, dv = u - cu, v - cv
    if shape.kind == "circle":
        return np.hypot(du, dv) - shape.size
    if shape.kind == "square":
        return np.maximum(np.abs(du), np.abs(dv)) - shape.size
    # Equilateral triangle pointing up, circumradius = size. Interior-exact
    # half-plane SDF; slightly conservative near vertices, fine for AA.
    r = shape.size
    verts = [
        (cu, cv - r),
        (cu + r * math.sin(math.radians(120)), cv - r * math.cos(math.radians(120))),
        (cu + r * math.sin(math.radians(240)), cv - r * math.cos(math.radians(240))),
    ]
    sd = np.full_like(du, -np.inf)
    for k in range(3):
        ax, ay = verts[k]
        bx, by = verts[(k + 1) % 3]
        ex, ey = bx - ax, by - ay
        norm = math.hypot(ex, ey)
        # outward normal of edge a->b for counterclockwise winding in (u, v-down)
        nx, ny = ey / norm, -ex / norm
        sd = np.maximum(sd, (u - ax) * nx + (v - ay) * ny)
    return sd


def render(scene: SceneSpec, resolution: int = 32):
    """Rasterize a scene deterministically. Returns float32 (H, W, 3) in [0, 1]."""
    if not isinstance(resolution, int) or resolution <= 0:
        raise SceneError(f"resolution must be a positive int, got {resolution!r}")
    scene.validate()

    coords = (np.arange(resolution, dtype=np.float64) + 0.5) / resolution
    u, v = np.meshgrid(coords, coords)  # u: column/x, v: row/y

    bg = scene.background
    pattern_value = 0.5 + 0.35 * np.sin(2.0 * np.pi * (u + v))
    tint = _hsv_to_rgb(bg.hue, 1.0, pattern_value)
    img = (1.0 - bg.style) * bg.base_gray + bg.style * tint

    for shape in scene.shapes:
        sd = _signed_distance(shape, u, v)
        width = max(1.0 / resolution, 0.5 * shape.edge_softness * shape.size)
        coverage = np.clip(0.5 - sd / width, 0.0, 1.0)[..., None]
        color = np.array(
            colorsys.hsv_to_rgb(shape.hue / 360.0, shape.saturation, 1.0),
            dtype=np.float64,
        )
        img = (1.0 - coverage) * img + coverage * color

    return np.clip(img, 0.0, 1.0).astype(np.float32)


# ---------------------------------------------------------------------------
# Edits
# ---------------------------------------------------------------------------

def interpolate_hue(src: float, tgt: float, s: float) -> float:
    """Interpolate along the shorter hue arc; 180-degree ties go increasing."""
    diff = (tgt - src + 180.0) % 360.0 - 180.0
    if diff == -180.0:
        diff = 180.0
    return (src + s * diff) % 360.0


def _lerp(a: float, b: float, s: float) -> float:
    return a + s * (b - a)


def apply_edit(scene: SceneSpec, edit: EditSpec, s: float) -> SceneSpec:
    """Realize a fraction `s` of the edit. s=0 is the identity, s=1 the full edit.

    Strengths above 1 extrapolate linearly and are clamped back into valid
    attribute ranges so the returned scene always renders.
    """
    if s < 0:
        raise SceneError(f"strength must be nonnegative, got {s}")
    scene.validate()
    edit.validate(scene)
    if s == 0:
        return scene

    delta = edit.attribute_delta
    if edit.category == "background_hue":
        bg = replace(
            scene.background,
            hue=interpolate_hue(scene.background.hue, float(delta["hue"]), s),
        )
        return replace(scene, background=bg)
    if edit.category == "background_style":
        style = _lerp(scene.background.style, float(delta["style"]), s)
        bg = replace(scene.background, style=float(np.clip(style, 0.0, 1.0)))
        return replace(scene, background=bg)

    shape = scene.shapes[edit.target_index]
    if edit.category == "recolor":
        new = replace(shape, hue=interpolate_hue(shape.hue, float(delta["hue"]), s))
    elif edit.category == "resize":
        size = _lerp(shape.size, float(delta["size"]), s)
        u, c_v = shape.center
        limit = min(0.5, u, c_v, 1.0 - u, 1.0 - c_v)
        new = replace(shape, size=float(np.clip(size, 1e-4, limit)))
    elif edit.category == "desaturate":
        sat = _lerp(shape.saturation, float(delta["saturation"]), s)
        new = replace(shape, saturation=float(np.clip(sat, 0.0, 1.0)))
    elif edit.category == "soften":
        soft = _lerp(shape.edge_softness, float(delta["edge_softness"]), s)
        new = replace(shape, edge_softness=float(np.clip(soft, 0.0, 1.0)))
    elif edit.category == "move":
        tu, tv = delta["center"]
        nu = _lerp(shape.center[0], float(tu), s)
        nv = _lerp(shape.center[1], float(tv), s)
        m = shape.size
        nu = float(np.clip(nu, m, 1.0 - m))
        nv = float(np.clip(nv, m, 1.0 - m))
        new = replace(shape, center=(nu, nv))
    else:  # pragma: no cover - validate() already rejects
        raise SceneError(f"unhandled category {edit.category}")

    shapes = list(scene.shapes)
    shapes[edit.target_index] = new
    return replace(scene, shapes=tuple(shapes))
