"""Deterministic 64-dim image embedding and the distance built on it.

One embedding serves every perceptual-metric role in the project: the
filtering distance, the smoothness distance, and the direction space for
instruction-following scores. The feature layout is fixed:

    [ 0:16]  4x4 average-pooled grayscale
    [16:40]  per-channel soft 8-bin value histograms (R, G, B)
    [40:56]  4x4 average-pooled gradient magnitude of grayscale
    [56:64]  mean R, mean G, mean B, std of grayscale,
             mean saturation, chroma-weighted circular hue mean (cos, sin),
             constant 0 pad

Raw features are z-scored by frozen constants shipped in
``data/zscore_constants.json`` (measured once over a fixed random scene
corpus; see scripts/freeze_embedding_constants.py).
"""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources

import numpy as np

from . import instructions as instr
from .imageio import validate_image
from .scenes import (
    Background,
    EditSpec,
    SceneSpec,
    SceneError,
    ShapePrimitive,
    apply_edit,
    render,
)

EMBED_DIM = 64
_HIST_BINS = 8
_NUM_PROBES = 8


def _pool4(gray: np.ndarray) -> np.ndarray:
    h, w = gray.shape
    return gray.reshape(4, h // 4, 4, w // 4).mean(axis=(1, 3)).reshape(-1)


def _soft_histogram(channel: np.ndarray) -> np.ndarray:
    """Linear-interpolation binning; Lipschitz in the pixel values."""
    x = np.clip(channel.reshape(-1), 0.0, 1.0) * (_HIST_BINS - 1)
    lo = np.floor(x).astype(int)
    hi = np.minimum(lo + 1, _HIST_BINS - 1)
    frac = x - lo
    hist = np.zeros(_HIST_BINS)
    np.add.at(hist, lo, 1.0 - frac)
    np.add.at(hist, hi, frac)
    return hist / x.size


def raw_features(image: np.ndarray) -> np.ndarray:
    """The 64 features before z-scoring."""
    img = validate_image(image).astype(np.float64)
    gray = img.mean(axis=2)

    pooled = _pool4(gray)
    hists = np.concatenate([_soft_histogram(img[..., c]) for c in range(3)])

    gy, gx = np.gradient(gray)
    grad = _pool4(np.hypot(gx, gy))

    means = img.reshape(-1, 3).mean(axis=0)
    std_gray = gray.std()

    mx = img.max(axis=2)
    mn = img.min(axis=2)
    chroma = mx - mn
    sat = np.where(mx > 1e-12, chroma / np.maximum(mx, 1e-12), 0.0)

    r, g, b = img[..., 0], img[..., 1], img[..., 2]
    hue = np.zeros_like(mx)
    nz = chroma > 1e-12
    c = np.where(nz, chroma, 1.0)
    hr = ((g - b) / c) % 6.0
    hg = (b - r) / c + 2.0
    hb = (r - g) / c + 4.0
    hue = np.where(mx == r, hr, np.where(mx == g, hg, hb)) * 60.0
    w = np.where(nz, chroma, 0.0)
    wsum = w.sum()
    if wsum > 1e-12:
        ang = np.radians(hue)
        hue_cos = float((w * np.cos(ang)).sum() / wsum)
        hue_sin = float((w * np.sin(ang)).sum() / wsum)
    else:
        hue_cos = hue_sin = 0.0

    tail = np.array(
        [means[0], means[1], means[2], std_gray, sat.mean(), hue_cos, hue_sin, 0.0]
    )
    feats = np.concatenate([pooled, hists, grad, tail])
    assert feats.shape == (EMBED_DIM,)
    return feats


@lru_cache(maxsize=1)
def zscore_constants() -> tuple[np.ndarray, np.ndarray]:
    text = resources.files("kkedit.data").joinpath("zscore_constants.json").read_text()
    obj = json.loads(text)
    mean = np.asarray(obj["mean"], dtype=np.float64)
    std = np.asarray(obj["std"], dtype=np.float64)
    if mean.shape != (EMBED_DIM,) or std.shape != (EMBED_DIM,):
        raise ValueError("z-score constants have the wrong dimension")
    return mean, np.maximum(std, 1e-6)


def embed(image: np.ndarray) -> np.ndarray:
    """Z-scored 64-dim embedding. Pure function of the pixels."""
    mean, std = zscore_constants()
    return (raw_features(image) - mean) / std


def distance(a: np.ndarray, b: np.ndarray) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"embedding dimension mismatch: {a.shape} vs {b.shape}")
    return float(np.linalg.norm(a - b))


def image_distance(img_a: np.ndarray, img_b: np.ndarray) -> float:
    return distance(embed(img_a), embed(img_b))


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine similarity; zero vectors map to 0 by convention."""
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na < 1e-12 or nb < 1e-12:
        return 0.0
    return float(np.dot(a, b) / (na * nb))


# ---------------------------------------------------------------------------
# Instruction direction embeddings via canonical probe scenes
# ---------------------------------------------------------------------------

_PROBE_CENTERS = [
    (0.5, 0.5), (0.35, 0.4), (0.6, 0.62), (0.42, 0.58),
    (0.55, 0.38), (0.38, 0.55), (0.62, 0.45), (0.5, 0.6),
]


def _probe_pairs(sem: instr.InstructionSemantics) -> list[tuple[SceneSpec, EditSpec]]:
    pairs = []
    for k in range(_NUM_PROBES):
        cu, cv = _PROBE_CENTERS[k]
        if sem.category in ("background_hue", "background_style"):
            if sem.category == "background_hue":
                target_hue = instr.COLOR_HUES[sem.color]
                bg = Background(
                    base_gray=0.45 + 0.05 * (k % 3),
                    hue=(target_hue + 120.0 + 25.0 * k) % 360.0,
                    style=0.55,
                )
                scene = SceneSpec(background=bg)
                edit = EditSpec("background_hue", None, {"hue": target_hue})
            else:
                src, tgt = (0.1, 0.8) if sem.sign > 0 else (0.8, 0.1)
                bg = Background(base_gray=0.45 + 0.05 * (k % 3), hue=45.0 * k % 360.0, style=src)
                scene = SceneSpec(background=bg)
                edit = EditSpec("background_style", None, {"style": tgt})
            pairs.append((scene, edit))
            continue

        kind = sem.shape_kind or instr._KIND_WORDS[k % 3]
        size = 0.14 + 0.02 * (k % 4)
        hue = (37.0 * k + 11.0) % 360.0
        if sem.category == "recolor":
            target_hue = instr.COLOR_HUES[sem.color]
            hue = (target_hue + 90.0 + 25.0 * k) % 360.0
        shape = ShapePrimitive(
            kind=kind, center=(cu, cv), size=size, hue=hue,
            saturation=0.9, edge_softness=0.2,
        )
        scene = SceneSpec(shapes=(shape,))

        if sem.category == "recolor":
            edit = EditSpec("recolor", 0, {"hue": instr.COLOR_HUES[sem.color]})
        elif sem.category == "resize":
            limit = min(0.5, cu, cv, 1.0 - cu, 1.0 - cv)
            tgt = min(limit, size * 1.7) if sem.sign > 0 else size * 0.45
            edit = EditSpec("resize", 0, {"size": tgt})
        elif sem.category == "desaturate":
            edit = EditSpec("desaturate", 0, {"saturation": 0.05})
        elif sem.category == "soften":
            shape = ShapePrimitive(
                kind=kind, center=(cu, cv), size=size, hue=hue,
                saturation=0.9, edge_softness=0.02,
            )
            scene = SceneSpec(shapes=(shape,))
            edit = EditSpec("soften", 0, {"edge_softness": 0.9})
        elif sem.category == "move":
            step = 0.22
            du = {"left": -step, "right": step}.get(sem.direction, 0.0)
            dv = {"up": -step, "down": step}.get(sem.direction, 0.0)
            tu = float(np.clip(cu + du, size, 1.0 - size))
            tv = float(np.clip(cv + dv, size, 1.0 - size))
            edit = EditSpec("move", 0, {"center": (tu, tv)})
        else:
            raise SceneError(f"no probe construction for category {sem.category}")
        pairs.append((scene, edit))
    return pairs


@lru_cache(maxsize=256)
def _edit_direction_cached(tokens: tuple[int, ...]) -> tuple[float, ...]:
    sem = instr.parse_instruction(tokens)
    acc = np.zeros(EMBED_DIM)
    for scene, edit in _probe_pairs(sem):
        src = embed(render(scene))
        full = embed(render(apply_edit(scene, edit, 1.0)))
        acc += full - src
    acc /= _NUM_PROBES
    norm = np.linalg.norm(acc)
    if norm < 1e-12:
        raise SceneError("degenerate probe set: zero mean direction")
    return tuple(acc / norm)


def edit_direction(instruction: tuple[int, ...]) -> np.ndarray:
    """Unit direction in embedding space associated with an instruction."""
    return np.asarray(_edit_direction_cached(tuple(instruction)))
