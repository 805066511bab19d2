"""Trajectory evaluation: smoothness, directional alignment, identity decay.

First-order smoothness is the largest normalized adjacent jump; second-order
smoothness is the largest normalized triangle deficit. The headline
`smoothness` score is the second-order value computed under the semantic
embedding distance.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import embedding

Distance = Callable[[np.ndarray, np.ndarray], float]

EPS_DENOMINATOR = 1e-9


class DegenerateTrajectoryError(ValueError):
    """Trajectory has no measurable motion (all frames coincide)."""


@dataclass
class SmoothnessReport:
    delta1: float
    delta2: float
    adjacent_deltas: list[float]
    triangle_deficits: list[float]
    path_length: float
    skipped_terms: int = 0

    def to_json(self) -> dict:
        return {
            "delta1": self.delta1,
            "delta2": self.delta2,
            "adjacent_deltas": self.adjacent_deltas,
            "triangle_deficits": self.triangle_deficits,
            "path_length": self.path_length,
            "skipped_terms": self.skipped_terms,
        }


@dataclass
class DirectionalReport:
    per_strength: list[float]
    aggregate: float

    def to_json(self) -> dict:
        return {"per_strength": self.per_strength, "aggregate": self.aggregate}


@dataclass
class IdentityCurve:
    strengths: list[float]
    similarity: list[float]

    def to_json(self) -> dict:
        return {"strengths": self.strengths, "similarity": self.similarity}


def _embed_all(frames: Sequence[np.ndarray]) -> list[np.ndarray]:
    return [embedding.embed(f) for f in frames]


def first_order_smoothness(
    embeddings: Sequence[np.ndarray], dist: Distance = embedding.distance
) -> SmoothnessReport:
    """Max adjacent jump normalized by path length."""
    if len(embeddings) < 2:
        raise ValueError("need at least 2 frames")
    deltas = [dist(embeddings[i], embeddings[i + 1]) for i in range(len(embeddings) - 1)]
    length = float(sum(deltas))
    if length <= 0.0:
        raise DegenerateTrajectoryError("all frames identical: path length is zero")
    return SmoothnessReport(
        delta1=max(deltas) / length,
        delta2=float("nan"),
        adjacent_deltas=deltas,
        triangle_deficits=[],
        path_length=length,
    )


def second_order_smoothness(
    embeddings: Sequence[np.ndarray], dist: Distance = embedding.distance
) -> SmoothnessReport:
    """Max normalized triangle deficit over consecutive frame triples."""
    if len(embeddings) < 3:
        raise ValueError("need at least 3 frames")
    report = first_order_smoothness(embeddings, dist)
    deficits: list[float] = []
    skipped = 0
    for i in range(len(embeddings) - 2):
        d_ab = dist(embeddings[i], embeddings[i + 1])
        d_bc = dist(embeddings[i + 1], embeddings[i + 2])
        d_ac = dist(embeddings[i], embeddings[i + 2])
        if d_ac < EPS_DENOMINATOR:
            skipped += 1
            continue
        deficits.append((d_ab + d_bc - d_ac) / d_ac)
    report.triangle_deficits = deficits
    report.skipped_terms = skipped
    report.delta2 = max(deficits) if deficits else 0.0
    return report


def smoothness_report(frames: Sequence[np.ndarray]) -> SmoothnessReport:
    """Full report under the semantic embedding distance."""
    return second_order_smoothness(_embed_all(frames))


def smoothness(frames: Sequence[np.ndarray]) -> float:
    """The headline smoothness score (second-order, semantic distance)."""
    return smoothness_report(frames).delta2


def directional_score(
    source: np.ndarray,
    frames: Sequence[np.ndarray],
    strengths: Sequence[float],
    direction: np.ndarray,
) -> DirectionalReport:
    """Cosine alignment with the edit direction, normalized by strength.

    Frames at strength 0 are rejected; the aggregate averages d_i / s_i over
    the scored strengths.
    """
    if len(frames) != len(strengths):
        raise ValueError("frames and strengths must align")
    if any(s <= 0.0 for s in strengths):
        raise ValueError("scored strengths must be strictly positive")
    src_emb = embedding.embed(source)
    per = []
    for frame, s in zip(frames, strengths):
        diff = embedding.embed(frame) - src_emb
        per.append(embedding.cosine(diff, direction))
    aggregate = float(np.mean([d / s for d, s in zip(per, strengths)])) if per else 0.0
    return DirectionalReport(per_strength=per, aggregate=aggregate)


def identity_curve(
    source: np.ndarray, frames: Sequence[np.ndarray], strengths: Sequence[float]
) -> IdentityCurve:
    """Cosine similarity between source and each frame's embedding."""
    if len(frames) != len(strengths):
        raise ValueError("frames and strengths must align")
    if not frames:
        raise ValueError("need at least one frame")
    src_emb = embedding.embed(source)
    sims = [embedding.cosine(src_emb, embedding.embed(f)) for f in frames]
    return IdentityCurve(strengths=list(strengths), similarity=sims)
