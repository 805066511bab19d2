"""Edit trajectories: the unit of both training data and evaluation.

A trajectory holds the frames of one edit realized at a uniform strength
grid, plus the scene/edit/instruction that produced it. `inject_defect`
reproduces the failure modes of morphing-based trajectory synthesis so the
filtering stage has realistic bad inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .scenes import EditSpec, SceneSpec, SceneError, apply_edit, render

DEFECT_KINDS = ("abrupt_jump", "endpoint_drift", "no_op", "artifact_frame")


@dataclass(frozen=True)
class EditTrajectory:
    id: str
    scene: SceneSpec
    edit: EditSpec
    instruction: tuple[int, ...]
    strengths: tuple[float, ...]
    frames: tuple[np.ndarray, ...]
    defect_metadata: dict | None = None
    endpoints_replaced: bool = False

    def __post_init__(self):
        if len(self.frames) != len(self.strengths):
            raise SceneError("frames and strengths must have equal length")
        if len(self.strengths) < 3:
            raise SceneError("a trajectory needs at least 3 frames")
        s = self.strengths
        if s[0] != 0.0 or s[-1] != 1.0 or any(a >= b for a, b in zip(s, s[1:])):
            raise SceneError("strengths must be strictly increasing from 0 to 1")

    @property
    def num_steps(self) -> int:
        return len(self.strengths) - 1


def synthesize_trajectory(
    scene: SceneSpec, edit: EditSpec, n_steps: int, traj_id: str = "", resolution: int = 32
) -> EditTrajectory:
    """Render the edit at strengths i/N for i = 0..N."""
    if n_steps < 2:
        raise SceneError(f"need at least 2 steps, got {n_steps}")
    edit.validate(scene)
    strengths = tuple(i / n_steps for i in range(n_steps + 1))
    frames = []
    for i, s in enumerate(strengths):
        if i == 0:
            frames.append(render(scene, resolution))
        else:
            frames.append(render(apply_edit(scene, edit, s), resolution))
    from .instructions import generate_instruction

    return EditTrajectory(
        id=traj_id or "traj",
        scene=scene,
        edit=edit,
        instruction=generate_instruction(edit, scene, seed=0),
        strengths=strengths,
        frames=tuple(frames),
    )


def _perturbed_render(scene: SceneSpec, rng: np.random.Generator, resolution: int) -> np.ndarray:
    """Re-render with jittered attributes; stands in for inversion error."""
    bg = replace(
        scene.background,
        base_gray=float(np.clip(scene.background.base_gray + rng.uniform(0.08, 0.15) * rng.choice([-1, 1]), 0, 1)),
    )
    shapes = []
    for shape in scene.shapes:
        shapes.append(
            replace(
                shape,
                hue=float((shape.hue + rng.uniform(25.0, 50.0)) % 360.0),
                saturation=float(np.clip(shape.saturation + rng.uniform(-0.15, 0.15), 0, 1)),
            )
        )
    return render(replace(scene, shapes=tuple(shapes), background=bg), resolution)


def inject_defect(traj: EditTrajectory, defect: str, rng_seed: int) -> EditTrajectory:
    """Corrupt a clean trajectory with one known failure mode."""
    if defect not in DEFECT_KINDS:
        raise SceneError(f"unknown defect kind {defect!r}")
    if len(traj.frames) < 3:
        raise SceneError("defect injection needs at least 3 frames")
    rng = np.random.default_rng(rng_seed)
    frames = list(traj.frames)
    n = len(frames) - 1
    meta: dict = {"kind": defect, "rng_seed": rng_seed}

    if defect == "no_op":
        frames = [frames[0].copy() for _ in frames]
    elif defect == "abrupt_jump":
        # everything sits at the source until the last two frames
        for i in range(1, n - 1):
            frames[i] = frames[0].copy()
    elif defect == "endpoint_drift":
        resolution = frames[0].shape[0]
        frames[0] = _perturbed_render(traj.scene, rng, resolution)
        full = apply_edit(traj.scene, traj.edit, 1.0)
        frames[n] = _perturbed_render(full, rng, resolution)
    elif defect == "artifact_frame":
        idx = int(rng.integers(1, n))
        s = traj.strengths[idx]
        broken_scene = apply_edit(traj.scene, traj.edit, s)
        if broken_scene.shapes:
            drop = int(rng.integers(len(broken_scene.shapes)))
            shapes = tuple(sh for j, sh in enumerate(broken_scene.shapes) if j != drop)
            broken_scene = replace(broken_scene, shapes=shapes)
            meta["dropped_shape"] = drop
        else:
            # shapeless scene: blank the frame instead
            bg = replace(broken_scene.background, base_gray=0.0, style=0.0)
            broken_scene = replace(broken_scene, background=bg)
        frames[idx] = render(broken_scene, frames[0].shape[0])
        meta["frame_index"] = idx

    return replace(traj, frames=tuple(frames), defect_metadata=meta)
