"""Dataset construction, filtering, and persistence.

Three filters run on every trajectory: KL-uniformity of the adjacent-delta
distribution (non-smooth sequences), endpoint drift against fresh renders
(inversion-error analog), and minimum edit magnitude (no-op edits). A
record rejected by several criteria is attributed to the first failure in
the order (kl, drift, no_op).
"""

from __future__ import annotations

import json
import math
import shutil
from dataclasses import dataclass, field, replace as dc_replace
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import embedding
from .imageio import read_kkim_stack, write_kkim_stack
from .instructions import decode_string, generate_instruction
from .scenes import EditSpec, SceneSpec, SceneError, apply_edit, render
from .trajectory import DEFECT_KINDS, EditTrajectory, inject_defect, synthesize_trajectory

EPS_FLOOR = 1e-8
DEFAULT_KL_MAX = 0.15
# Frozen from seed-0 calibration (scripts/calibrate_thresholds.py): clean
# endpoints coincide with fresh renders exactly, so any measurable drift is
# suspect; min_edit is the 1st percentile of clean edit magnitudes.
DEFAULT_DRIFT_MAX = 1e-4
DEFAULT_MIN_EDIT = 0.5

CRITERIA_ORDER = ("kl", "drift", "no_op")

MANIFEST_VERSION = 1


@dataclass(frozen=True)
class Thresholds:
    kl_max: float = DEFAULT_KL_MAX
    drift_max: float = DEFAULT_DRIFT_MAX
    min_edit: float = DEFAULT_MIN_EDIT

    def to_json(self) -> dict:
        return {"kl_max": self.kl_max, "drift_max": self.drift_max, "min_edit": self.min_edit}

    @staticmethod
    def from_json(obj: dict) -> "Thresholds":
        return Thresholds(obj["kl_max"], obj["drift_max"], obj["min_edit"])


@dataclass
class FilterReport:
    kl_uniformity: float
    endpoint_drift: float
    edit_magnitude: float
    passed: bool
    failed_criteria: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "kl_uniformity": None if math.isinf(self.kl_uniformity) else self.kl_uniformity,
            "endpoint_drift": self.endpoint_drift,
            "edit_magnitude": self.edit_magnitude,
            "passed": self.passed,
            "failed_criteria": self.failed_criteria,
        }


@dataclass(frozen=True)
class StrengthSample:
    x: np.ndarray
    e: tuple[int, ...]
    s: float
    y_s: np.ndarray


def delta_sequence(
    traj: EditTrajectory, dist: Callable = embedding.distance
) -> list[float]:
    """Adjacent embedding distances along the trajectory."""
    if len(traj.frames) < 3:
        raise SceneError("too few frames for a delta sequence")
    embs = [embedding.embed(f) for f in traj.frames]
    return [dist(embs[i], embs[i + 1]) for i in range(len(embs) - 1)]


def uniformity_kl(deltas: Sequence[float]) -> float:
    """KL divergence of the normalized deltas from the uniform distribution.

    Natural log; deltas are floored by EPS_FLOOR before normalization.
    All-zero delta sequences are degenerate and report +inf.
    """
    d = np.asarray(deltas, dtype=np.float64)
    if d.size < 2:
        raise ValueError("need at least 2 deltas")
    if (d < 0).any():
        raise ValueError("deltas must be nonnegative")
    if d.max() <= 0.0:
        return float("inf")
    p = (d + EPS_FLOOR) / (d + EPS_FLOOR).sum()
    return float(np.sum(p * np.log(p * d.size)))


def filter_trajectory(
    traj: EditTrajectory, thresholds: Thresholds = Thresholds()
) -> FilterReport:
    """Evaluate all three criteria; always computes every score."""
    deltas = delta_sequence(traj)
    kl = uniformity_kl(deltas)

    resolution = traj.frames[0].shape[0]
    src_ref = embedding.embed(render(traj.scene, resolution))
    full_ref = embedding.embed(render(apply_edit(traj.scene, traj.edit, 1.0), resolution))
    drift = max(
        embedding.distance(embedding.embed(traj.frames[0]), src_ref),
        embedding.distance(embedding.embed(traj.frames[-1]), full_ref),
    )

    magnitude = embedding.distance(
        embedding.embed(traj.frames[0]), embedding.embed(traj.frames[-1])
    )

    failed = []
    if kl > thresholds.kl_max:
        failed.append("kl")
    if drift > thresholds.drift_max:
        failed.append("drift")
    if magnitude < thresholds.min_edit:
        failed.append("no_op")
    return FilterReport(
        kl_uniformity=kl,
        endpoint_drift=drift,
        edit_magnitude=magnitude,
        passed=not failed,
        failed_criteria=failed,
    )


def replace_endpoints(
    traj: EditTrajectory, recon_source: np.ndarray, recon_edit: np.ndarray
) -> EditTrajectory:
    """Swap in reconstructed endpoints, flagging the replacement."""
    for recon in (recon_source, recon_edit):
        if recon.shape != traj.frames[0].shape:
            raise SceneError(
                f"endpoint shape {recon.shape} does not match frames {traj.frames[0].shape}"
            )
    frames = list(traj.frames)
    frames[0] = np.asarray(recon_source, dtype=np.float32)
    frames[-1] = np.asarray(recon_edit, dtype=np.float32)
    return dc_replace(traj, frames=tuple(frames), endpoints_replaced=True)


# ---------------------------------------------------------------------------
# Dataset build / persistence
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BuildConfig:
    num_trajectories: int
    output_path: str
    n_steps: int = 6
    defect_rate: float = 0.0
    defect_kinds: tuple[str, ...] = DEFECT_KINDS
    thresholds: Thresholds = field(default_factory=Thresholds)
    apply_filter: bool = True
    seed: int = 0
    resolution: int = 32


@dataclass
class DatasetManifest:
    version: int
    counts: dict
    thresholds: dict
    records: list[dict]

    def to_json(self) -> dict:
        return {
            "version": self.version,
            "counts": self.counts,
            "thresholds": self.thresholds,
            "records": self.records,
        }

    @staticmethod
    def from_json(obj: dict) -> "DatasetManifest":
        return DatasetManifest(
            version=obj["version"],
            counts=obj["counts"],
            thresholds=obj["thresholds"],
            records=obj["records"],
        )


def _record_meta(traj: EditTrajectory, category: str, report: FilterReport) -> dict:
    return {
        "id": traj.id,
        "category": category,
        "scene": traj.scene.to_json(),
        "edit": traj.edit.to_json(),
        "instruction_tokens": list(traj.instruction),
        "instruction_text": decode_string(traj.instruction),
        "strengths": list(traj.strengths),
        "num_frames": len(traj.frames),
        "defect": traj.defect_metadata,
        "endpoints_replaced": traj.endpoints_replaced,
        "filter_report": report.to_json(),
    }


def build_dataset(config: BuildConfig) -> DatasetManifest:
    """Generate, filter, and persist a trajectory dataset. Deterministic per seed."""
    from .sampling import random_scene_edit

    out = Path(config.output_path)
    records_dir = out / "records"
    records_dir.mkdir(parents=True, exist_ok=True)

    rng = np.random.default_rng(config.seed)
    rejected: dict[str, int] = {k: 0 for k in CRITERIA_ORDER}
    records: list[dict] = []
    passed = 0
    try:
        for i in range(config.num_trajectories):
            scene, edit, category = random_scene_edit(rng)
            traj_id = f"t{i:06d}"
            traj = synthesize_trajectory(
                scene, edit, config.n_steps, traj_id=traj_id, resolution=config.resolution
            )
            traj = dc_replace(
                traj, instruction=generate_instruction(edit, scene, seed=int(rng.integers(10)))
            )
            if config.defect_rate > 0 and rng.random() < config.defect_rate:
                kind = str(rng.choice(config.defect_kinds))
                traj = inject_defect(traj, kind, rng_seed=int(rng.integers(2**31)))

            report = filter_trajectory(traj, config.thresholds)
            keep = report.passed or not config.apply_filter
            meta = _record_meta(traj, category, report)
            meta["stored"] = keep
            if keep:
                passed += 1 if report.passed else 0
                if not report.passed:
                    rejected[report.failed_criteria[0]] += 1
                write_kkim_stack(records_dir / f"{traj.id}.kkim", list(traj.frames))
                (records_dir / f"{traj.id}.meta.json").write_text(json.dumps(meta, indent=1))
            else:
                rejected[report.failed_criteria[0]] += 1
            records.append(meta)

        manifest = DatasetManifest(
            version=MANIFEST_VERSION,
            counts={
                "generated": config.num_trajectories,
                "passed": passed,
                "rejected_per_criterion": rejected,
            },
            thresholds=config.thresholds.to_json(),
            records=records,
        )
        (out / "manifest.json").write_text(json.dumps(manifest.to_json(), indent=1))
        return manifest
    except Exception:
        # do not leave a half-written dataset behind
        shutil.rmtree(out, ignore_errors=True)
        raise


class TrajectoryDataset:
    """Read access to a built dataset directory."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        manifest_file = self.path / "manifest.json"
        if not manifest_file.exists():
            raise FileNotFoundError(f"no manifest at {manifest_file}")
        self.manifest = DatasetManifest.from_json(json.loads(manifest_file.read_text()))
        self.stored = [r for r in self.manifest.records if r.get("stored")]
        if not self.stored:
            raise ValueError(f"dataset at {self.path} holds no stored records")

    def __len__(self) -> int:
        return len(self.stored)

    def load_frames(self, record: dict) -> list[np.ndarray]:
        return read_kkim_stack(
            self.path / "records" / f"{record['id']}.kkim", record["num_frames"]
        )

    def load_trajectory(self, record: dict) -> EditTrajectory:
        return EditTrajectory(
            id=record["id"],
            scene=SceneSpec.from_json(record["scene"]),
            edit=EditSpec.from_json(record["edit"]),
            instruction=tuple(record["instruction_tokens"]),
            strengths=tuple(record["strengths"]),
            frames=tuple(self.load_frames(record)),
            defect_metadata=record.get("defect"),
            endpoints_replaced=record.get("endpoints_replaced", False),
        )

    def sample_batch(
        self, batch_size: int, rng: np.random.Generator
    ) -> list[StrengthSample]:
        """Uniform over (trajectory, strength index) pairs, including both endpoints."""
        samples = []
        for _ in range(batch_size):
            record = self.stored[int(rng.integers(len(self.stored)))]
            frames = self.load_frames(record)
            idx = int(rng.integers(record["num_frames"]))
            samples.append(
                StrengthSample(
                    x=frames[0],
                    e=tuple(record["instruction_tokens"]),
                    s=float(record["strengths"][idx]),
                    y_s=frames[idx],
                )
            )
        return samples
