"""Measure and freeze the embedding z-score constants.

Run once; the resulting JSON is committed as package data. The corpus is a
fixed set of random scenes plus their full edits so both endpoints of
typical trajectories are represented.
"""

import json
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from kkedit.embedding import EMBED_DIM, raw_features  # noqa: E402
from kkedit.sampling import random_scene_edit  # noqa: E402
from kkedit.scenes import apply_edit, render  # noqa: E402

CORPUS_SEED = 1234
CORPUS_SIZE = 512


def main() -> None:
    rng = np.random.default_rng(CORPUS_SEED)
    feats = []
    for _ in range(CORPUS_SIZE):
        scene, edit, _ = random_scene_edit(rng)
        feats.append(raw_features(render(scene)))
        feats.append(raw_features(render(apply_edit(scene, edit, 1.0))))
    arr = np.stack(feats)
    mean = arr.mean(axis=0)
    std = np.maximum(arr.std(axis=0), 1e-6)
    out = Path(__file__).resolve().parents[1] / "src" / "kkedit" / "data" / "zscore_constants.json"
    out.write_text(
        json.dumps(
            {
                "version": 1,
                "corpus_seed": CORPUS_SEED,
                "corpus_size": CORPUS_SIZE,
                "dim": EMBED_DIM,
                "mean": mean.tolist(),
                "std": std.tolist(),
            },
            indent=1,
        )
    )
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
