"""Raster image helpers and the KKIM binary format.

Images are float32 numpy arrays of shape (H, W, 3) with values in [0, 1].
The on-disk format is a 16-byte header (magic ``KKIM``, then little-endian
u32 height, width, channels) followed by row-major little-endian float32
pixel data.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

MAGIC = b"KKIM"
_HEADER = struct.Struct("<4sIII")


class ImageFormatError(ValueError):
    """Raised for malformed image arrays or KKIM blobs."""


def validate_image(img: np.ndarray) -> np.ndarray:
    arr = np.asarray(img)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ImageFormatError(f"expected (H, W, 3) image, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise ImageFormatError("image contains non-finite values")
    return arr.astype(np.float32, copy=False)


def write_kkim(path: str | Path, img: np.ndarray) -> None:
    arr = validate_image(img)
    h, w, c = arr.shape
    data = _HEADER.pack(MAGIC, h, w, c) + arr.astype("<f4").tobytes(order="C")
    Path(path).write_bytes(data)


def read_kkim(path: str | Path) -> np.ndarray:
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise ImageFormatError(f"{path}: truncated header")
    magic, h, w, c = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise ImageFormatError(f"{path}: bad magic {magic!r}")
    expected = _HEADER.size + 4 * h * w * c
    if len(raw) != expected:
        raise ImageFormatError(f"{path}: expected {expected} bytes, got {len(raw)}")
    arr = np.frombuffer(raw, dtype="<f4", offset=_HEADER.size).reshape(h, w, c)
    return np.ascontiguousarray(arr)


def write_kkim_stack(path: str | Path, frames: list[np.ndarray]) -> None:
    """Persist a frame stack as one KKIM blob, frames stacked along height."""
    if not frames:
        raise ImageFormatError("empty frame stack")
    arrs = [validate_image(f) for f in frames]
    shape = arrs[0].shape
    for a in arrs:
        if a.shape != shape:
            raise ImageFormatError("all frames in a stack must share one shape")
    write_kkim(path, np.concatenate(arrs, axis=0))


def read_kkim_stack(path: str | Path, num_frames: int) -> list[np.ndarray]:
    blob = read_kkim(path)
    if blob.shape[0] % num_frames != 0:
        raise ImageFormatError(
            f"{path}: height {blob.shape[0]} not divisible by {num_frames} frames"
        )
    fh = blob.shape[0] // num_frames
    return [blob[i * fh : (i + 1) * fh].copy() for i in range(num_frames)]
