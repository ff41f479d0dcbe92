"""Reader for IDX image files (the MNIST container format)."""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

IDX_IMAGE_MAGIC = 0x00000803
# fixed binarization: byte >= threshold -> 1
THRESHOLD = 128


class IdxFormatError(ValueError):
    pass


def parse_idx_images(raw: bytes, threshold: int = THRESHOLD) -> np.ndarray:
    """Binarized, row-major flattened images as a ``(count, rows * cols)`` uint8 array."""
    if len(raw) < 16:
        raise IdxFormatError("file too short for an IDX image header")
    magic, count, rows, cols = struct.unpack(">IIII", raw[:16])
    if magic != IDX_IMAGE_MAGIC:
        raise IdxFormatError(f"bad IDX magic 0x{magic:08x}, expected 0x{IDX_IMAGE_MAGIC:08x}")
    size = count * rows * cols
    if len(raw) - 16 < size:
        raise IdxFormatError(f"truncated IDX file: need {size} pixel bytes, found {len(raw) - 16}")
    pixels = np.frombuffer(raw, dtype=np.uint8, count=size, offset=16)
    return (pixels >= threshold).astype(np.uint8).reshape(count, rows * cols)


def read_idx_images(path, threshold: int = THRESHOLD) -> np.ndarray:
    return parse_idx_images(Path(path).read_bytes(), threshold)


def ingest_idx(path) -> np.ndarray:
    return read_idx_images(path)


def write_idx_images(path, images: np.ndarray):
    """Write a ``(count, rows, cols)`` uint8 array as an IDX image file."""
    images = np.asarray(images, dtype=np.uint8)
    count, rows, cols = images.shape
    Path(path).write_bytes(struct.pack(">IIII", IDX_IMAGE_MAGIC, count, rows, cols) + images.tobytes())
