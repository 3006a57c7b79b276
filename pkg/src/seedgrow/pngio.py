"""PNG import/export for masks and heatmaps."""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image

from .errors import InputError, IoError


def write_grayscale(data: np.ndarray, destination: str | Path) -> None:
    """Write a 2-D uint8 array as an 8-bit grayscale PNG."""
    arr = np.asarray(data)
    if arr.ndim != 2:
        raise InputError(f"grayscale image must be 2-D, got shape {arr.shape}")
    try:
        Image.fromarray(arr.astype(np.uint8), mode="L").save(destination, format="PNG")
    except OSError as exc:
        raise IoError(f"cannot write {destination}: {exc}") from exc


def write_binary_mask(binary: np.ndarray, destination: str | Path) -> None:
    """Binary mask as 0/255 grayscale PNG."""
    write_grayscale((np.asarray(binary) != 0).astype(np.uint8) * 255, destination)


def write_heatmap(values: np.ndarray, destination: str | Path) -> None:
    """Map [0, 1] values onto 8-bit intensities."""
    arr = np.clip(np.asarray(values, dtype=np.float64), 0.0, 1.0)
    write_grayscale(np.round(arr * 255.0).astype(np.uint8), destination)


def read_binary_mask(source: str | Path) -> np.ndarray:
    """Load a mask PNG; any pixel above half intensity counts as foreground."""
    try:
        with Image.open(source) as img:
            arr = np.asarray(img.convert("L"))
    except OSError as exc:
        raise IoError(f"cannot read {source}: {exc}") from exc
    return (arr > 127).astype(np.uint8)
