"""Forensic map rendering: noise analysis and error level analysis.

Both produce a single-channel [0, 1] map the same height and width as the
input, bright where the image is locally inconsistent with the surrounding
statistics.  Spliced regions with a different noise floor or recompression
history than their surroundings tend to stand out.
"""

from __future__ import annotations

import io as _io
from dataclasses import dataclass

import numpy as np
from PIL import Image
from scipy.ndimage import median_filter

from .core import validate_image
from .errors import CodecUnavailableError
from .io import from_uint8, to_uint8


@dataclass(frozen=True)
class ForensicMap:
    kind: str
    data: np.ndarray  # (H, W) float64 in [0, 1]


def noise_residual(img: np.ndarray, amplification: float = 8.0) -> ForensicMap:
    """Amplified deviation of each pixel from a 3x3 median of its neighborhood.

    The residual is averaged over channels; borders use nearest-edge
    replication.  Output is clamped to [0, 1].
    """
    validate_image(img)
    img = np.asarray(img, dtype=np.float64)
    med = median_filter(img, size=(3, 3, 1), mode="nearest")
    resid = np.abs(img - med).mean(axis=2)
    return ForensicMap(kind="noise", data=np.clip(amplification * resid, 0.0, 1.0))


def _jpeg_roundtrip(img: np.ndarray, quality: int) -> np.ndarray:
    """Encode to JPEG in memory at the given quality and decode back."""
    buf = _io.BytesIO()
    try:
        Image.fromarray(to_uint8(img), mode="RGB").save(buf, format="JPEG", quality=quality)
        buf.seek(0)
        back = np.asarray(Image.open(buf).convert("RGB"))
    except OSError as exc:
        raise CodecUnavailableError(f"JPEG codec failed: {exc}") from None
    return from_uint8(back)


def error_level_analysis(
    img: np.ndarray,
    quality: int = 90,
    scale: float = 15.0,
) -> ForensicMap:
    """Difference between an image and its JPEG recompression at a fixed quality.

    Regions already carrying compression history close to the probe quality
    change little and come out dark; pristine or differently-compressed
    regions change more.  The per-channel absolute difference is averaged,
    scaled, and clamped to [0, 1].
    """
    validate_image(img)
    if not 1 <= quality <= 100:
        raise ValueError(f"JPEG quality must be in [1, 100], got {quality}")
    # diff against the 8-bit reference the codec actually sees, so the map
    # measures compression loss, not input quantization
    reference = from_uint8(to_uint8(img))
    recompressed = _jpeg_roundtrip(reference, quality)
    diff = np.abs(reference - recompressed).mean(axis=2)
    return ForensicMap(kind="ela", data=np.clip(scale * diff, 0.0, 1.0))
