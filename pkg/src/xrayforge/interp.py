"""Bilinear sampling and resizing shared by the warping and pipeline code."""

from __future__ import annotations

import numpy as np


def bilinear_sample(img: np.ndarray, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Sample ``img`` at float coordinates (xs, ys), clamping to the border.

    ``img`` may be (H, W) or (H, W, C); the result has the shape of ``xs``
    plus the channel axis when present.  Sampling at integer coordinates
    reproduces the stored values exactly.
    """
    img = np.asarray(img, dtype=np.float64)
    h, w = img.shape[:2]
    xs = np.clip(np.asarray(xs, dtype=np.float64), 0.0, w - 1.0)
    ys = np.clip(np.asarray(ys, dtype=np.float64), 0.0, h - 1.0)

    x0 = np.floor(xs).astype(np.intp)
    y0 = np.floor(ys).astype(np.intp)
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    fx = xs - x0
    fy = ys - y0
    if img.ndim == 3:
        fx = fx[..., None]
        fy = fy[..., None]

    top = img[y0, x0] * (1.0 - fx) + img[y0, x1] * fx
    bot = img[y1, x0] * (1.0 - fx) + img[y1, x1] * fx
    return top * (1.0 - fy) + bot * fy


def resize_bilinear(img: np.ndarray, height: int, width: int) -> np.ndarray:
    """Resize (H, W) or (H, W, C) to (height, width) by bilinear sampling.

    Uses the half-pixel-center convention; a same-size call returns an exact
    copy.
    """
    img = np.asarray(img, dtype=np.float64)
    h, w = img.shape[:2]
    if (h, w) == (height, width):
        return img.copy()
    # map output pixel centers into input pixel-center coordinates
    sy = h / height
    sx = w / width
    ys = (np.arange(height) + 0.5) * sy - 0.5
    xs = (np.arange(width) + 0.5) * sx - 0.5
    gx, gy = np.meshgrid(xs, ys)
    return bilinear_sample(img, gx, gy)
