"""Closed-form blending and boundary-map math.

The two identities everything else builds on:

* composite = mask * fg + (1 - mask) * bg, elementwise per channel
* boundary map B = 4 * M * (1 - M), which is zero exactly where the mask
  is binary and peaks at 1 where M = 0.5

plus the fixed 3x3 binomial softening that turns a binary mask into a soft
one before the boundary map is taken.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatchError


def alpha_blend(fg: np.ndarray, bg: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Convex per-pixel combination of two images weighted by a soft mask.

    ``out[i,j,c] = mask[i,j] * fg[i,j,c] + (1 - mask[i,j]) * bg[i,j,c]``,
    clipped to [0, 1] to absorb float roundoff.
    """
    fg = np.asarray(fg, dtype=np.float64)
    bg = np.asarray(bg, dtype=np.float64)
    mask = np.asarray(mask, dtype=np.float64)
    if fg.shape != bg.shape or fg.shape[:2] != mask.shape:
        raise DimensionMismatchError(
            f"fg {fg.shape}, bg {bg.shape}, mask {mask.shape} must share dimensions"
        )
    m = mask[..., None]
    out = m * fg + (1.0 - m) * bg
    return np.clip(out, 0.0, 1.0)


# 3x3 binomial kernel, separable [1 2 1]/4 per axis; sums to 1 exactly.
_SOFTEN_1D = np.array([0.25, 0.5, 0.25])


def soften_mask(mask: np.ndarray) -> np.ndarray:
    """Convolve a mask with the fixed 3x3 kernel (1 2 1; 2 4 2; 1 2 1)/16.

    Borders are replicate-padded, so an all-one mask stays all one and mask
    mass is conserved at edges.
    """
    mask = np.asarray(mask, dtype=np.float64)
    if mask.ndim != 2:
        raise DimensionMismatchError(f"expected (H, W) mask, got {mask.shape}")
    p = np.pad(mask, 1, mode="edge")
    rows = (p[:-2, :] + 2.0 * p[1:-1, :] + p[2:, :]) * 0.25
    out = (rows[:, :-2] + 2.0 * rows[:, 1:-1] + rows[:, 2:]) * 0.25
    return np.clip(out, 0.0, 1.0)


def compute_xray(mask: np.ndarray) -> np.ndarray:
    """Boundary map of a soft mask: ``B = 4 * M * (1 - M)``.

    Zero exactly where M is 0 or 1; the fractional band of a soft mask shows
    up as a bright ridge.  Output lies in [0, 1] for any valid mask.
    """
    mask = np.asarray(mask, dtype=np.float64)
    return 4.0 * mask * (1.0 - mask)


def is_trivial(xray: np.ndarray, tol: float = 0.0) -> bool:
    """True iff no pixel of the boundary map exceeds ``tol``."""
    if tol < 0:
        raise ValueError("tol must be >= 0")
    xray = np.asarray(xray)
    return bool(xray.size == 0 or float(xray.max()) <= tol)
