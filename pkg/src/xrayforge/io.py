"""File-boundary persistence: 8-bit PNG rasters and landmark JSON.

Quantization rule: ``byte = round(255 * v)``, so a write/read round trip
moves any value by at most 1/255.
"""

from __future__ import annotations

import json
import os

import numpy as np
from PIL import Image as PILImage

from .core import validate_image, validate_landmarks, validate_mask
from .errors import MalformedLandmarksError, UnreadableFileError

LANDMARK_SUFFIX = ".landmarks.json"


def to_uint8(arr: np.ndarray) -> np.ndarray:
    return np.rint(np.asarray(arr, dtype=np.float64) * 255.0).astype(np.uint8)


def from_uint8(arr: np.ndarray) -> np.ndarray:
    return np.asarray(arr, dtype=np.float64) / 255.0


def save_image(path: str | os.PathLike, img: np.ndarray) -> None:
    """Write an (H, W, 3) image in [0, 1] as 8-bit RGB PNG."""
    validate_image(img)
    PILImage.fromarray(to_uint8(img), mode="RGB").save(path, format="PNG")


def load_image(path: str | os.PathLike) -> np.ndarray:
    """Read an RGB image file into an (H, W, 3) float array in [0, 1]."""
    try:
        with PILImage.open(path) as im:
            arr = np.asarray(im.convert("RGB"))
    except (OSError, ValueError) as exc:
        raise UnreadableFileError(f"cannot read image {path}: {exc}") from exc
    return from_uint8(arr)


def save_map(path: str | os.PathLike, field: np.ndarray) -> None:
    """Write an (H, W) scalar field in [0, 1] as 8-bit greyscale PNG."""
    validate_mask(field, name="map")
    PILImage.fromarray(to_uint8(field), mode="L").save(path, format="PNG")


def load_map(path: str | os.PathLike) -> np.ndarray:
    """Read a greyscale file into an (H, W) float array in [0, 1]."""
    try:
        with PILImage.open(path) as im:
            arr = np.asarray(im.convert("L"))
    except (OSError, ValueError) as exc:
        raise UnreadableFileError(f"cannot read map {path}: {exc}") from exc
    return from_uint8(arr)


def landmark_path_for(image_path: str) -> str:
    """`face.png` pairs with `face.png.landmarks.json` in the same directory."""
    return image_path + LANDMARK_SUFFIX


def save_landmarks(path: str | os.PathLike, points: np.ndarray, source: str | None = None) -> None:
    """Write a landmark set as ``{"points": [[x, y], ...]}`` (+ optional source tag)."""
    points = np.asarray(points, dtype=np.float64)
    doc: dict = {"points": [[float(x), float(y)] for x, y in points]}
    if source is not None:
        doc["source"] = source
    with open(path, "w", encoding="utf-8") as f:
        json.dump(doc, f)


def load_landmarks(path: str | os.PathLike, width: int | None = None,
                   height: int | None = None) -> tuple[np.ndarray, str | None]:
    """Read a landmark file; returns (points, source-or-None).

    When ``width``/``height`` are given the points are validated against
    those raster bounds.
    """
    try:
        with open(path, "r", encoding="utf-8") as f:
            doc = json.load(f)
    except OSError as exc:
        raise UnreadableFileError(f"cannot read landmarks {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise MalformedLandmarksError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(doc, dict) or "points" not in doc:
        raise MalformedLandmarksError(f"{path}: missing 'points'")
    try:
        points = np.asarray(doc["points"], dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise MalformedLandmarksError(f"{path}: points not numeric: {exc}") from exc
    if points.ndim != 2 or points.shape[1] != 2 or points.shape[0] < 3:
        raise MalformedLandmarksError(
            f"{path}: expected at least 3 (x, y) points, got shape {points.shape}"
        )
    if width is not None and height is not None:
        try:
            validate_landmarks(points, width, height)
        except Exception as exc:
            raise MalformedLandmarksError(f"{path}: {exc}") from exc
    source = doc.get("source")
    if source is not None and not isinstance(source, str):
        raise MalformedLandmarksError(f"{path}: source must be a string")
    return points, source
