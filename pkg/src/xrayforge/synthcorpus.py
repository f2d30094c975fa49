"""Procedural face-crop corpus for demos and self-contained testing.

Draws simple geometric "faces" (shaded ellipse, eyes, nose, mouth) with a
68-point landmark layout, several frames per synthetic identity.  Each
identity carries its own skin tone, background, and sensor-noise level, so
cross-identity composites exhibit the source inconsistencies the forensic
maps look for.  Faces are kept well inside the frame so gradient-domain
blending always has a boundary ring available.

Everything is a pure function of the seed; frames are written as PNG plus
a landmark JSON tagged with the identity in its ``source`` field.
"""

from __future__ import annotations

import os

import numpy as np

from .io import save_image, save_landmarks


def _ellipse_field(size: int, cx: float, cy: float, rx: float, ry: float) -> np.ndarray:
    """Normalized squared radius of each pixel wrt an axis-aligned ellipse."""
    ys, xs = np.mgrid[0:size, 0:size].astype(np.float64)
    return ((xs - cx) / rx) ** 2 + ((ys - cy) / ry) ** 2


def _face_landmarks(cx: float, cy: float, rx: float, ry: float,
                    rot: float) -> np.ndarray:
    """68 points in the usual layout: jaw, brows, nose, eyes, lips."""
    pts = []
    # jaw: 17 points along the lower face ellipse, ear to ear
    for t in np.linspace(np.pi, 2 * np.pi, 17):
        pts.append((np.cos(t), -np.sin(t) * 1.0))
    # brows: 5 points each, arched above the eyes
    for side in (-1.0, 1.0):
        for u in np.linspace(-0.28, 0.28, 5):
            x = side * 0.45 + u
            pts.append((x, -0.52 - 0.10 * (1 - (u / 0.3) ** 2)))
    # nose: 4 bridge + 5 base
    for v in np.linspace(-0.35, 0.12, 4):
        pts.append((0.0, v))
    for u in np.linspace(-0.16, 0.16, 5):
        pts.append((u, 0.22 - 0.06 * abs(u) / 0.16))
    # eyes: 6 points each on small ellipses
    for side in (-1.0, 1.0):
        ex = side * 0.42
        for t in np.linspace(0, 2 * np.pi, 6, endpoint=False):
            pts.append((ex + 0.14 * np.cos(t), -0.30 + 0.07 * np.sin(t)))
    # lips: 12 outer + 8 inner
    for t in np.linspace(0, 2 * np.pi, 12, endpoint=False):
        pts.append((0.22 * np.cos(t), 0.55 + 0.10 * np.sin(t)))
    for t in np.linspace(0, 2 * np.pi, 8, endpoint=False):
        pts.append((0.13 * np.cos(t), 0.55 + 0.045 * np.sin(t)))

    rel = np.asarray(pts, dtype=np.float64)
    rel[:, 0] *= rx
    rel[:, 1] *= ry
    c, s = np.cos(rot), np.sin(rot)
    rot_mat = np.array([[c, -s], [s, c]])
    rel = rel @ rot_mat.T
    rel[:, 0] += cx
    rel[:, 1] += cy
    return rel


def render_face(
    size: int,
    skin: np.ndarray,
    background: np.ndarray,
    noise_sigma: float,
    cx: float,
    cy: float,
    rx: float,
    ry: float,
    rot: float,
    light: float,
    rng: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray]:
    """Draw one frame; returns (image, 68x2 landmarks)."""
    ys, xs = np.mgrid[0:size, 0:size].astype(np.float64)
    img = np.empty((size, size, 3))
    # background: gentle vertical gradient around the identity color
    grad = (ys / size - 0.5) * 0.15
    for ch in range(3):
        img[..., ch] = background[ch] + grad

    face = _ellipse_field(size, cx, cy, rx, ry) <= 1.0
    shade = light * (1.0 - 0.25 * ((xs - cx) / rx))
    for ch in range(3):
        img[..., ch][face] = (skin[ch] * shade)[face]

    def paint(cx_r, cy_r, rx_r, ry_r, color):
        blot = _ellipse_field(size, cx + cx_r * rx, cy + cy_r * ry,
                              max(rx_r * rx, 1.0), max(ry_r * ry, 1.0)) <= 1.0
        for ch in range(3):
            img[..., ch][blot] = color[ch]

    dark = skin * 0.25
    paint(-0.42, -0.30, 0.14, 0.07, dark)   # eyes
    paint(0.42, -0.30, 0.14, 0.07, dark)
    paint(0.0, 0.05, 0.05, 0.28, skin * 0.8)  # nose ridge
    paint(0.0, 0.55, 0.22, 0.08, dark * 1.6)  # mouth

    img += rng.normal(0.0, noise_sigma, size=img.shape)
    img = np.clip(img, 0.0, 1.0)
    return img, _face_landmarks(cx, cy, rx, ry, rot)


def synth_corpus(
    root: str | os.PathLike,
    identities: int = 6,
    frames_per_identity: int = 4,
    size: int = 128,
    seed: int = 0,
) -> list[str]:
    """Write a corpus of synthetic face frames under ``root``.

    File ids look like ``p03_f01``; all frames of identity ``p03`` share
    ``source: "p03"`` in their landmark files.  Returns the ids written.
    """
    root = os.fspath(root)
    os.makedirs(root, exist_ok=True)
    rng = np.random.default_rng(seed)
    ids = []
    for p in range(identities):
        skin = np.array([0.55, 0.42, 0.33]) + rng.uniform(-0.12, 0.18, 3)
        background = np.clip(np.array([0.2, 0.25, 0.3]) + rng.uniform(-0.1, 0.25, 3),
                             0.05, 0.85)
        noise_sigma = float(rng.uniform(0.004, 0.02))
        base_rx = size * rng.uniform(0.22, 0.26)
        base_ry = size * rng.uniform(0.26, 0.30)
        for f in range(frames_per_identity):
            cx = size * (0.50 + rng.uniform(-0.02, 0.02))
            cy = size * (0.52 + rng.uniform(-0.02, 0.02))
            rx = base_rx * (1.0 + rng.uniform(-0.04, 0.04))
            ry = base_ry * (1.0 + rng.uniform(-0.04, 0.04))
            rot = float(rng.uniform(-0.06, 0.06))
            light = float(rng.uniform(0.92, 1.05))
            img, pts = render_face(size, np.clip(skin, 0.05, 0.95), background,
                                   noise_sigma, cx, cy, rx, ry, rot, light, rng)
            entry_id = f"p{p:02d}_f{f:02d}"
            image_path = os.path.join(root, f"{entry_id}.png")
            save_image(image_path, img)
            save_landmarks(image_path + ".landmarks.json", pts, source=f"p{p:02d}")
            ids.append(entry_id)
    return ids
