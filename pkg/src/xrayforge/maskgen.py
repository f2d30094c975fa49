"""Manipulated-region mask construction.

The initial region is the convex hull of the face landmarks; its shape is
then varied by a random piecewise-affine deformation of a control grid over
the hull bounding box, and its edge softened by a Gaussian blur with a
randomly drawn kernel size.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import convolve1d
from scipy.spatial import ConvexHull, QhullError

from .core import GenerationParams
from .errors import (
    DegenerateHullError,
    DegenerateTriangleError,
    EmptyMaskError,
    OutOfBoundsError,
)
from .interp import bilinear_sample


@dataclass(frozen=True)
class AffineMap2D:
    """(x, y) -> (a x + b y + tx, c x + d y + ty)."""

    a: float
    b: float
    tx: float
    c: float
    d: float
    ty: float

    def apply(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=np.float64)
        x, y = points[..., 0], points[..., 1]
        return np.stack(
            [self.a * x + self.b * y + self.tx, self.c * x + self.d * y + self.ty],
            axis=-1,
        )

    def det(self) -> float:
        return self.a * self.d - self.b * self.c

    def inverse(self) -> "AffineMap2D":
        det = self.det()
        if abs(det) <= 1e-9:
            raise DegenerateTriangleError("affine map is not invertible")
        ia, ib = self.d / det, -self.b / det
        ic, id_ = -self.c / det, self.a / det
        return AffineMap2D(
            a=ia, b=ib, tx=-(ia * self.tx + ib * self.ty),
            c=ic, d=id_, ty=-(ic * self.tx + id_ * self.ty),
        )


def estimate_affine(src: np.ndarray, dst: np.ndarray) -> AffineMap2D:
    """Exact affine map sending three source points onto three targets."""
    src = np.asarray(src, dtype=np.float64)
    dst = np.asarray(dst, dtype=np.float64)
    if src.shape != (3, 2) or dst.shape != (3, 2):
        raise DegenerateTriangleError(f"need 3 points per side, got {src.shape} / {dst.shape}")
    m = np.column_stack([src, np.ones(3)])
    # signed doubled triangle area; zero means collinear source points
    if abs(np.linalg.det(m)) <= 1e-9:
        raise DegenerateTriangleError("source triangle is degenerate")
    coeffs = np.linalg.solve(m, dst)  # columns: x-map, y-map
    return AffineMap2D(
        a=float(coeffs[0, 0]), b=float(coeffs[1, 0]), tx=float(coeffs[2, 0]),
        c=float(coeffs[0, 1]), d=float(coeffs[1, 1]), ty=float(coeffs[2, 1]),
    )


def hull_mask(landmarks: np.ndarray, width: int, height: int) -> np.ndarray:
    """Binary mask of the convex hull of a landmark set.

    A pixel is set when its center lies inside or on the hull.
    """
    pts = np.asarray(landmarks, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 3:
        raise DegenerateHullError(f"need at least 3 (x, y) points, got shape {pts.shape}")
    x, y = pts[:, 0], pts[:, 1]
    if (x < 0).any() or (x > width - 1).any() or (y < 0).any() or (y > height - 1).any():
        raise OutOfBoundsError("landmark outside the target raster")
    try:
        hull = ConvexHull(pts)
    except QhullError as exc:
        raise DegenerateHullError(f"collinear landmarks: {exc}") from None
    verts = pts[hull.vertices]  # counter-clockwise in (x, y)

    gx, gy = np.meshgrid(np.arange(width, dtype=np.float64),
                         np.arange(height, dtype=np.float64))
    inside = np.ones((height, width), dtype=bool)
    n = len(verts)
    for i in range(n):
        px, py = verts[i]
        qx, qy = verts[(i + 1) % n]
        cross = (qx - px) * (gy - py) - (qy - py) * (gx - px)
        inside &= cross >= -1e-9
    return inside.astype(np.float64)


def _cell_triangles(grid: np.ndarray) -> list[tuple[tuple[int, int], ...]]:
    """Index triples for the fixed triangulation: each cell split TL-BR."""
    g = grid.shape[0]
    tris = []
    for i in range(g - 1):
        for j in range(g - 1):
            tl, tr = (i, j), (i, j + 1)
            bl, br = (i + 1, j), (i + 1, j + 1)
            tris.append((tl, tr, br))
            tris.append((tl, br, bl))
    return tris


def deform_mask(
    mask: np.ndarray,
    params: GenerationParams,
    rng: np.random.Generator,
) -> np.ndarray:
    """Randomly deform a mask by a piecewise-affine warp of a control grid.

    A ``deform_grid`` x ``deform_grid`` grid spans the mask bounding box;
    each grid point moves by an i.i.d. uniform offset of at most
    ``deform_max_offset_frac`` of the bounding-box diagonal per axis.  The
    warped mask is produced by inverse mapping with bilinear sampling;
    pixels outside the deformed grid are left unchanged.
    """
    mask = np.asarray(mask, dtype=np.float64)
    rows, cols = np.nonzero(mask > 0.0)
    if rows.size == 0:
        raise EmptyMaskError("cannot deform an all-zero mask")
    y0, y1 = float(rows.min()), float(rows.max())
    x0, x1 = float(cols.min()), float(cols.max())
    g = params.deform_grid
    diag = float(np.hypot(x1 - x0, y1 - y0))
    # a mask this thin has no 2-D cells to triangulate
    if x1 - x0 < 1.0 or y1 - y0 < 1.0:
        return mask.copy()
    d = params.deform_max_offset_frac * diag

    xs = np.linspace(x0, x1, g)
    ys = np.linspace(y0, y1, g)
    src = np.stack(np.meshgrid(xs, ys), axis=-1)  # (g, g, 2) in (x, y)
    offsets = rng.uniform(-d, d, size=(g, g, 2))
    dst = src + offsets

    h, w = mask.shape
    out = mask.copy()
    for tri in _cell_triangles(src):
        s = np.array([src[i, j] for i, j in tri])
        t = np.array([dst[i, j] for i, j in tri])
        if np.array_equal(s, t):
            continue  # identity piece; out already holds the input values
        # pixels covered by the deformed (target) triangle
        tx0 = max(int(np.floor(t[:, 0].min())), 0)
        tx1 = min(int(np.ceil(t[:, 0].max())), w - 1)
        ty0 = max(int(np.floor(t[:, 1].min())), 0)
        ty1 = min(int(np.ceil(t[:, 1].max())), h - 1)
        if tx1 < tx0 or ty1 < ty0:
            continue
        gx, gy = np.meshgrid(np.arange(tx0, tx1 + 1, dtype=np.float64),
                             np.arange(ty0, ty1 + 1, dtype=np.float64))
        inside = _in_triangle(gx, gy, t)
        if not inside.any():
            continue
        try:
            back = estimate_affine(t, s)  # target -> source
        except DegenerateTriangleError:
            continue  # collapsed under the random offsets; leave pixels as-is
        px = gx[inside]
        py = gy[inside]
        spts = back.apply(np.stack([px, py], axis=-1))
        vals = bilinear_sample(mask, spts[:, 0], spts[:, 1])
        out[gy[inside].astype(np.intp), gx[inside].astype(np.intp)] = vals
    return np.clip(out, 0.0, 1.0)


def _in_triangle(gx: np.ndarray, gy: np.ndarray, tri: np.ndarray) -> np.ndarray:
    """Vectorized point-in-triangle test, boundary inclusive."""
    sign = None
    inside = np.ones_like(gx, dtype=bool)
    area = (tri[1, 0] - tri[0, 0]) * (tri[2, 1] - tri[0, 1]) - \
           (tri[1, 1] - tri[0, 1]) * (tri[2, 0] - tri[0, 0])
    if area == 0.0:
        return np.zeros_like(gx, dtype=bool)
    sign = 1.0 if area > 0 else -1.0
    for i in range(3):
        px, py = tri[i]
        qx, qy = tri[(i + 1) % 3]
        cross = (qx - px) * (gy - py) - (qy - py) * (gx - px)
        inside &= sign * cross >= -1e-9
    return inside


def gaussian_kernel_1d(size: int) -> np.ndarray:
    """Sampled Gaussian of odd length ``size`` with sigma = size / 4, normalized."""
    if size < 1 or size % 2 == 0:
        raise ValueError(f"kernel size must be odd and >= 1, got {size}")
    if size == 1:
        return np.array([1.0])
    sigma = size / 4.0
    r = size // 2
    x = np.arange(-r, r + 1, dtype=np.float64)
    k = np.exp(-(x**2) / (2.0 * sigma**2))
    return k / k.sum()


def feather_mask(
    mask: np.ndarray,
    params: GenerationParams,
    rng: np.random.Generator,
) -> np.ndarray:
    """Soften a mask edge with a Gaussian blur of random kernel size.

    The kernel size is drawn uniformly from ``params.blur_kernels`` (sigma is
    size/4, borders replicate); size 1 leaves the mask untouched.
    """
    mask = np.asarray(mask, dtype=np.float64)
    sizes = sorted(params.blur_kernels)
    k = int(sizes[int(rng.integers(len(sizes)))])
    return blur_mask(mask, k)


def blur_mask(mask: np.ndarray, size: int) -> np.ndarray:
    """Separable Gaussian blur with the feathering kernel of a fixed size."""
    mask = np.asarray(mask, dtype=np.float64)
    if size == 1:
        return mask.copy()
    k = gaussian_kernel_1d(size)
    out = convolve1d(mask, k, axis=0, mode="nearest")
    out = convolve1d(out, k, axis=1, mode="nearest")
    return np.clip(out, 0.0, 1.0)
