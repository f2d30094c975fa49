"""Color correction and blending of a donor face into a background image.

Two blend families are supported: plain alpha compositing (see
:func:`xrayforge.xray.alpha_blend`) and gradient-domain compositing, which
solves the discrete Poisson equation on the mask interior so the pasted
region keeps the donor's gradients while matching the background at the
region boundary.
"""

from __future__ import annotations

import numpy as np

from .errors import (
    DimensionMismatchError,
    EmptyRegionError,
    EmptySupportError,
    NonConvergenceError,
    RegionTouchesBorderError,
)


def color_transfer_means(
    fg: np.ndarray,
    bg: np.ndarray,
    mask: np.ndarray,
) -> np.ndarray:
    """Shift each donor channel so its mean over the mask matches the background.

    The support is ``mask > 0.5``.  Values are clipped back to [0, 1], so
    means match exactly only when the shift does not push pixels out of
    range.
    """
    fg = np.asarray(fg, dtype=np.float64)
    bg = np.asarray(bg, dtype=np.float64)
    mask = np.asarray(mask, dtype=np.float64)
    if fg.shape != bg.shape or fg.shape[:2] != mask.shape:
        raise DimensionMismatchError(
            f"shape mismatch: fg {fg.shape}, bg {bg.shape}, mask {mask.shape}"
        )
    support = mask > 0.5
    if not support.any():
        raise EmptySupportError("mask has no pixels above 0.5")
    out = fg.copy()
    if fg.ndim == 2:
        out = out + (bg[support].mean() - fg[support].mean())
    else:
        for c in range(fg.shape[2]):
            shift = bg[..., c][support].mean() - fg[..., c][support].mean()
            out[..., c] = out[..., c] + shift
    return np.clip(out, 0.0, 1.0)


def _laplacian(field: np.ndarray) -> np.ndarray:
    """4-neighbor discrete Laplacian, valid away from the border."""
    lap = np.zeros_like(field)
    lap[1:-1, 1:-1] = (
        4.0 * field[1:-1, 1:-1]
        - field[:-2, 1:-1]
        - field[2:, 1:-1]
        - field[1:-1, :-2]
        - field[1:-1, 2:]
    )
    return lap


def solve_poisson(
    fg: np.ndarray,
    bg: np.ndarray,
    region: np.ndarray,
    tol: float = 1e-6,
    max_iter: int | None = None,
    energy_history: list[float] | None = None,
) -> np.ndarray:
    """Solve the Poisson compositing problem on one channel.

    Finds u on the region whose Laplacian equals the donor's, with u fixed
    to the background outside (Dirichlet condition on the region boundary).
    Solved matrix-free by conjugate gradients on the system restricted to
    interior pixels; the operator is symmetric positive definite there.

    Returns the full-frame solution field, not clipped to [0, 1].  The
    iteration stops when every interior pixel's equation residual is below
    ``tol``; if ``max_iter`` (default ``10 * |region|``) is exhausted first,
    raises NonConvergenceError.

    When ``energy_history`` is given, the CG energy  0.5 x'Ax - b'x  is
    appended once per iteration; it is non-increasing.
    """
    fg = np.asarray(fg, dtype=np.float64)
    bg = np.asarray(bg, dtype=np.float64)
    inside = np.asarray(region, dtype=bool)
    if fg.shape != bg.shape or fg.shape != inside.shape:
        raise DimensionMismatchError(
            f"shape mismatch: fg {fg.shape}, bg {bg.shape}, region {inside.shape}"
        )
    n_inside = int(inside.sum())
    if n_inside == 0:
        raise EmptyRegionError("blend region is empty")
    if inside[0, :].any() or inside[-1, :].any() or inside[:, 0].any() or inside[:, -1].any():
        raise RegionTouchesBorderError(
            "blend region touches the image border; no boundary values available"
        )
    if max_iter is None:
        max_iter = 10 * n_inside

    idx = np.nonzero(inside)
    h, w = inside.shape

    def apply_a(vec: np.ndarray) -> np.ndarray:
        """A restricted to interior unknowns (zero Dirichlet lift)."""
        field = np.zeros((h, w))
        field[idx] = vec
        return _laplacian(field)[idx]

    # b folds the donor Laplacian and the boundary (background) values in
    bg_fixed = np.where(inside, 0.0, bg)
    b = _laplacian(fg)[idx] - _laplacian(bg_fixed)[idx]

    x = np.zeros(n_inside)
    r = b - apply_a(x)
    p = r.copy()
    rs = float(r @ r)
    converged = np.abs(r).max() < tol if rs > 0 else True
    it = 0
    while not converged:
        if it >= max_iter:
            raise NonConvergenceError(
                f"Poisson solve: residual {np.abs(r).max():.3e} after {it} iterations"
            )
        ap = apply_a(p)
        pap = float(p @ ap)
        if pap <= 0.0:
            raise NonConvergenceError("Poisson solve: operator lost definiteness")
        alpha = rs / pap
        x = x + alpha * p
        r = r - alpha * ap
        rs_new = float(r @ r)
        if energy_history is not None:
            energy_history.append(0.5 * float(x @ apply_a(x)) - float(b @ x))
        it += 1
        if np.abs(r).max() < tol:
            # recompute the residual from scratch to rule out drift
            r = b - apply_a(x)
            rs_new = float(r @ r)
            if np.abs(r).max() < tol:
                converged = True
            else:
                p = r.copy()  # restart with the fresh residual
                rs = rs_new
            continue
        p = r + (rs_new / rs) * p
        rs = rs_new

    out = bg.copy()
    out[idx] = x
    return out


def poisson_blend(
    fg: np.ndarray,
    bg: np.ndarray,
    mask: np.ndarray,
    tol: float = 1e-6,
    max_iter: int | None = None,
) -> np.ndarray:
    """Gradient-domain composite of fg into bg over ``mask > 0.5``.

    Each channel is solved independently; the result is clipped to [0, 1].
    """
    fg = np.asarray(fg, dtype=np.float64)
    bg = np.asarray(bg, dtype=np.float64)
    mask = np.asarray(mask, dtype=np.float64)
    if fg.shape != bg.shape or fg.shape[:2] != mask.shape:
        raise DimensionMismatchError(
            f"shape mismatch: fg {fg.shape}, bg {bg.shape}, mask {mask.shape}"
        )
    region = mask > 0.5
    if fg.ndim == 2:
        out = solve_poisson(fg, bg, region, tol=tol, max_iter=max_iter)
        return np.clip(out, 0.0, 1.0)
    out = np.empty_like(bg)
    for c in range(fg.shape[2]):
        out[..., c] = solve_poisson(fg[..., c], bg[..., c], region, tol=tol, max_iter=max_iter)
    return np.clip(out, 0.0, 1.0)
