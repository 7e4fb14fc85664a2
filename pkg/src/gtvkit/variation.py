"""Reconstruction of the first-order variation ``u_eps`` from a computed tangent.

The captured shocks of the numerical state are smeared over a few cells, so
the state is first de-smeared inside a band of ``K`` cells around each tracked
shock.  The first-order variation then adds ``eps * v`` and moves every jump
by ``eps * xi``.  Shifted bands are rasterized by exact cell-overlap fraction.
"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from gtvkit.errors import InteractionError
from gtvkit.fvsolver import Grid
from gtvkit.gtv import ShockRecord


def reconstruct_ux(u: np.ndarray, dx: float) -> np.ndarray:
    """Cellwise slope: the one-sided difference of smaller magnitude.

    Applied componentwise; the end cells use their only available
    one-sided difference.
    """
    u = np.asarray(u, dtype=np.float64)
    diff = np.diff(u, axis=0) / dx

    fwd = np.empty_like(u)
    bwd = np.empty_like(u)
    fwd[:-1] = diff
    fwd[-1] = diff[-1]
    bwd[1:] = diff
    bwd[0] = diff[0]
    return np.where(np.abs(fwd) < np.abs(bwd), fwd, bwd)


def reconstruct_u_tilde(u: np.ndarray, shocks: Sequence[ShockRecord], K: int,
                        grid: Grid) -> np.ndarray:
    """Replace the smeared profile near each shock by its one-sided limits.

    Cells whose centre lies in ``[x - K dx, x)`` take ``u-`` and those in
    ``[x, x + K dx]`` take ``u+``.
    """
    out = np.array(u, dtype=np.float64)
    x = grid.centers
    width = K * grid.dx
    owner = np.full(grid.nx, -1)
    for a, shock in enumerate(shocks):
        left = (x >= shock.x_pos - width) & (x < shock.x_pos)
        right = (x >= shock.x_pos) & (x <= shock.x_pos + width)
        band = left | right
        if np.any(owner[band] >= 0):
            raise InteractionError("de-smearing bands of neighbouring shocks overlap")
        owner[band] = a
        out[left] = shock.u_minus
        out[right] = shock.u_plus
    return out


def shift_band(grid: Grid, shock: ShockRecord, epsilon: float) -> np.ndarray:
    """Signed cellwise contribution of moving one jump by ``epsilon * xi``."""
    jump = np.asarray(shock.u_plus) - np.asarray(shock.u_minus)
    shift = epsilon * shock.xi
    frac = grid.overlap(shock.x_pos, shock.x_pos + shift)
    sign = 1.0 if shift < 0.0 else -1.0
    return sign * frac[:, None] * jump[None, :]


def first_order_variation(u_tilde: np.ndarray, v: np.ndarray,
                          shocks: Sequence[ShockRecord], epsilon: float,
                          grid: Grid) -> np.ndarray:
    """``u_tilde + eps v`` with every jump moved by ``eps * xi``."""
    if epsilon < 0.0:
        raise ValueError(f"epsilon must be nonnegative, got {epsilon}")

    out = np.asarray(u_tilde, dtype=np.float64) + epsilon * np.asarray(v, dtype=np.float64)
    for shock in shocks:
        if shock.xi != 0.0:
            out += shift_band(grid, shock, epsilon)
    return out
