r"""Shifted tangent field and shock shift for a single tracked discontinuity.

Near a shock at :math:`x_\alpha` the tangent is carried in the shifted
variable :math:`w = v + \xi u_x`, which obeys the conservation law

.. math::

    w_t + (A(u) w - \xi' u)_x = 0,

while the shift evolves by

.. math::

    \xi' = \langle l_k, [A(u^+) - \bar{A}] w^+ + [\bar{A} - A(u^-)] w^- \rangle,
    \qquad \langle l_k, u^+ - u^- \rangle = 1.

Because the tangent update is conservative, the jump relation for ``w`` across
the shock is reproduced by the scheme itself; no interface condition is
imposed explicitly.

One time step (:func:`advance`) uses data at :math:`t^n` throughout: limits
are extracted ``K`` cells either side of the host cell, the state is
advanced, the shift is advanced with the rate from those limits, ``w`` is
advanced with the same rate and finally the shock position is moved with the
Rankine-Hugoniot speed of the limits.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

import numpy as np

from gtvkit.errors import (
    DegenerateJumpError,
    InvalidStateError,
    NotApplicableError,
    OutOfRangeError,
    ShapeMismatchError,
)
from gtvkit.fvsolver import (
    Grid,
    advance_time,
    cfl_dt,
    check_cfl,
    conservative_update,
    max_speed,
    state_step,
)
from gtvkit.model import SystemModel, eigen

#: Two one-sided states closer than this (in norm) do not form a jump.
JUMP_NORM_TOL = 1.0e-10
#: Step of the central differences used by the diagnostic oracles.
FD_STEP = 1.0e-6


@dataclass(frozen=True)
class ShockRecord:
    """A tracked discontinuity together with its one-sided limits."""

    x_pos: float
    xi: float
    family: int
    host_cell: int
    u_minus: np.ndarray
    u_plus: np.ndarray
    w_minus: np.ndarray
    w_plus: np.ndarray

    def __post_init__(self):
        if np.linalg.norm(np.asarray(self.u_plus) - np.asarray(self.u_minus)) < JUMP_NORM_TOL:
            raise DegenerateJumpError(f"no jump at x = {self.x_pos}")

    def replace(self, **changes) -> ShockRecord:
        return dataclasses.replace(self, **changes)


@dataclass
class TangentState:
    """Shifted tangent field and the shocks it is attached to."""

    w: np.ndarray
    shocks: list[ShockRecord] = field(default_factory=list)

    def __post_init__(self):
        if not np.all(np.isfinite(self.w)):
            raise InvalidStateError("tangent field contains non-finite values")


# {{{ building blocks


def init_tangent(v0: np.ndarray, xi0: float, ux0: np.ndarray) -> np.ndarray:
    """Initial shifted tangent ``w = v + xi * u_x``."""
    v0 = np.asarray(v0, dtype=np.float64)
    ux0 = np.asarray(ux0, dtype=np.float64)
    if v0.shape != ux0.shape:
        raise ShapeMismatchError(f"v0 {v0.shape} and u_x {ux0.shape} differ")
    return v0 + xi0 * ux0


def extract_limits(values: np.ndarray, host_cell: int, K: int) -> tuple[np.ndarray, np.ndarray]:
    """One-sided limits sampled ``K`` cells left and right of the host cell."""
    nx = values.shape[0]
    lo, hi = host_cell - K, host_cell + K
    if K < 0 or lo < 0 or hi >= nx:
        raise OutOfRangeError(f"cells {lo}..{hi} not inside grid of {nx} cells")
    return values[lo].copy(), values[hi].copy()


def plateau_offset(values: np.ndarray, host_cell: int, tol: float | None = None,
                   k_max: int | None = None) -> int:
    """Smallest offset past which the profile is flat on both sides.

    This is an opt-in heuristic for the viscosity offset ``K``: it returns the
    first ``K`` with ``|f[J+K+1] - f[J+K]| < tol`` and the mirrored condition
    on the left.  The default *tol* is ``1e-4`` times the jump size seen at
    ``k_max``.
    """
    values = np.asarray(values, dtype=np.float64).reshape(values.shape[0], -1)
    nx = values.shape[0]
    if k_max is None:
        k_max = min(host_cell - 1, nx - host_cell - 2)
    if tol is None:
        jump = np.max(np.abs(values[host_cell + k_max] - values[host_cell - k_max]))
        tol = 1.0e-4 * jump

    for K in range(1, k_max + 1):
        right = np.max(np.abs(values[host_cell + K + 1] - values[host_cell + K]))
        left = np.max(np.abs(values[host_cell - K - 1] - values[host_cell - K]))
        if right < tol and left < tol:
            return K
    raise OutOfRangeError(f"no plateau found within {k_max} cells of cell {host_cell}")


def locate(shock: ShockRecord, u: np.ndarray, w: np.ndarray, grid: Grid,
           K: int) -> ShockRecord:
    """Recompute the host cell from the position and refresh all limits."""
    host = grid.cell_of(shock.x_pos)
    u_minus, u_plus = extract_limits(u, host, K)
    w_minus, w_plus = extract_limits(w, host, K)
    return shock.replace(host_cell=host, u_minus=u_minus, u_plus=u_plus,
                         w_minus=w_minus, w_plus=w_plus)


def make_shock(x_pos: float, xi: float, family: int, u: np.ndarray, w: np.ndarray,
               grid: Grid, K: int) -> ShockRecord:
    host = grid.cell_of(x_pos)
    u_minus, u_plus = extract_limits(u, host, K)
    w_minus, w_plus = extract_limits(w, host, K)
    return ShockRecord(x_pos=x_pos, xi=xi, family=family, host_cell=host,
                       u_minus=u_minus, u_plus=u_plus, w_minus=w_minus, w_plus=w_plus)


def shock_position_update(shock: ShockRecord, dt: float, model: SystemModel) -> ShockRecord:
    """Move the shock by ``dt`` times the Rankine-Hugoniot speed of its limits."""
    s = model.shock_speed(shock.u_minus, shock.u_plus, shock.family)
    return shock.replace(x_pos=shock.x_pos + dt * s)


def xi_rate(u_minus, u_plus, w_minus, w_plus, family: int, model: SystemModel) -> float:
    """Rate of change of the shock shift from the one-sided limits."""
    u_minus = model.check(u_minus)
    u_plus = model.check(u_plus)
    w_minus = np.asarray(w_minus, dtype=np.float64).reshape(model.n)
    w_plus = np.asarray(w_plus, dtype=np.float64).reshape(model.n)

    abar = model.avg_matrix(u_plus, u_minus)
    l_k = eigen(abar, u_plus, u_minus, family)[family - 1].left
    rhs = ((model.jacobian(u_plus) - abar) @ w_plus
           + (abar - model.jacobian(u_minus)) @ w_minus)
    return float(l_k @ rhs)


def update_shift(xi: float, rate: float, dt: float) -> float:
    return xi + dt * rate


def lf_tangent_flux(w_l, w_r, u_l, u_r, rate: float, L: float,
                    model: SystemModel) -> np.ndarray:
    """Global Lax-Friedrichs flux for the shifted tangent equation."""
    u_l = model.check(u_l)
    u_r = model.check(u_r)
    w_l = np.asarray(w_l, dtype=np.float64).reshape(model.n)
    w_r = np.asarray(w_r, dtype=np.float64).reshape(model.n)
    return 0.5 * (model.jacobian(u_l) @ w_l - rate * u_l
                  + model.jacobian(u_r) @ w_r - rate * u_r
                  - L * (w_r - w_l))


def tangent_flux_cells(w: np.ndarray, u: np.ndarray, rate: float,
                       model: SystemModel) -> np.ndarray:
    return model.apply_jacobian_cells(u, w) - rate * u


def tangent_step(w: np.ndarray, u: np.ndarray, rate: float, dt: float, dx: float,
                 model: SystemModel, boundary: str = "outflow",
                 L: float | None = None) -> np.ndarray:
    """One conservative explicit Euler step for ``w`` with frozen shift rate."""
    if w.shape != u.shape:
        raise ShapeMismatchError(f"w {w.shape} and u {u.shape} differ")
    if L is None:
        L = max_speed(u, model)
    check_cfl(dt, dx, L)
    return conservative_update(w, tangent_flux_cells(w, u, rate, model), dt, dx, L, boundary)


# }}}


# {{{ interface diagnostics


def interface_residual(shock: ShockRecord, rate: float, model: SystemModel) -> float:
    """Norm of the jump in the tangent flux ``s w - A(u) w + xi' u`` across the shock."""
    up, um = model.check(shock.u_plus), model.check(shock.u_minus)
    wp = np.asarray(shock.w_plus, dtype=np.float64).reshape(model.n)
    wm = np.asarray(shock.w_minus, dtype=np.float64).reshape(model.n)
    abar = model.avg_matrix(up, um)
    s = eigen(abar, up, um, shock.family)[shock.family - 1].lam

    plus = s * wp - model.jacobian(up) @ wp + rate * up
    minus = s * wm - model.jacobian(um) @ wm + rate * um
    return float(np.linalg.norm(plus - minus))


def _left_vector(model: SystemModel, u_plus, u_minus, family: int, i: int) -> np.ndarray:
    abar = model.avg_matrix(u_plus, u_minus)
    return eigen(abar, u_plus, u_minus, family)[i - 1].left


def bcw_residual(shock: ShockRecord, model: SystemModel, h: float = FD_STEP) -> np.ndarray:
    """Residual of the original interface condition for each non-shock family.

    Evaluates ``<l_i, w+ - w-> + <Dl_i(u+, u-)(w+, w-), u+ - u->`` with the
    directional derivative of ``l_i`` taken by central differences.  Entries
    are ordered by family index with ``shock.family`` skipped.
    """
    if model.n < 2:
        raise NotApplicableError("scalar laws have no non-shock families")

    up, um = model.check(shock.u_plus), model.check(shock.u_minus)
    wp = np.asarray(shock.w_plus, dtype=np.float64).reshape(model.n)
    wm = np.asarray(shock.w_minus, dtype=np.float64).reshape(model.n)
    jump = up - um

    scale = float(np.linalg.norm(np.concatenate([wp, wm])))
    out = []
    for i in range(1, model.n + 1):
        if i == shock.family:
            continue
        l_i = _left_vector(model, up, um, shock.family, i)
        res = float(l_i @ (wp - wm))
        if scale > 0.0:
            dp, dm = wp / scale, wm / scale
            l_fwd = _left_vector(model, up + h * dp, um + h * dm, shock.family, i)
            l_bwd = _left_vector(model, up - h * dp, um - h * dm, shock.family, i)
            dl = scale * (l_fwd - l_bwd) / (2.0 * h)
            res += float(dl @ jump)
        out.append(res)

    return np.array(out)


# }}}


# {{{ single-shock driver


def advance(u: np.ndarray, w: np.ndarray, shock: ShockRecord, dt: float,
            grid: Grid, model: SystemModel, K: int, boundary: str = "outflow",
            L: float | None = None) -> tuple[np.ndarray, np.ndarray, ShockRecord]:
    """One time step of the coupled state / tangent / shift update."""
    if L is None:
        L = max_speed(u, model)

    shock = locate(shock, u, w, grid, K)
    rate = xi_rate(shock.u_minus, shock.u_plus, shock.w_minus, shock.w_plus,
                   shock.family, model)

    u_new = state_step(u, dt, grid.dx, model, boundary, L=L)
    xi_new = update_shift(shock.xi, rate, dt)
    w_new = tangent_step(w, u, rate, dt, grid.dx, model, boundary, L=L)
    shock = shock_position_update(shock, dt, model).replace(xi=xi_new)

    return u_new, w_new, shock


@dataclass
class SingleShockRun:
    """Output of :func:`solve`: fields at the final time and step statistics."""

    u: np.ndarray
    w: np.ndarray
    shock: ShockRecord
    t: float
    nsteps: int


def solve(u0: np.ndarray, w0: np.ndarray, shock: ShockRecord, grid: Grid,
          model: SystemModel, t_end: float, c_cfl: float, K: int,
          boundary: str = "outflow") -> SingleShockRun:
    """March :func:`advance` to exactly ``t_end``; limits are refreshed at the end."""
    u = np.array(u0, dtype=np.float64)
    w = np.array(w0, dtype=np.float64)
    t, nsteps = 0.0, 0
    while t < t_end:
        dt = cfl_dt(u, model, c_cfl, grid.dx, t, t_end)
        L = max_speed(u, model)
        u, w, shock = advance(u, w, shock, dt, grid, model, K, boundary, L=L)
        t = advance_time(t, dt, t_end)
        nsteps += 1

    shock = locate(shock, u, w, grid, K)
    return SingleShockRun(u=u, w=w, shock=shock, t=t, nsteps=nsteps)


# }}}
