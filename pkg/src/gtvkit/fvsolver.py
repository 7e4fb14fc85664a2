"""First-order conservative finite-volume evolution with global Lax-Friedrichs flux.

Cell fields are plain arrays of shape ``(nx, n)``.  Two boundary closures
are available: ``"zero-flux"`` sets the numerical flux through both domain
ends to zero, ``"outflow"`` copies the boundary cells into ghost cells.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from gtvkit.errors import OutOfRangeError, StepRejectedError
from gtvkit.model import SystemModel

BOUNDARY_MODES = ("zero-flux", "outflow")


@dataclass(frozen=True)
class Grid:
    """Uniform partition of ``[x_lo, x_hi]`` into ``nx`` cells."""

    x_lo: float
    x_hi: float
    nx: int

    def __post_init__(self):
        if self.nx < 1 or not self.x_hi > self.x_lo:
            raise ValueError(f"invalid grid [{self.x_lo}, {self.x_hi}] with {self.nx} cells")

    @property
    def dx(self) -> float:
        return (self.x_hi - self.x_lo) / self.nx

    @property
    def centers(self) -> np.ndarray:
        return self.x_lo + (np.arange(self.nx) + 0.5) * self.dx

    @property
    def faces(self) -> np.ndarray:
        return self.x_lo + np.arange(self.nx + 1) * self.dx

    def cell_of(self, x: float) -> int:
        """Index ``j`` with ``x`` in cell ``j``."""
        if not self.x_lo <= x < self.x_hi:
            raise OutOfRangeError(f"x={x} outside [{self.x_lo}, {self.x_hi})")
        return min(int(math.floor((x - self.x_lo) / self.dx)), self.nx - 1)

    def overlap(self, a: float, b: float) -> np.ndarray:
        """Fraction of each cell covered by ``[a, b]``."""
        lo, hi = min(a, b), max(a, b)
        left = self.faces[:-1]
        right = self.faces[1:]
        return np.clip(np.minimum(right, hi) - np.maximum(left, lo), 0.0, None) / self.dx

    def piecewise_constant(self, breaks, states) -> np.ndarray:
        """Exact cell averages of piecewise-constant data.

        ``states[i]`` holds on ``(breaks[i-1], breaks[i])`` with the outer
        pieces extending to the domain ends.
        """
        states = [np.atleast_1d(np.asarray(s, dtype=np.float64)) for s in states]
        if len(states) != len(breaks) + 1:
            raise ValueError("need one more state than breakpoints")
        edges = [self.x_lo, *breaks, self.x_hi]
        out = np.zeros((self.nx, states[0].size))
        for lo, hi, s in zip(edges[:-1], edges[1:], states):
            out += self.overlap(lo, hi)[:, None] * s[None, :]
        return out


def max_speed(u: np.ndarray, model: SystemModel) -> float:
    return float(np.max(model.spectral_radius_cells(u)))


def cfl_dt(u: np.ndarray, model: SystemModel, c_cfl: float, dx: float,
           t: float | None = None, t_out: float | None = None) -> float:
    """Time step ``c_cfl * dx / L`` with ``L`` the largest spectral radius.

    If ``t`` and ``t_out`` are given the step is shortened so that it does not
    overshoot ``t_out``.
    """
    if not 0.0 < c_cfl <= 1.0:
        raise ValueError(f"CFL number must lie in (0, 1], got {c_cfl}")
    model.check_cells(u)
    speed = max_speed(u, model)
    if speed == 0.0:
        warnings.warn("all wave speeds vanish; using unit-speed time step",
                      RuntimeWarning, stacklevel=2)
        speed = 1.0

    dt = c_cfl * dx / speed
    if t is not None and t_out is not None:
        dt = min(dt, t_out - t)
    return dt


def lf_state_flux(u_l, u_r, L: float, model: SystemModel) -> np.ndarray:
    """Global Lax-Friedrichs flux between two states."""
    u_l = model.check(u_l)
    u_r = model.check(u_r)
    return 0.5 * (model.flux(u_l) + model.flux(u_r) - L * (u_r - u_l))


def _with_ghosts(a: np.ndarray) -> np.ndarray:
    return np.concatenate([a[:1], a, a[-1:]], axis=0)


def conservative_update(q: np.ndarray, f: np.ndarray, dt: float, dx: float, L: float,
                        boundary: str) -> np.ndarray:
    """``q - dt/dx (F_{j+1/2} - F_{j-1/2})`` with global Lax-Friedrichs fluxes.

    *f* is the physical flux evaluated in every cell.  Outflow ghost cells
    copy their neighbour, so their flux is the boundary cell's flux.
    """
    if boundary == "outflow":
        qg = _with_ghosts(q)
        fg = _with_ghosts(f)
        F = 0.5 * (fg[:-1] + fg[1:] - L * (qg[1:] - qg[:-1]))
    elif boundary == "zero-flux":
        F = np.zeros((q.shape[0] + 1, q.shape[1]))
        F[1:-1] = 0.5 * (f[:-1] + f[1:] - L * (q[1:] - q[:-1]))
    else:
        raise ValueError(f"unknown boundary mode {boundary!r}; expected one of {BOUNDARY_MODES}")

    return q - (dt / dx) * (F[1:] - F[:-1])


def check_cfl(dt: float, dx: float, L: float) -> None:
    if dt <= 0.0 or dt * L / dx > 1.0 + 1.0e-12:
        raise StepRejectedError(f"CFL violated: dt*L/dx = {dt * L / dx:.4f}")


def state_step(u: np.ndarray, dt: float, dx: float, model: SystemModel,
               boundary: str = "outflow", L: float | None = None) -> np.ndarray:
    """One explicit Euler step of the conservative scheme for the state."""
    model.check_cells(u)
    if L is None:
        L = max_speed(u, model)
    check_cfl(dt, dx, L)

    return conservative_update(u, model.flux_cells(u), dt, dx, L, boundary)


def advance_time(t: float, dt: float, t_end: float) -> float:
    """``t + dt``, snapped onto ``t_end`` when the step was clamped to reach it."""
    t_new = t + dt
    if t_new >= t_end - 1.0e-12 * max(1.0, abs(t_end)):
        return t_end
    return t_new


def evolve(u0: np.ndarray, grid: Grid, model: SystemModel, t_end: float,
           c_cfl: float, boundary: str = "outflow") -> np.ndarray:
    """March the state alone from ``t = 0`` to exactly ``t_end``."""
    u = np.array(u0, dtype=np.float64)
    t = 0.0
    while t < t_end:
        dt = cfl_dt(u, model, c_cfl, grid.dx, t, t_end)
        L = max_speed(u, model)
        u = state_step(u, dt, grid.dx, model, boundary, L=L)
        t = advance_time(t, dt, t_end)
    return u
