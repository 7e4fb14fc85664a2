"""Several non-interacting shocks, each with its own shifted tangent.

Every tracked shock ``a`` owns a block of cells ``D_a = [lo_a, hi_a]``.
Neighbouring blocks overlap in ``2J + 1`` cells centred on the midpoint
between the two host cells.  Each shifted tangent ``w_a`` is advanced with its
own shift rate; outside ``D_a`` it is refilled from the owning neighbour via

    w_a = w_b + (xi_a - xi_b) * u_x,

so that the tangent stencil at the block edge sees a consistent value.  The
blocks are rebuilt from the shock positions at every step.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from gtvkit.errors import InteractionError, PartitionError
from gtvkit.fvsolver import Grid, advance_time, cfl_dt, max_speed, state_step
from gtvkit.gtv import (
    ShockRecord,
    locate,
    shock_position_update,
    tangent_step,
    update_shift,
    xi_rate,
)
from gtvkit.variation import reconstruct_ux


@dataclass(frozen=True)
class DomainPartition:
    """Inclusive cell ranges ``(lo, hi)`` per shock plus the overlap half-width."""

    ranges: tuple[tuple[int, int], ...]
    J: int
    nx: int

    def owned(self) -> list[tuple[int, int]]:
        """Half-open index ranges used to assemble the global variation.

        Interior ranges are ``[lo + J, hi - J)``; the outermost ranges are
        extended to the grid ends.
        """
        out = []
        last = len(self.ranges) - 1
        for a, (lo, hi) in enumerate(self.ranges):
            start = 0 if a == 0 else lo + self.J
            stop = self.nx if a == last else hi - self.J
            out.append((start, stop))
        return out

    def owner(self) -> np.ndarray:
        owner = np.full(self.nx, -1)
        for a, (start, stop) in enumerate(self.owned()):
            owner[start:stop] = a
        if np.any(owner < 0):
            raise PartitionError("some cells are not owned by any shock block")
        return owner


def partition(shocks: Sequence[ShockRecord], grid: Grid, J: int = 0) -> DomainPartition:
    """Split the grid into one block per shock, sorted left to right."""
    if J < 0:
        raise ValueError(f"overlap half-width must be nonnegative, got {J}")
    if not shocks:
        raise ValueError("need at least one shock")

    hosts = [grid.cell_of(s.x_pos) for s in shocks]
    for a in range(len(hosts) - 1):
        if hosts[a + 1] - hosts[a] <= 2 * (J + 1):
            raise InteractionError(
                f"shocks {a} and {a + 1} are {hosts[a + 1] - hosts[a]} cells apart; "
                f"need more than {2 * (J + 1)}")

    lo = [0] * len(hosts)
    hi = [grid.nx - 1] * len(hosts)
    for a in range(len(hosts) - 1):
        mid = (hosts[a] + hosts[a + 1]) // 2
        hi[a] = mid + J
        lo[a + 1] = mid - J

    return DomainPartition(ranges=tuple(zip(lo, hi)), J=J, nx=grid.nx)


def glue_boundary_value(w_neighbor, xi_self: float, xi_neighbor: float, ux) -> np.ndarray:
    """Neighbour's shifted tangent re-expressed in this shock's frame."""
    return np.asarray(w_neighbor) + (xi_self - xi_neighbor) * np.asarray(ux)


def assemble_v(w_fields: Sequence[np.ndarray], xis: Sequence[float], ux: np.ndarray,
               part: DomainPartition) -> np.ndarray:
    """Global variation ``v = w_a - xi_a u_x`` taken from each owning block."""
    part.owner()
    v = np.empty_like(np.asarray(w_fields[0], dtype=np.float64))
    for a, (start, stop) in enumerate(part.owned()):
        v[start:stop] = w_fields[a][start:stop] - xis[a] * ux[start:stop]
    return v


def refill(w_fields: Sequence[np.ndarray], xis: Sequence[float], ux: np.ndarray,
           part: DomainPartition) -> list[np.ndarray]:
    """Overwrite each ``w_a`` outside its block with glued neighbour values."""
    if len(w_fields) == 1:
        return [w_fields[0]]

    owner = part.owner()
    out = []
    for a, (lo, hi) in enumerate(part.ranges):
        w = np.array(w_fields[a], dtype=np.float64)
        outside = np.ones(part.nx, dtype=bool)
        outside[lo:hi + 1] = False
        for b in range(len(w_fields)):
            idx = outside & (owner == b)
            if b != a and np.any(idx):
                w[idx] = glue_boundary_value(w_fields[b][idx], xis[a], xis[b], ux[idx])
        out.append(w)
    return out


def multishock_step(u: np.ndarray, w_fields: Sequence[np.ndarray],
                    shocks: Sequence[ShockRecord], dt: float, grid: Grid, model,
                    K: int, J: int = 0, boundary: str = "outflow",
                    L: float | None = None):
    """One time step for all tracked shocks; returns ``(u, w_fields, shocks)``."""
    if L is None:
        L = max_speed(u, model)

    part = partition(shocks, grid, J)
    xis = [s.xi for s in shocks]
    if len(shocks) > 1:
        w_fields = refill(w_fields, xis, reconstruct_ux(u, grid.dx), part)

    shocks = [locate(s, u, w, grid, K) for s, w in zip(shocks, w_fields)]
    rates = [xi_rate(s.u_minus, s.u_plus, s.w_minus, s.w_plus, s.family, model)
             for s in shocks]

    u_new = state_step(u, dt, grid.dx, model, boundary, L=L)
    new_fields, new_shocks = [], []
    for s, w, rate in zip(shocks, w_fields, rates):
        xi_new = update_shift(s.xi, rate, dt)
        new_fields.append(tangent_step(w, u, rate, dt, grid.dx, model, boundary, L=L))
        new_shocks.append(shock_position_update(s, dt, model).replace(xi=xi_new))

    return u_new, new_fields, new_shocks


@dataclass
class MultiShockRun:
    u: np.ndarray
    w_fields: list[np.ndarray]
    shocks: list[ShockRecord]
    partition: DomainPartition
    t: float
    nsteps: int


def solve(u0: np.ndarray, w0_fields: Sequence[np.ndarray], shocks: Sequence[ShockRecord],
          grid: Grid, model, t_end: float, c_cfl: float, K: int, J: int = 0,
          boundary: str = "outflow") -> MultiShockRun:
    """March :func:`multishock_step` to exactly ``t_end``."""
    u = np.array(u0, dtype=np.float64)
    w_fields = [np.array(w, dtype=np.float64) for w in w0_fields]
    shocks = list(shocks)
    t, nsteps = 0.0, 0
    while t < t_end:
        dt = cfl_dt(u, model, c_cfl, grid.dx, t, t_end)
        L = max_speed(u, model)
        u, w_fields, shocks = multishock_step(u, w_fields, shocks, dt, grid, model,
                                              K, J, boundary, L=L)
        t = advance_time(t, dt, t_end)
        nsteps += 1

    part = partition(shocks, grid, J)
    if len(shocks) > 1:
        w_fields = refill(w_fields, [s.xi for s in shocks],
                          reconstruct_ux(u, grid.dx), part)
    shocks = [locate(s, u, w, grid, K) for s, w in zip(shocks, w_fields)]
    return MultiShockRun(u=u, w_fields=w_fields, shocks=shocks, partition=part,
                         t=t, nsteps=nsteps)
