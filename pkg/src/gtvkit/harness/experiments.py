"""Reference experiments, the GTV pipeline, oracles and epsilon sweeps."""

from __future__ import annotations

import csv
import dataclasses
import io
import time
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from gtvkit import gtv, multishock
from gtvkit.errors import InteractionError, NotApplicableError
from gtvkit.fvsolver import BOUNDARY_MODES, Grid, advance_time, cfl_dt, evolve, max_speed, state_step
from gtvkit.gtv import ShockRecord, extract_limits, init_tangent, make_shock, tangent_step
from gtvkit.harness import exact
from gtvkit.model import Burgers, PSystem, SystemModel
from gtvkit.variation import first_order_variation, reconstruct_u_tilde, reconstruct_ux

ORACLES = ("analytic", "numeric", "numeric-sharp")


# {{{ configuration

@dataclass(frozen=True)
class RunConfig:
    experiment: str
    x_lo: float
    x_hi: float
    nx: int
    cfl: float
    K: int
    t_end: float
    eps: tuple[float, ...]
    oracle: str
    J: int = 0
    boundary: str = "outflow"
    out: str | None = None
    timing: bool = True

    def __post_init__(self):
        object.__setattr__(self, "eps", tuple(float(e) for e in self.eps))
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.experiment!r}; "
                             f"choose from {sorted(EXPERIMENTS)}")
        if not self.x_hi > self.x_lo:
            raise ValueError("domain must have x_hi > x_lo")
        if self.K < 0 or self.J < 0:
            raise ValueError("K and J must be nonnegative")
        if self.nx < 2 * (self.K + 1):
            raise ValueError(f"nx={self.nx} too small for K={self.K}")
        if not 0.0 < self.cfl <= 1.0:
            raise ValueError(f"CFL number must lie in (0, 1], got {self.cfl}")
        if not self.t_end > 0.0:
            raise ValueError(f"t_end must be positive, got {self.t_end}")
        if any(e <= 0.0 for e in self.eps) or any(np.diff(self.eps) <= 0.0):
            raise ValueError("epsilon values must be positive and strictly increasing")
        if self.oracle not in ORACLES:
            raise ValueError(f"unknown oracle {self.oracle!r}; choose from {ORACLES}")
        if self.boundary not in BOUNDARY_MODES:
            raise ValueError(f"unknown boundary {self.boundary!r}; choose from {BOUNDARY_MODES}")

    @property
    def grid(self) -> Grid:
        return Grid(self.x_lo, self.x_hi, self.nx)

    @property
    def model_id(self) -> str:
        return EXPERIMENTS[self.experiment].model_id

    def replace(self, **changes) -> RunConfig:
        return dataclasses.replace(self, **changes)

    def scaled(self, scale: int) -> RunConfig:
        """Same experiment on a grid coarser by the integer factor *scale*."""
        if scale < 1:
            raise ValueError(f"scale must be a positive integer, got {scale}")
        return self.replace(nx=self.nx // scale)

# }}}


# {{{ experiment registry

@dataclass(frozen=True)
class Experiment:
    """Initial data, tracked shocks and reference values of one test problem.

    ``shocks`` holds ``(x0, xi0, family)`` per shock; the perturbed problem
    with parameter eps has its jumps at ``x0 + eps * xi0``.
    """

    name: str
    model_id: str
    defaults: dict
    initial_state: Callable[[float, Grid], np.ndarray]
    initial_tangent: Callable[[Grid], np.ndarray]
    shocks: tuple[tuple[float, float, int], ...]
    exact_xi: Callable[[float], tuple[float, ...]]
    exact_x: Callable[[float], tuple[float, ...]]
    analytic: Callable[[float, float, Grid], np.ndarray] | None = None

    def model(self) -> SystemModel:
        return MODELS[self.model_id]()

    def config(self, **overrides) -> RunConfig:
        return RunConfig(experiment=self.name, **{**self.defaults, **overrides})


MODELS: dict[str, Callable[[], SystemModel]] = {"burgers": Burgers, "psystem": PSystem}


def _burgers_state(eps: float, grid: Grid) -> np.ndarray:
    return exact.ramp_cells(grid, 1.0 + eps, 1.0)


def _psystem_state(eps: float, grid: Grid) -> np.ndarray:
    return exact.psystem_exact_cells(eps, 0.0, grid)


def _psystem_tangent(grid: Grid) -> np.ndarray:
    return grid.piecewise_constant([0.0], [exact.PSYSTEM_V_LEFT, exact.PSYSTEM_V_RIGHT])


_TWO = exact.twoshock_setup()


def _twoshock_state(eps: float, grid: Grid) -> np.ndarray:
    breaks = [x + eps * xi for x, xi in zip(_TWO.positions(0.0), _TWO.xi0)]
    states = [s + eps * w for s, w in zip(_TWO.states, _TWO.w_states)]
    return grid.piecewise_constant(breaks, states)


def _twoshock_tangent(grid: Grid) -> np.ndarray:
    return grid.piecewise_constant(list(_TWO.positions(0.0)), list(_TWO.w_states))


def _geometric(start: float, ratio: float, count: int) -> tuple[float, ...]:
    return tuple(start * ratio**i for i in range(count))


EXPERIMENTS: dict[str, Experiment] = {
    "burgers": Experiment(
        name="burgers",
        model_id="burgers",
        defaults=dict(x_lo=0.0, x_hi=2.0, nx=20000, cfl=0.1, K=10, t_end=0.2,
                      eps=_geometric(0.05, 1.5, 6), oracle="analytic"),
        initial_state=_burgers_state,
        initial_tangent=lambda grid: exact.ramp_cells(grid, 1.0, 1.0),
        shocks=((1.0, 0.0, 1),),
        exact_xi=lambda t: (exact.burgers_exact_xi(t),),
        exact_x=lambda t: (exact.burgers_shock_position(0.0, t),),
        analytic=exact.burgers_exact_cells,
    ),
    "psystem": Experiment(
        name="psystem",
        model_id="psystem",
        defaults=dict(x_lo=-np.pi, x_hi=np.pi, nx=20000, cfl=0.5, K=20, t_end=0.5,
                      eps=_geometric(0.05, 1.5, 6), oracle="analytic"),
        initial_state=_psystem_state,
        initial_tangent=_psystem_tangent,
        shocks=((0.0, 0.0, 2),),
        exact_xi=lambda t: (exact.psystem_exact_xi(t),),
        exact_x=lambda t: (exact.psystem_shock_position(0.0, t),),
        analytic=exact.psystem_exact_cells,
    ),
    "psystem-twoshock": Experiment(
        name="psystem-twoshock",
        model_id="psystem",
        # Largest eps must stay below 0.241: beyond it the perturbed middle
        # state no longer lies above the left density and the 1-shock is lost.
        defaults=dict(x_lo=-np.pi, x_hi=np.pi, nx=20000, cfl=0.1, K=50, t_end=0.2,
                      eps=tuple(reversed(_geometric(0.2, 1.0 / 1.5, 8))),
                      oracle="numeric-sharp"),
        initial_state=_twoshock_state,
        initial_tangent=_twoshock_tangent,
        shocks=tuple(zip(_TWO.positions(0.0), _TWO.xi0, (1, 2))),
        exact_xi=_TWO.reference_xi,
        exact_x=_TWO.positions,
    ),
}


def get_experiment(name: str) -> Experiment:
    try:
        return EXPERIMENTS[name]
    except KeyError:
        raise ValueError(f"unknown experiment {name!r}; choose from {sorted(EXPERIMENTS)}") from None


def default_config(name: str, **overrides) -> RunConfig:
    return get_experiment(name).config(**overrides)

# }}}


# {{{ GTV pipeline

@dataclass
class GTVResult:
    config: RunConfig
    u: np.ndarray
    w_fields: list[np.ndarray]
    shocks: list[ShockRecord]
    u_tilde: np.ndarray
    ux: np.ndarray
    v: np.ndarray
    nsteps: int
    runtime_s: float

    @property
    def xi(self) -> tuple[float, ...]:
        return tuple(s.xi for s in self.shocks)

    @property
    def x(self) -> tuple[float, ...]:
        return tuple(s.x_pos for s in self.shocks)

    def variation(self, epsilon: float) -> np.ndarray:
        return first_order_variation(self.u_tilde, self.v, self.shocks, epsilon,
                                     self.config.grid)


def initial_shocks(config: RunConfig, u0: np.ndarray, v0: np.ndarray):
    """Initial shifted tangents and shock records of an experiment."""
    exp = get_experiment(config.experiment)
    grid = config.grid
    ux0 = reconstruct_ux(u0, grid.dx)
    w_fields, shocks = [], []
    for x0, xi0, fam in exp.shocks:
        w = init_tangent(v0, xi0, ux0)
        w_fields.append(w)
        shocks.append(make_shock(x0, xi0, fam, u0, w, grid, config.K))
    return w_fields, shocks


def run_gtv(config: RunConfig) -> GTVResult:
    """Solve state, shifted tangents and shifts to ``t_end`` and rebuild ``v``."""
    exp = get_experiment(config.experiment)
    model = exp.model()
    grid = config.grid
    u0 = exp.initial_state(0.0, grid)
    v0 = exp.initial_tangent(grid)
    w_fields, shocks = initial_shocks(config, u0, v0)

    t0 = time.perf_counter()
    if len(shocks) == 1:
        run = gtv.solve(u0, w_fields[0], shocks[0], grid, model, config.t_end,
                        config.cfl, config.K, config.boundary)
        u, w_fields, shocks, nsteps = run.u, [run.w], [run.shock], run.nsteps
    else:
        run = multishock.solve(u0, w_fields, shocks, grid, model, config.t_end,
                               config.cfl, config.K, config.J, config.boundary)
        u, w_fields, shocks, nsteps = run.u, run.w_fields, run.shocks, run.nsteps
    runtime = time.perf_counter() - t0

    u_tilde = reconstruct_u_tilde(u, shocks, config.K, grid)
    ux = reconstruct_ux(u_tilde, grid.dx)
    part = multishock.partition(shocks, grid, config.J)
    v = multishock.assemble_v(w_fields, [s.xi for s in shocks], ux, part)
    return GTVResult(config=config, u=u, w_fields=w_fields, shocks=shocks,
                     u_tilde=u_tilde, ux=ux, v=v, nsteps=nsteps, runtime_s=runtime)

# }}}


# {{{ oracles

def tracked_evolve(u0: np.ndarray, positions: Sequence[float], families: Sequence[int],
                   grid: Grid, model: SystemModel, t_end: float, c_cfl: float, K: int,
                   boundary: str = "outflow") -> tuple[np.ndarray, list[float]]:
    """Evolve the state and move each jump with the RH speed of its offset limits."""
    u = np.array(u0, dtype=np.float64)
    xs = list(positions)
    t = 0.0
    while t < t_end:
        dt = cfl_dt(u, model, c_cfl, grid.dx, t, t_end)
        L = max_speed(u, model)
        moved = []
        for x, fam in zip(xs, families):
            um, up = extract_limits(u, grid.cell_of(x), K)
            moved.append(x + dt * model.shock_speed(um, up, fam))
        u = state_step(u, dt, grid.dx, model, boundary, L=L)
        xs = moved
        t = advance_time(t, dt, t_end)
    return u, xs


def sharpen(u: np.ndarray, positions: Sequence[float], K: int, grid: Grid) -> np.ndarray:
    """Replace each smeared jump by its offset limits, split at the given position.

    Cells whose centre lies within ``K dx`` of a position are overwritten;
    the cell containing the position receives the overlap-weighted mix.
    """
    out = np.array(u, dtype=np.float64)
    x = grid.centers
    taken = np.zeros(grid.nx, dtype=bool)
    for xp in positions:
        um, up = extract_limits(u, grid.cell_of(xp), K)
        band = np.abs(x - xp) <= K * grid.dx
        if np.any(taken & band):
            raise InteractionError("sharpening bands of neighbouring shocks overlap")
        taken |= band
        left = grid.overlap(grid.x_lo, xp)[band, None]
        out[band] = left * um + (1.0 - left) * up
    return out


def fd_oracle(config: RunConfig, epsilon: float) -> np.ndarray:
    """Perturbed solution ``u^eps`` at ``t_end`` as cell averages.

    ``analytic`` uses the closed-form solution; ``numeric`` solves the
    perturbed problem with the same scheme and grid; ``numeric-sharp`` also
    tracks the perturbed shocks and de-smears them.
    """
    exp = get_experiment(config.experiment)
    grid = config.grid
    if config.oracle == "analytic":
        if exp.analytic is None:
            raise NotApplicableError(f"{exp.name} has no closed-form solution")
        return exp.analytic(epsilon, config.t_end, grid)

    model = exp.model()
    u0 = exp.initial_state(epsilon, grid)
    if config.oracle == "numeric":
        return evolve(u0, grid, model, config.t_end, config.cfl, config.boundary)

    positions = [x0 + epsilon * xi0 for x0, xi0, _ in exp.shocks]
    families = [fam for _, _, fam in exp.shocks]
    u, xs = tracked_evolve(u0, positions, families, grid, model, config.t_end,
                           config.cfl, config.K, config.boundary)
    return sharpen(u, xs, config.K, grid)


def l1_diff(a: np.ndarray, b: np.ndarray, dx: float) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    return float(np.sum(np.abs(a - b)) * dx)

# }}}


# {{{ sweeps and reports

def loglog_slope(eps: Sequence[float], values: Sequence[float]) -> float:
    """Least-squares slope of ``log values`` against ``log eps``."""
    return float(np.polyfit(np.log(eps), np.log(values), 1)[0])


@dataclass
class ExperimentReport:
    config: RunConfig
    eps: tuple[float, ...]
    l1: tuple[float, ...]
    xi_final: tuple[float, ...]
    x_final: tuple[float, ...]
    xi_exact: tuple[float, ...]
    x_exact: tuple[float, ...]
    runtime_s: float

    @property
    def slope(self) -> float:
        return loglog_slope(self.eps, self.l1)

    def tail_slope(self, count: int = 3) -> float:
        """Slope over the *count* largest perturbations."""
        return loglog_slope(self.eps[-count:], self.l1[-count:])

    @property
    def xi_rel_err(self) -> tuple[float, ...]:
        return tuple(abs(a - b) / abs(b) for a, b in zip(self.xi_final, self.xi_exact))

    @property
    def floor(self) -> float:
        return self.l1[0]


def convergence_sweep(config: RunConfig, result: GTVResult | None = None) -> ExperimentReport:
    """Compare ``u_eps`` from one GTV run with the oracle for every eps."""
    exp = get_experiment(config.experiment)
    if result is None:
        result = run_gtv(config)
    t0 = time.perf_counter()
    l1 = []
    for e in config.eps:
        l1.append(l1_diff(fd_oracle(config, e), result.variation(e), config.grid.dx))
    runtime = result.runtime_s + time.perf_counter() - t0
    return ExperimentReport(config=config, eps=config.eps, l1=tuple(l1),
                            xi_final=result.xi, x_final=result.x,
                            xi_exact=tuple(exp.exact_xi(config.t_end)),
                            x_exact=tuple(exp.exact_x(config.t_end)),
                            runtime_s=runtime)


def csv_text(report: ExperimentReport) -> str:
    """One row per eps; ``runtime_s`` is written as 0 when timing is off."""
    nsh = len(report.xi_final)
    header = (["epsilon", "l1_diff"] + [f"xi_final_{a + 1}" for a in range(nsh)]
              + [f"x_final_{a + 1}" for a in range(nsh)] + ["runtime_s"])
    runtime = report.runtime_s if report.config.timing else 0.0
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for e, l1 in zip(report.eps, report.l1):
        writer.writerow([repr(e), repr(l1), *map(repr, report.xi_final),
                         *map(repr, report.x_final), repr(runtime)])
    return buf.getvalue()


def write_csv(report: ExperimentReport, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(csv_text(report))
    return path

# }}}


# {{{ negative control

@dataclass(frozen=True)
class NaiveReport:
    """Peak of the naively stepped variation near the shock vs. away from it."""

    t: float
    max_near: float
    max_plateau: float

    @property
    def ratio(self) -> float:
        return self.max_near / self.max_plateau


def naive_control(config: RunConfig, t_end: float = 0.05, window: int | None = None) -> NaiveReport:
    """Step the variation with the plain linearized scheme, no shift and no change of variables.

    The discrete tangent flux is ``A(u) v`` with zero shift rate; near the
    shock the result develops a spike that does not vanish under refinement.
    The window around the exact shock position spans ``2K`` cells on each side
    unless *window* is given.
    """
    exp = get_experiment(config.experiment)
    if len(exp.shocks) != 1:
        raise NotApplicableError("the negative control needs a single-shock experiment")
    model = exp.model()
    grid = config.grid
    u = exp.initial_state(0.0, grid)
    v = exp.initial_tangent(grid)

    t = 0.0
    while t < t_end:
        dt = cfl_dt(u, model, config.cfl, grid.dx, t, t_end)
        L = max_speed(u, model)
        u, v = (state_step(u, dt, grid.dx, model, config.boundary, L=L),
                tangent_step(v, u, 0.0, dt, grid.dx, model, config.boundary, L=L))
        t = advance_time(t, dt, t_end)

    width = 2 * config.K if window is None else window
    host = grid.cell_of(exp.exact_x(t_end)[0])
    near = np.zeros(grid.nx, dtype=bool)
    near[max(host - width, 0):host + width + 1] = True
    mag = np.max(np.abs(v), axis=1)
    return NaiveReport(t=t_end, max_near=float(mag[near].max()),
                       max_plateau=float(mag[~near].max()))

# }}}
