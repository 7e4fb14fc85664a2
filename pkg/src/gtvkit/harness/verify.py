"""Randomized property checks that need no full-resolution runs.

Each check returns a :class:`PropertyResult` holding the worst observed
residual and the tolerance it was held to.
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from gtvkit import gtv, multishock
from gtvkit.fvsolver import Grid, cfl_dt, conservative_update, max_speed, state_step
from gtvkit.gtv import ShockRecord, bcw_residual, interface_residual, tangent_flux_cells, xi_rate
from gtvkit.model import Burgers, PSystem, SystemModel, shock_curve

FD_H = 1.0e-6


@dataclass(frozen=True)
class PropertyResult:
    name: str
    passed: bool
    worst: float
    tol: float
    samples: int

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name}: worst {self.worst:.3e} (tol {self.tol:.0e}, n={self.samples})"


def _result(name: str, residuals, tol: float) -> PropertyResult:
    worst = float(np.max(residuals)) if len(residuals) else 0.0
    return PropertyResult(name, bool(np.isfinite(worst) and worst <= tol), worst, tol,
                          len(residuals))


# {{{ random data

def random_state(rng: np.random.Generator) -> np.ndarray:
    return np.array([rng.uniform(0.5, 3.0), rng.uniform(-2.0, 2.0)])


def random_shock_pair(rng: np.random.Generator, model: PSystem) -> tuple[int, np.ndarray, np.ndarray]:
    """Admissible ``(family, u-, u+)`` on the Hugoniot locus of the p-system."""
    family = int(rng.integers(1, 3))
    u_minus = random_state(rng)
    ratio = rng.uniform(1.2, 3.0) if family == 1 else rng.uniform(0.3, 0.85)
    u_plus = shock_curve(model, family, u_minus, ratio * u_minus[0])
    return family, u_minus, u_plus


def random_burgers_pair(rng: np.random.Generator) -> tuple[int, np.ndarray, np.ndarray]:
    u_minus = rng.uniform(0.5, 3.0)
    u_plus = u_minus - rng.uniform(0.2, 2.0)
    return 1, np.array([u_minus]), np.array([u_plus])

# }}}


# {{{ (a) averaged matrix satisfies the jump identity

def check_avg_matrix_rh(samples: int = 1000, seed: int = 0, tol: float = 1.0e-12) -> PropertyResult:
    rng = np.random.default_rng(seed)
    res = []
    for model in (PSystem(), Burgers()):
        for _ in range(samples):
            if model.n == 2:
                a, b = random_state(rng), random_state(rng)
            else:
                a, b = rng.uniform(-3.0, 3.0, 1), rng.uniform(-3.0, 3.0, 1)
            lhs = model.avg_matrix(a, b) @ (a - b)
            res.append(np.max(np.abs(lhs - (model.flux(a) - model.flux(b)))))
    return _result("averaged matrix maps the jump to the flux jump", res, tol)

# }}}


# {{{ (b) shift rate is the directional derivative of the shock speed

def _lambda(model: SystemModel, u_plus, u_minus, family: int) -> float:
    return model.eigen_at(u_plus, u_minus, family)[family - 1].lam


def check_xi_rate(samples: int = 1000, seed: int = 1, tol: float = 1.0e-5) -> PropertyResult:
    rng = np.random.default_rng(seed)
    res = []
    for model in (PSystem(), Burgers()):
        for _ in range(samples):
            if model.n == 2:
                k, um, up = random_shock_pair(rng, model)
            else:
                k, um, up = random_burgers_pair(rng)
            wm = rng.uniform(-1.0, 1.0, model.n)
            wp = rng.uniform(-1.0, 1.0, model.n)
            fd = (_lambda(model, up + FD_H * wp, um + FD_H * wm, k)
                  - _lambda(model, up - FD_H * wp, um - FD_H * wm, k)) / (2.0 * FD_H)
            res.append(abs(xi_rate(um, up, wm, wp, k, model) - fd))
    return _result("shift rate equals directional derivative of the shock speed", res, tol)

# }}}


# {{{ (c) derivative identities for the left eigenvectors

def _eig_derivatives(model: PSystem, up, um, k: int, i: int, side: str):
    """Central differences of ``l_i`` (rows: d/du_m) and ``lambda_i`` w.r.t. one side."""
    dl = np.zeros((2, 2))
    dlam = np.zeros(2)
    for m in range(2):
        e = np.zeros(2)
        e[m] = FD_H
        if side == "+":
            fwd = model.eigen_at(up + e, um, k)[i - 1]
            bwd = model.eigen_at(up - e, um, k)[i - 1]
        else:
            fwd = model.eigen_at(up, um + e, k)[i - 1]
            bwd = model.eigen_at(up, um - e, k)[i - 1]
        dl[m] = (fwd.left - bwd.left) / (2.0 * FD_H)
        dlam[m] = (fwd.lam - bwd.lam) / (2.0 * FD_H)
    return dl, dlam


def eigen_identity_residual(model: PSystem, up, um, k: int) -> float:
    """Largest residual of both derivative identities over all families."""
    pairs = model.eigen_at(up, um, k)
    abar = model.avg_matrix(up, um)
    jump = up - um
    worst = 0.0
    for i in (1, 2):
        l_i = pairs[i - 1].left
        gap = pairs[k - 1].lam - pairs[i - 1].lam
        for side, mat in (("+", model.jacobian(up) - abar), ("-", abar - model.jacobian(um))):
            dl, dlam = _eig_derivatives(model, up, um, k, i, side)
            lhs = dl @ (gap * jump) + l_i @ mat
            rhs = dlam * float(l_i @ jump)
            worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst


def check_eigen_identities(samples: int = 1000, seed: int = 2, tol: float = 1.0e-5) -> PropertyResult:
    rng = np.random.default_rng(seed)
    model = PSystem()
    res = [eigen_identity_residual(model, up, um, k)
           for k, um, up in (random_shock_pair(rng, model) for _ in range(samples))]
    return _result("left-eigenvector derivative identities", res, tol)

# }}}


# {{{ (d) flux continuity implies the original interface condition

def flux_continuous_tangent(model: SystemModel, k: int, um, up, wm, rate: float) -> np.ndarray:
    """``w+`` making the tangent flux continuous across the shock for given ``w-``."""
    s = _lambda(model, up, um, k)
    eye = np.eye(model.n)
    rhs = (s * eye - model.jacobian(um)) @ wm - rate * (up - um)
    return np.linalg.solve(s * eye - model.jacobian(up), rhs)


def check_bcw(samples: int = 1000, seed: int = 3, tol: float = 1.0e-5) -> PropertyResult:
    rng = np.random.default_rng(seed)
    model = PSystem()
    res = []
    for _ in range(samples):
        k, um, up = random_shock_pair(rng, model)
        wm = rng.uniform(-1.0, 1.0, 2)
        rate = rng.uniform(-2.0, 2.0)
        wp = flux_continuous_tangent(model, k, um, up, wm, rate)
        shock = ShockRecord(x_pos=0.0, xi=0.0, family=k, host_cell=0, u_minus=um,
                            u_plus=up, w_minus=wm, w_plus=wp)
        res.append(max(float(np.max(np.abs(bcw_residual(shock, model)))),
                       interface_residual(shock, rate, model)))
    return _result("flux continuity implies the interface condition", res, tol)

# }}}


# {{{ (e) discrete conservation

def _random_field(rng: np.random.Generator, nx: int) -> np.ndarray:
    x = np.linspace(0.0, 1.0, nx)
    rho = 1.5 + 0.5 * np.sin(2 * np.pi * (x + rng.uniform()))
    q = rng.uniform(-1.0, 1.0) + 0.3 * np.cos(2 * np.pi * x)
    return np.stack([rho, q], axis=1)


def conservation_residual(rng: np.random.Generator, nx: int = 200) -> float:
    model = PSystem()
    dx = 1.0 / nx
    u = _random_field(rng, nx)
    w = rng.uniform(-1.0, 1.0, (nx, 2))
    rate = rng.uniform(-1.0, 1.0)
    dt = cfl_dt(u, model, 0.5, dx)
    L = max_speed(u, model)

    worst = 0.0
    u_new = state_step(u, dt, dx, model, "zero-flux", L=L)
    worst = max(worst, float(np.max(np.abs(u_new.sum(0) - u.sum(0)))) / float(np.abs(u).sum()))
    w_new = gtv.tangent_step(w, u, rate, dt, dx, model, "zero-flux", L=L)
    worst = max(worst, float(np.max(np.abs(w_new.sum(0) - w.sum(0)))) / float(np.abs(w).sum()))

    # With outflow closure the total changes by exactly the two boundary fluxes.
    for q, f in ((u, model.flux_cells(u)), (w, tangent_flux_cells(w, u, rate, model))):
        q_new = conservative_update(q, f, dt, dx, L, "outflow")
        expected = q.sum(0) - (dt / dx) * (f[-1] - f[0])
        worst = max(worst, float(np.max(np.abs(q_new.sum(0) - expected))) / float(np.abs(q).sum()))
    return worst


def check_conservation(samples: int = 100, seed: int = 4, tol: float = 1.0e-13) -> PropertyResult:
    rng = np.random.default_rng(seed)
    res = [conservation_residual(rng) for _ in range(samples)]
    return _result("discrete conservation of state and shifted tangent", res, tol)

# }}}


# {{{ (f) multishock with one shock is the single-shock driver

def reduction_mismatch(model: SystemModel, grid: Grid, u0, w0, x0: float, xi0: float,
                       family: int, t_end: float, cfl: float, K: int) -> float:
    """0.0 when both drivers agree bitwise, otherwise the largest difference."""
    shock = gtv.make_shock(x0, xi0, family, u0, w0, grid, K)
    single = gtv.solve(u0, w0, shock, grid, model, t_end, cfl, K)
    multi = multishock.solve(u0, [w0], [shock], grid, model, t_end, cfl, K)
    same = (np.array_equal(single.u, multi.u) and np.array_equal(single.w, multi.w_fields[0])
            and single.shock.xi == multi.shocks[0].xi
            and single.shock.x_pos == multi.shocks[0].x_pos
            and single.nsteps == multi.nsteps)
    if same:
        return 0.0
    return max(float(np.max(np.abs(single.u - multi.u))),
               float(np.max(np.abs(single.w - multi.w_fields[0]))),
               abs(single.shock.xi - multi.shocks[0].xi), 1.0e-300)


def check_reduction(seed: int = 5) -> PropertyResult:
    rng = np.random.default_rng(seed)
    res = []
    grid = Grid(-1.0, 1.0, 400)
    model = PSystem()
    um = random_state(rng)
    up = shock_curve(model, 2, um, 0.6 * um[0])
    u0 = grid.piecewise_constant([0.0], [um, up])
    w0 = grid.piecewise_constant([0.0], [rng.uniform(-1, 1, 2), rng.uniform(-1, 1, 2)])
    res.append(reduction_mismatch(model, grid, u0, w0, 0.0, 0.0, 2, 0.1, 0.5, 10))

    grid = Grid(0.0, 2.0, 400)
    u0 = grid.piecewise_constant([1.0], [[1.0], [0.0]])
    w0 = grid.piecewise_constant([1.0], [[1.0], [0.0]])
    res.append(reduction_mismatch(Burgers(), grid, u0, w0, 1.0, 0.0, 1, 0.2, 0.5, 10))
    return _result("multishock driver with one shock reproduces the single-shock driver",
                   res, 0.0)

# }}}


CHECKS: dict[str, Callable[..., PropertyResult]] = {
    "a": check_avg_matrix_rh,
    "b": check_xi_rate,
    "c": check_eigen_identities,
    "d": check_bcw,
    "e": check_conservation,
    "f": check_reduction,
}


def run_all(samples: int = 1000) -> list[PropertyResult]:
    out = []
    for key, check in CHECKS.items():
        if key in "abcd":
            out.append(check(samples=samples))
        elif key == "e":
            out.append(check(samples=max(samples // 10, 1)))
        else:
            out.append(check())
    return out
