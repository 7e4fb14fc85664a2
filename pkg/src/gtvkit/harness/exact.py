"""Closed-form solutions and initial data for the three reference experiments."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from gtvkit.fvsolver import Grid
from gtvkit.model import PSystem

SQRT3 = float(np.sqrt(3.0))


# ---- Burgers: linear ramp on [0, 1] -------------------------------------

def burgers_exact(epsilon: float, t: float, x) -> np.ndarray:
    """Ramp solution ``(1+eps) x / (1 + (1+eps) t)`` ending in a shock."""
    a = 1.0 + epsilon
    denom = 1.0 + a * t
    if denom <= 0.0:
        raise ValueError(f"solution undefined for eps={epsilon}, t={t}")
    x = np.asarray(x, dtype=np.float64)
    inside = (x >= 0.0) & (x <= np.sqrt(denom))
    return np.where(inside, a * x / denom, 0.0)


def burgers_shock_position(epsilon: float, t: float) -> float:
    return float(np.sqrt(1.0 + (1.0 + epsilon) * t))


def burgers_exact_xi(t: float) -> float:
    if t < 0.0:
        raise ValueError(f"t must be nonnegative, got {t}")
    return t / (2.0 * np.sqrt(1.0 + t))


def ramp_cells(grid: Grid, slope: float, end: float, start: float = 0.0) -> np.ndarray:
    """Exact cell averages of ``slope * x`` on ``[start, end]``, zero elsewhere."""
    faces = grid.faces
    lo = np.clip(faces[:-1], start, end)
    hi = np.clip(faces[1:], start, end)
    return (slope * 0.5 * (hi**2 - lo**2) / grid.dx)[:, None]


def burgers_exact_cells(epsilon: float, t: float, grid: Grid) -> np.ndarray:
    a = 1.0 + epsilon
    return ramp_cells(grid, a / (1.0 + a * t), burgers_shock_position(epsilon, t))


# ---- p-system: single 2-shock ------------------------------------------

def psystem_states(epsilon: float) -> tuple[np.ndarray, np.ndarray]:
    a = 1.0 + epsilon
    return np.array([2.0 * a, 0.0]), np.array([a, -SQRT3 * a**1.5])


def psystem_shock_position(epsilon: float, t: float) -> float:
    return float(np.sqrt(3.0 * (1.0 + epsilon)) * t)


def psystem_exact(epsilon: float, t: float, x) -> np.ndarray:
    if epsilon <= -1.0:
        raise ValueError(f"epsilon must exceed -1, got {epsilon}")
    left, right = psystem_states(epsilon)
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    return np.where((x < psystem_shock_position(epsilon, t))[:, None], left, right)


def psystem_exact_cells(epsilon: float, t: float, grid: Grid) -> np.ndarray:
    return grid.piecewise_constant([psystem_shock_position(epsilon, t)],
                                   list(psystem_states(epsilon)))


def psystem_exact_xi(t: float) -> float:
    return SQRT3 * t / 2.0


# Tangent of the p-system data: d/d eps of the two states at eps = 0.
PSYSTEM_V_LEFT = np.array([2.0, 0.0])
PSYSTEM_V_RIGHT = np.array([1.0, -1.5 * SQRT3])


# ---- p-system: two shocks -----------------------------------------------

@dataclass(frozen=True)
class TwoShockData:
    states: tuple[np.ndarray, np.ndarray, np.ndarray]
    w_states: tuple[np.ndarray, np.ndarray, np.ndarray]
    xi0: tuple[float, float]
    speeds: tuple[float, float]
    t0: float

    def positions(self, t: float) -> tuple[float, float]:
        """Shock paths ``x_a(t) = s_a (t + t0)``."""
        return tuple(s * (t + self.t0) for s in self.speeds)

    def reference_xi(self, t: float, model: PSystem | None = None) -> tuple[float, float]:
        """``d/d eps`` of each shock path, from the RH speeds of the perturbed jumps."""
        model = model or PSystem()
        out = []
        for a, fam in enumerate((1, 2)):
            def speed(eps):
                lo = self.states[a] + eps * self.w_states[a]
                hi = self.states[a + 1] + eps * self.w_states[a + 1]
                return model.shock_speed(lo, hi, fam)
            h = 1.0e-6
            ds = (speed(h) - speed(-h)) / (2.0 * h)
            out.append(self.xi0[a] + ds * t)
        return tuple(out)


def twoshock_setup() -> TwoShockData:
    states = (np.array([2.0, 0.0]), np.array([2.241, -0.4963]), np.array([1.0, -2.7304]))
    w_states = (np.array([2.0, -1.8839]), np.array([1.0, 0.0]), np.array([1.0, -0.6893]))
    return TwoShockData(states=states, w_states=w_states, xi0=(-0.0728, 0.05554),
                        speeds=(-2.0593, 1.8002), t0=0.1)
