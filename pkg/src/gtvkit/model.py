r"""Hyperbolic conservation laws :math:`u_t + f(u)_x = 0` in one dimension.

A model provides the flux, its Jacobian :math:`A(u)`, the averaged matrix

.. math::

    \bar{A}(u, v) = \int_0^1 A(\theta u + (1 - \theta) v) \, d\theta

and vectorized per-cell variants used by the finite-volume kernels.  Two
concrete laws are built in: inviscid Burgers and the isentropic p-system
with :math:`p(\rho) = \kappa \rho^\gamma`.

Characteristic families are numbered from 1 (a "2-shock" has ``family=2``).
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

from gtvkit.errors import (
    DegenerateJumpError,
    DomainError,
    HyperbolicityLossError,
    InadmissibleShockError,
    InvalidStateError,
    NotApplicableError,
)

#: Minimum admissible density for the p-system.
RHO_MIN = 1.0e-12

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(5)
# map nodes/weights from [-1, 1] to [0, 1]
_GL_THETA = 0.5 * (_GL_NODES + 1.0)
_GL_WEIGHTS = 0.5 * _GL_WEIGHTS


def as_state(u, n: int) -> np.ndarray:
    """Coerce *u* to a float state vector of length *n* and check finiteness."""
    arr = np.atleast_1d(np.asarray(u, dtype=np.float64))
    if arr.shape != (n,):
        raise InvalidStateError(f"expected state of shape ({n},), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidStateError(f"non-finite state: {arr}")
    return arr


class SystemModel:
    """Interface for a strictly hyperbolic system with ``n`` components.

    Subclasses must implement :meth:`flux` and :meth:`jacobian`; the
    averaged matrix falls back to 5-point Gauss-Legendre quadrature and the
    per-cell operations fall back to Python loops.
    """

    n: int = 1
    name: str = "model"

    # {{{ pointwise

    def check(self, u) -> np.ndarray:
        return as_state(u, self.n)

    def flux(self, u) -> np.ndarray:
        raise NotImplementedError

    def jacobian(self, u) -> np.ndarray:
        raise NotImplementedError

    def avg_matrix(self, u, v) -> np.ndarray:
        u = self.check(u)
        v = self.check(v)
        return sum(
            w * self.jacobian(t * u + (1.0 - t) * v)
            for t, w in zip(_GL_THETA, _GL_WEIGHTS)
        )

    def spectral_radius(self, u) -> float:
        return float(np.max(np.abs(np.linalg.eigvals(self.jacobian(u)))))

    def eigen_at(self, u_plus, u_minus, family: int) -> list[EigenPair]:
        """Eigen-structure of :math:`\\bar{A}(u^+, u^-)` normalized for *family*."""
        abar = self.avg_matrix(u_plus, u_minus)
        return eigen(abar, u_plus, u_minus, family)

    def shock_speed(self, u_minus, u_plus, family: int) -> float:
        """Rankine-Hugoniot speed used to advance a tracked shock."""
        abar = self.avg_matrix(u_plus, u_minus)
        return float(eigenvalues(abar)[family - 1])

    # }}}

    # {{{ per-cell (arrays of shape (nx, n))

    def check_cells(self, U: np.ndarray) -> np.ndarray:
        if not np.all(np.isfinite(U)):
            raise InvalidStateError("cell field contains non-finite values")
        return U

    def flux_cells(self, U: np.ndarray) -> np.ndarray:
        return np.array([self.flux(u) for u in U])

    def jacobian_cells(self, U: np.ndarray) -> np.ndarray:
        return np.array([self.jacobian(u) for u in U])

    def apply_jacobian_cells(self, U: np.ndarray, W: np.ndarray) -> np.ndarray:
        """Return ``A(U[j]) @ W[j]`` for every cell."""
        return np.einsum("jab,jb->ja", self.jacobian_cells(U), W)

    def spectral_radius_cells(self, U: np.ndarray) -> np.ndarray:
        return np.array([self.spectral_radius(u) for u in U])

    # }}}


@dataclass(frozen=True)
class Burgers(SystemModel):
    r"""Inviscid Burgers equation, :math:`f(u) = u^2 / 2`."""

    n: int = 1
    name: str = "burgers"

    def flux(self, u) -> np.ndarray:
        u = self.check(u)
        return 0.5 * u * u

    def jacobian(self, u) -> np.ndarray:
        u = self.check(u)
        return u.reshape(1, 1).copy()

    def avg_matrix(self, u, v) -> np.ndarray:
        u = self.check(u)
        v = self.check(v)
        return (0.5 * (u + v)).reshape(1, 1)

    def spectral_radius(self, u) -> float:
        return float(abs(self.check(u)[0]))

    def shock_speed(self, u_minus, u_plus, family: int = 1) -> float:
        u_minus = self.check(u_minus)
        u_plus = self.check(u_plus)
        if abs(u_plus[0] - u_minus[0]) < 1.0e-10:
            raise DegenerateJumpError("zero-strength Burgers jump")
        return float(0.5 * (u_plus[0] + u_minus[0]))

    def flux_cells(self, U: np.ndarray) -> np.ndarray:
        return 0.5 * U * U

    def jacobian_cells(self, U: np.ndarray) -> np.ndarray:
        return U[:, :, None].copy()

    def apply_jacobian_cells(self, U: np.ndarray, W: np.ndarray) -> np.ndarray:
        return U * W

    def spectral_radius_cells(self, U: np.ndarray) -> np.ndarray:
        return np.abs(U[:, 0])


@dataclass(frozen=True)
class PSystem(SystemModel):
    r"""Isentropic p-system in :math:`(\rho, q)` with :math:`p = \kappa\rho^\gamma`."""

    kappa: float = 1.0
    gamma: float = 2.0
    n: int = 2
    name: str = "psystem"

    def check(self, u) -> np.ndarray:
        u = as_state(u, 2)
        if u[0] < RHO_MIN:
            raise DomainError(f"density {u[0]} below {RHO_MIN}")
        return u

    def check_cells(self, U: np.ndarray) -> np.ndarray:
        U = super().check_cells(U)
        if np.any(U[:, 0] < RHO_MIN):
            raise DomainError("cell density below admissible minimum")
        return U

    def pressure(self, rho):
        return self.kappa * np.power(rho, self.gamma)

    def dpressure(self, rho):
        return self.kappa * self.gamma * np.power(rho, self.gamma - 1.0)

    def avg_dpressure(self, rho_plus: float, rho_minus: float) -> float:
        """Secant slope of the pressure, falling back to ``p'`` for equal densities."""
        drho = rho_plus - rho_minus
        if abs(drho) <= 1.0e-14 * max(1.0, abs(rho_plus)):
            return float(self.dpressure(0.5 * (rho_plus + rho_minus)))
        return float((self.pressure(rho_plus) - self.pressure(rho_minus)) / drho)

    def flux(self, u) -> np.ndarray:
        rho, q = self.check(u)
        return np.array([q, self.pressure(rho)])

    def jacobian(self, u) -> np.ndarray:
        rho, _ = self.check(u)
        return np.array([[0.0, 1.0], [self.dpressure(rho), 0.0]])

    def avg_matrix(self, u, v) -> np.ndarray:
        u = self.check(u)
        v = self.check(v)
        return np.array([[0.0, 1.0], [self.avg_dpressure(u[0], v[0]), 0.0]])

    def spectral_radius(self, u) -> float:
        return float(np.sqrt(self.dpressure(self.check(u)[0])))

    def shock_speed(self, u_minus, u_plus, family: int) -> float:
        u_minus = self.check(u_minus)
        u_plus = self.check(u_plus)
        drho = u_plus[0] - u_minus[0]
        if abs(drho) < 1.0e-10:
            raise DegenerateJumpError("zero density jump across p-system shock")
        return float((u_plus[1] - u_minus[1]) / drho)

    def flux_cells(self, U: np.ndarray) -> np.ndarray:
        out = np.empty_like(U)
        out[:, 0] = U[:, 1]
        out[:, 1] = self.pressure(U[:, 0])
        return out

    def jacobian_cells(self, U: np.ndarray) -> np.ndarray:
        out = np.zeros((U.shape[0], 2, 2))
        out[:, 0, 1] = 1.0
        out[:, 1, 0] = self.dpressure(U[:, 0])
        return out

    def apply_jacobian_cells(self, U: np.ndarray, W: np.ndarray) -> np.ndarray:
        out = np.empty_like(W)
        out[:, 0] = W[:, 1]
        out[:, 1] = self.dpressure(U[:, 0]) * W[:, 0]
        return out

    def spectral_radius_cells(self, U: np.ndarray) -> np.ndarray:
        return np.sqrt(self.dpressure(U[:, 0]))


@dataclass(frozen=True)
class FluxModel(SystemModel):
    """User-supplied law given by callables for the flux and its Jacobian.

    The averaged matrix is evaluated by quadrature.
    """

    flux_fn: Callable[[np.ndarray], np.ndarray] = field(default=None, repr=False)
    jacobian_fn: Callable[[np.ndarray], np.ndarray] = field(default=None, repr=False)
    n: int = 1
    name: str = "user"

    def flux(self, u) -> np.ndarray:
        return np.atleast_1d(np.asarray(self.flux_fn(self.check(u)), dtype=np.float64))

    def jacobian(self, u) -> np.ndarray:
        jac = np.asarray(self.jacobian_fn(self.check(u)), dtype=np.float64)
        return jac.reshape(self.n, self.n)


# {{{ eigen-structure of the averaged matrix


@dataclass(frozen=True)
class EigenPair:
    """Eigenvalue with its left (row) and right (column) eigenvectors."""

    lam: float
    left: np.ndarray
    right: np.ndarray


#: Minimum gap between distinct eigenvalues.
EIG_GAP_TOL = 1.0e-10
#: Minimum |<l_k, u+ - u->| before the jump counts as degenerate.
JUMP_TOL = 1.0e-12


def eigenvalues(abar: np.ndarray) -> np.ndarray:
    """Sorted real eigenvalues of a 1x1 or 2x2 matrix (closed form)."""
    abar = np.asarray(abar, dtype=np.float64)
    n = abar.shape[0]
    if n == 1:
        return np.array([abar[0, 0]])
    if n != 2:
        raise NotImplementedError("closed-form eigen-structure only for n <= 2")

    (a, b), (c, d) = abar
    half_tr = 0.5 * (a + d)
    disc = (0.5 * (a - d)) ** 2 + b * c
    if not disc > 0.0 or 2.0 * np.sqrt(disc) <= EIG_GAP_TOL:
        raise HyperbolicityLossError(
            f"averaged matrix is not strictly hyperbolic (discriminant {disc:.3e})")

    root = np.sqrt(disc)
    return np.array([half_tr - root, half_tr + root])


def _pick(v1: np.ndarray, v2: np.ndarray) -> np.ndarray:
    return v1 if np.linalg.norm(v1) >= np.linalg.norm(v2) else v2


def _unit(v: np.ndarray) -> np.ndarray:
    v = v / np.linalg.norm(v)
    nz = np.flatnonzero(v)
    if nz.size and v[nz[0]] < 0:
        v = -v
    return v


def eigen(abar, u_plus, u_minus, k_alpha: int) -> list[EigenPair]:
    """Eigen-decomposition of the averaged matrix at a jump.

    Eigenvalues are returned in ascending order. The left eigenvector of
    family *k_alpha* is scaled so that ``<l, u+ - u-> = 1``; the remaining
    left eigenvectors and all right eigenvectors have unit norm with the
    first nonzero component positive.
    """
    abar = np.asarray(abar, dtype=np.float64)
    n = abar.shape[0]
    u_plus = as_state(u_plus, n)
    u_minus = as_state(u_minus, n)
    if not 1 <= k_alpha <= n:
        raise ValueError(f"family index {k_alpha} outside 1..{n}")

    lams = eigenvalues(abar)
    pairs = []
    for i, lam in enumerate(lams, start=1):
        if n == 1:
            left = np.ones(1)
            right = np.ones(1)
        else:
            (a, b), (c, d) = abar
            left = _pick(np.array([c, lam - a]), np.array([lam - d, b]))
            right = _unit(_pick(np.array([b, lam - a]), np.array([lam - d, c])))

        if i == k_alpha:
            jump = float(left @ (u_plus - u_minus))
            if abs(jump) <= JUMP_TOL:
                raise DegenerateJumpError(
                    f"<l_{k_alpha}, u+ - u-> = {jump:.3e} vanishes")
            left = left / jump
        else:
            left = _unit(left)

        pairs.append(EigenPair(lam=float(lam), left=left, right=right))

    return pairs


# }}}


def shock_curve(model: PSystem, family: int, u_minus, rho_plus: float) -> np.ndarray:
    """State ``u+`` joined to *u_minus* by an admissible *family*-shock.

    Both branches share ``q+ = q- - sqrt((p(rho+) - p(rho-)) (rho+ - rho-))``;
    a 1-shock needs ``rho+ > rho-`` and a 2-shock ``rho+ < rho-``.
    """
    if not isinstance(model, PSystem):
        raise NotApplicableError("shock curves are only implemented for the p-system")

    rho_m, q_m = model.check(u_minus)
    if not np.isfinite(rho_plus) or rho_plus < RHO_MIN:
        raise DomainError(f"invalid density {rho_plus}")

    if family == 1 and rho_plus < rho_m:
        raise InadmissibleShockError("1-shock requires rho+ > rho-")
    if family == 2 and rho_plus > rho_m:
        raise InadmissibleShockError("2-shock requires rho+ < rho-")
    if family not in (1, 2):
        raise ValueError(f"family must be 1 or 2, got {family}")

    dp = model.pressure(rho_plus) - model.pressure(rho_m)
    q_plus = q_m - np.sqrt(max(dp * (rho_plus - rho_m), 0.0))
    return np.array([rho_plus, q_plus])
