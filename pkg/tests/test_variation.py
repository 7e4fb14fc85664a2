import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gtvkit.errors import InteractionError
from gtvkit.fvsolver import Grid
from gtvkit.gtv import ShockRecord
from gtvkit.variation import first_order_variation, reconstruct_u_tilde, reconstruct_ux, shift_band


def shock_at(x, xi, um, up, host):
    return ShockRecord(x_pos=x, xi=xi, family=1, host_cell=host, u_minus=np.atleast_1d(um),
                       u_plus=np.atleast_1d(up), w_minus=np.zeros(1), w_plus=np.zeros(1))


def test_reconstruct_ux_linear_and_constant():
    g = Grid(0.0, 1.0, 50)
    np.testing.assert_allclose(reconstruct_ux((3.0 * g.centers)[:, None], g.dx), 3.0)
    np.testing.assert_allclose(reconstruct_ux(np.ones((50, 2)), g.dx), 0.0)


def test_reconstruct_ux_step_suppressed():
    u = np.zeros((20, 1))
    u[10:] = 1.0
    np.testing.assert_allclose(reconstruct_ux(u, 0.1), 0.0)


def test_reconstruct_ux_componentwise_min_abs():
    u = np.array([[0.0, 0.0], [1.0, 3.0], [3.0, 4.0]])
    ux = reconstruct_ux(u, 1.0)
    np.testing.assert_allclose(ux[1], [1.0, 1.0])
    np.testing.assert_allclose(ux[0], [1.0, 3.0])
    np.testing.assert_allclose(ux[2], [2.0, 1.0])


def test_u_tilde_sharpens_band():
    g = Grid(0.0, 1.0, 100)
    u = np.tanh((0.5 - g.centers) / 0.02)[:, None]
    s = shock_at(0.5, 0.0, u[40], u[60], 50)
    ut = reconstruct_u_tilde(u, [s], 10, g)
    assert np.all(ut[40:50] == u[40]) and np.all(ut[50:61] == u[60])
    np.testing.assert_array_equal(ut[:39], u[:39])
    np.testing.assert_array_equal(ut[62:], u[62:])


def test_u_tilde_exact_step_unchanged():
    g = Grid(0.0, 1.0, 100)
    u = g.piecewise_constant([0.5], [[2.0], [1.0]])
    s = shock_at(0.5, 0.0, 2.0, 1.0, 50)
    np.testing.assert_allclose(reconstruct_u_tilde(u, [s], 5, g), u)


def test_u_tilde_zero_band():
    g = Grid(0.0, 1.0, 10)
    u = np.linspace(0, 1, 10)[:, None]
    s = shock_at(0.52, 0.0, -1.0, 5.0, 5)
    ut = reconstruct_u_tilde(u, [s], 0, g)
    # A zero-width band can only touch the host cell, and only if its centre
    # coincides with the shock; here it does not.
    np.testing.assert_array_equal(ut, u)


def test_u_tilde_overlapping_bands():
    g = Grid(0.0, 1.0, 100)
    u = np.zeros((100, 1))
    shocks = [shock_at(0.40, 0.0, 1.0, 0.0, 40), shock_at(0.45, 0.0, 1.0, 0.0, 45)]
    with pytest.raises(InteractionError):
        reconstruct_u_tilde(u, shocks, 5, g)


def test_first_order_variation_trivial_cases():
    g = Grid(0.0, 1.0, 40)
    ut = g.piecewise_constant([0.5], [[2.0], [1.0]])
    v = np.full((40, 1), 0.3)
    s = shock_at(0.5, 0.2, 2.0, 1.0, 20)
    np.testing.assert_allclose(first_order_variation(ut, v, [s], 0.0, g), ut)
    np.testing.assert_allclose(first_order_variation(ut, v, [s.replace(xi=0.0)], 0.1, g), ut + 0.1 * v)
    with pytest.raises(ValueError):
        first_order_variation(ut, v, [s], -0.1, g)


@pytest.mark.parametrize("xi", [0.37, -0.37])
def test_shift_moves_jump_by_eps_xi(xi):
    g = Grid(0.0, 1.0, 40)
    ut = g.piecewise_constant([0.5], [[2.0], [1.0]])
    s = shock_at(0.5, xi, 2.0, 1.0, 20)
    eps = 0.1
    got = first_order_variation(ut, np.zeros_like(ut), [s], eps, g)
    np.testing.assert_allclose(got, g.piecewise_constant([0.5 + eps * xi], [[2.0], [1.0]]), atol=1e-14)


@settings(max_examples=100, deadline=None)
@given(st.floats(-2.0, 2.0).filter(lambda v: abs(v) > 1e-6), st.floats(1e-3, 0.1), st.floats(0.3, 0.7))
def test_band_mass(xi, eps, x):
    g = Grid(0.0, 1.0, 97)
    jump = np.array([1.5, -0.5])
    s = ShockRecord(x_pos=x, xi=xi, family=1, host_cell=g.cell_of(x), u_minus=np.zeros(2),
                    u_plus=jump, w_minus=np.zeros(2), w_plus=np.zeros(2))
    band = shift_band(g, s, eps)
    np.testing.assert_allclose(np.abs(band).sum(0) * g.dx, eps * abs(xi) * np.abs(jump), atol=1e-12)


def test_l1_consistency_bound():
    rng = np.random.default_rng(0)
    g = Grid(0.0, 1.0, 200)
    ut = g.piecewise_constant([0.3, 0.7], [[2.0], [1.0], [0.0]])
    v = rng.uniform(-1, 1, (200, 1))
    shocks = [shock_at(0.3, 0.5, 2.0, 1.0, 60), shock_at(0.7, -0.8, 1.0, 0.0, 140)]
    for eps in (0.01, 0.05, 0.1):
        ue = first_order_variation(ut, v, shocks, eps, g)
        lhs = np.abs(ue - ut).sum() * g.dx
        rhs = eps * (np.abs(v).sum() * g.dx + 0.5 * 1.0 + 0.8 * 1.0)
        assert lhs <= rhs + 1e-14
