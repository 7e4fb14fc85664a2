import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gtvkit.errors import (
    DegenerateJumpError,
    DomainError,
    HyperbolicityLossError,
    InadmissibleShockError,
    InvalidStateError,
    NotApplicableError,
)
from gtvkit.model import Burgers, FluxModel, PSystem, eigen, eigenvalues, shock_curve

PS = PSystem()
BG = Burgers()

density = st.floats(0.2, 5.0)
momentum = st.floats(-3.0, 3.0)


def psystem_as_flux_model():
    return FluxModel(flux_fn=lambda u: np.array([u[1], u[0] ** 2]),
                     jacobian_fn=lambda u: np.array([[0.0, 1.0], [2 * u[0], 0.0]]),
                     n=2)


def test_burgers_flux_and_jacobian():
    assert BG.flux([3.0])[0] == pytest.approx(4.5)
    assert BG.jacobian([3.0])[0, 0] == pytest.approx(3.0)


def test_psystem_flux_values():
    np.testing.assert_allclose(PS.flux([2.0, 0.0]), [0.0, 4.0])
    np.testing.assert_allclose(PS.flux([1.0, -np.sqrt(3)]), [-np.sqrt(3), 1.0])


def test_psystem_jacobian_matches_finite_differences():
    u = np.array([1.7, -0.4])
    h = 1e-6
    fd = np.column_stack([(PS.flux(u + h * e) - PS.flux(u - h * e)) / (2 * h) for e in np.eye(2)])
    np.testing.assert_allclose(PS.jacobian(u), fd, atol=1e-8)


def test_check_rejects_bad_states():
    with pytest.raises(DomainError):
        PS.check([0.0, 1.0])
    with pytest.raises(DomainError):
        PS.check_cells(np.array([[1.0, 0.0], [-1.0, 0.0]]))
    with pytest.raises(InvalidStateError):
        PS.check([np.nan, 0.0])
    with pytest.raises(InvalidStateError):
        BG.check_cells(np.array([[np.inf]]))


def test_avg_matrix_equal_states_is_jacobian():
    u = np.array([1.3, 0.7])
    np.testing.assert_allclose(PS.avg_matrix(u, u), PS.jacobian(u), atol=1e-14)


def test_avg_dpressure_secant_and_limit():
    assert PS.avg_dpressure(3.0, 1.0) == pytest.approx((9.0 - 1.0) / 2.0)
    assert PS.avg_dpressure(1.5, 1.5) == pytest.approx(3.0)


@settings(max_examples=100, deadline=None)
@given(density, momentum, density, momentum)
def test_avg_matrix_closed_form_matches_quadrature(r1, q1, r2, q2):
    u, v = np.array([r1, q1]), np.array([r2, q2])
    quad = psystem_as_flux_model().avg_matrix(u, v)
    np.testing.assert_allclose(PS.avg_matrix(u, v), quad, atol=1e-13)


@settings(max_examples=200, deadline=None)
@given(density, momentum, density, momentum)
def test_avg_matrix_rh_identity(r1, q1, r2, q2):
    u, v = np.array([r1, q1]), np.array([r2, q2])
    np.testing.assert_allclose(PS.avg_matrix(u, v) @ (u - v), PS.flux(u) - PS.flux(v),
                               atol=1e-12 * max(1.0, np.abs(PS.flux(u)).max()))


@settings(max_examples=100, deadline=None)
@given(density, momentum, density, momentum)
def test_avg_matrix_symmetric_in_arguments(r1, q1, r2, q2):
    u, v = np.array([r1, q1]), np.array([r2, q2])
    np.testing.assert_allclose(PS.avg_matrix(u, v), PS.avg_matrix(v, u), atol=1e-13)


def test_burgers_avg_matrix_is_mean():
    assert BG.avg_matrix([3.0], [1.0])[0, 0] == pytest.approx(2.0)


def test_eigenvalues_sorted_and_closed_form():
    lams = eigenvalues(np.array([[0.0, 1.0], [4.0, 0.0]]))
    np.testing.assert_allclose(lams, [-2.0, 2.0])
    assert eigenvalues(np.array([[0.5]]))[0] == 0.5


def test_eigenvalues_rejects_complex_and_repeated():
    with pytest.raises(HyperbolicityLossError):
        eigenvalues(np.array([[0.0, 1.0], [-1.0, 0.0]]))
    with pytest.raises(HyperbolicityLossError):
        eigenvalues(np.eye(2))
    with pytest.raises(NotImplementedError):
        eigenvalues(np.eye(3))


@pytest.mark.parametrize("family", [1, 2])
def test_eigen_pairs_and_normalization(family):
    um = np.array([2.0, 0.5])
    up = shock_curve(PS, family, um, 3.0 if family == 1 else 1.2)
    abar = PS.avg_matrix(up, um)
    pairs = eigen(abar, up, um, family)
    for i, p in enumerate(pairs, start=1):
        np.testing.assert_allclose(p.left @ abar, p.lam * p.left, atol=1e-12)
        np.testing.assert_allclose(abar @ p.right, p.lam * p.right, atol=1e-12)
        if i == family:
            assert p.left @ (up - um) == pytest.approx(1.0)
        else:
            assert np.linalg.norm(p.left) == pytest.approx(1.0)
            assert p.left @ (up - um) == pytest.approx(0.0, abs=1e-12)


def test_eigen_closed_form_one_shock_left_vector():
    um = np.array([1.0, 0.3])
    up = shock_curve(PS, 1, um, 2.5)
    pbar = PS.avg_dpressure(up[0], um[0])
    # Sign chosen so that <l_1, u+ - u-> = +1.
    expected = np.array([np.sqrt(pbar), -1.0]) / (2 * (up[0] - um[0]) * np.sqrt(pbar))
    np.testing.assert_allclose(PS.eigen_at(up, um, 1)[0].left, expected, rtol=1e-12)
    np.testing.assert_allclose([p.lam for p in PS.eigen_at(up, um, 1)],
                               [-np.sqrt(pbar), np.sqrt(pbar)])


def test_eigen_degenerate_jump():
    u = np.array([1.0, 0.0])
    with pytest.raises(DegenerateJumpError):
        PS.eigen_at(u, u, 1)
    with pytest.raises(ValueError):
        PS.eigen_at(u, u + 1.0, 3)


def test_shock_curve_reproduces_two_shock_states():
    mid = shock_curve(PS, 1, [2.0, 0.0], 2.241)
    right = shock_curve(PS, 2, mid, 1.0)
    assert mid[1] == pytest.approx(-0.4963, abs=1e-4)
    assert right[1] == pytest.approx(-2.7304, abs=5e-4)


def test_shock_curve_reproduces_single_shock_state():
    np.testing.assert_allclose(shock_curve(PS, 2, [2.0, 0.0], 1.0), [1.0, -np.sqrt(3)])


def test_shock_curve_errors():
    with pytest.raises(InadmissibleShockError):
        shock_curve(PS, 1, [2.0, 0.0], 1.0)
    with pytest.raises(InadmissibleShockError):
        shock_curve(PS, 2, [2.0, 0.0], 3.0)
    with pytest.raises(NotApplicableError):
        shock_curve(BG, 1, [1.0], 0.5)
    with pytest.raises(DomainError):
        shock_curve(PS, 2, [2.0, 0.0], -1.0)


def test_shock_speeds():
    assert PS.shock_speed([2.0, 0.0], [1.0, -np.sqrt(3)], 2) == pytest.approx(np.sqrt(3))
    assert BG.shock_speed([2.0], [0.0]) == pytest.approx(1.0)
    with pytest.raises(DegenerateJumpError):
        BG.shock_speed([1.0], [1.0])


def test_two_shock_rh_speeds():
    s1 = PS.shock_speed([2.0, 0.0], [2.241, -0.4963], 1)
    s2 = PS.shock_speed([2.241, -0.4963], [1.0, -2.7304], 2)
    assert s1 == pytest.approx(-2.0593, abs=5e-4)
    assert s2 == pytest.approx(1.8002, abs=5e-4)


def test_rh_speed_equals_avg_matrix_eigenvalue_on_locus():
    um = np.array([1.4, -0.2])
    up = shock_curve(PS, 2, um, 0.9)
    lam = PS.eigen_at(up, um, 2)[1].lam
    assert PS.shock_speed(um, up, 2) == pytest.approx(lam, rel=1e-12)


def test_cell_operations_match_pointwise():
    rng = np.random.default_rng(0)
    U = np.column_stack([rng.uniform(0.5, 2, 7), rng.uniform(-1, 1, 7)])
    W = rng.uniform(-1, 1, (7, 2))
    for j in range(7):
        np.testing.assert_allclose(PS.flux_cells(U)[j], PS.flux(U[j]))
        np.testing.assert_allclose(PS.jacobian_cells(U)[j], PS.jacobian(U[j]))
        np.testing.assert_allclose(PS.apply_jacobian_cells(U, W)[j], PS.jacobian(U[j]) @ W[j])
        assert PS.spectral_radius_cells(U)[j] == pytest.approx(PS.spectral_radius(U[j]))
