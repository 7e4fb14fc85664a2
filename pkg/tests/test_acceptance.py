"""Acceptance criteria at the reference grid sizes.

Every check appends one PASS/FAIL line that is printed in the terminal
summary.  The full-resolution runs take several minutes in total.
"""

import time

import pytest

from gtvkit.errors import DomainError
from gtvkit.harness import verify
from gtvkit.harness.experiments import convergence_sweep, default_config, naive_control, run_gtv

# Pinned tolerances.
XI_REL_TOL = 0.005
X_ABS_TOL = 2e-3
SMOKE_XI_REL_TOL = 0.02
SMOKE_X_ABS_TOL = 1e-2
SMOKE_MAX_SECONDS = 30.0
SLOPE_RANGE = (1.8, 2.2)
TWO_SHOCK_XI_REL_TOL = 0.01
FLOOR_RANGE = (1e-5, 1e-3)
NAIVE_MIN_RATIO = 5.0

BURGERS_XI, BURGERS_X = 0.0913, 1.0954
PSYSTEM_XI, PSYSTEM_X = 0.4330, 0.8660
TWO_SHOCK_XI = (-0.2184, 0.1666)


def rel(a, b):
    return abs(a - b) / abs(b)


def record(log, label, ok, detail):
    log.append(f"ACCEPTANCE {label:<5} {'PASS' if ok else 'FAIL'}  {detail}")
    print(log[-1])
    return ok


@pytest.fixture(scope="module")
def burgers():
    return convergence_sweep(default_config("burgers"))


@pytest.fixture(scope="module")
def psystem():
    return convergence_sweep(default_config("psystem"))


@pytest.fixture(scope="module")
def two_shock():
    coarse = convergence_sweep(default_config("psystem-twoshock"))
    cfg = default_config("psystem-twoshock", nx=40000)
    fine = convergence_sweep(cfg.replace(eps=cfg.eps[:1]))
    return coarse, fine


def test_c1_burgers_shift_and_position(burgers, acceptance_log):
    xi, x = burgers.xi_final[0], burgers.x_final[0]
    ok = rel(xi, BURGERS_XI) <= XI_REL_TOL and abs(x - BURGERS_X) <= X_ABS_TOL
    assert record(acceptance_log, "1", ok,
                  f"Burgers nx=20000: xi={xi:.6f} (rel err {rel(xi, BURGERS_XI):.2%}, tol 0.5%), "
                  f"x={x:.6f} (err {abs(x - BURGERS_X):.1e}, tol 2e-3)")


def test_c1_burgers_smoke_scale(acceptance_log):
    t0 = time.perf_counter()
    res = run_gtv(default_config("burgers").scaled(10))
    wall = time.perf_counter() - t0
    xi, x = res.xi[0], res.x[0]
    ok = (rel(xi, BURGERS_XI) <= SMOKE_XI_REL_TOL and abs(x - BURGERS_X) <= SMOKE_X_ABS_TOL
          and wall <= SMOKE_MAX_SECONDS)
    assert record(acceptance_log, "1s", ok,
                  f"Burgers --scale 10: xi={xi:.6f} (rel err {rel(xi, BURGERS_XI):.2%}, tol 2%), "
                  f"x={x:.6f} (tol 1e-2), {wall:.1f} s")


def test_c2_burgers_sweep_slope(burgers, acceptance_log):
    s = burgers.slope
    ok = SLOPE_RANGE[0] <= s <= SLOPE_RANGE[1]
    l1 = ", ".join(f"{v:.2e}" for v in burgers.l1)
    assert record(acceptance_log, "2", ok, f"Burgers eps-sweep slope {s:.3f} in [1.8, 2.2]; L1 = {l1}")


def test_c3_psystem_single_shock(psystem, acceptance_log):
    xi, x, s = psystem.xi_final[0], psystem.x_final[0], psystem.slope
    ok = (rel(xi, PSYSTEM_XI) <= XI_REL_TOL and abs(x - PSYSTEM_X) <= X_ABS_TOL
          and SLOPE_RANGE[0] <= s <= SLOPE_RANGE[1])
    assert record(acceptance_log, "3", ok,
                  f"p-system outflow: xi={xi:.6f} (rel err {rel(xi, PSYSTEM_XI):.3%}), "
                  f"x={x:.6f} (err {abs(x - PSYSTEM_X):.1e}), slope {s:.3f}")


@pytest.mark.xfail(raises=DomainError, strict=True,
                   reason="zero numerical flux at both walls drains the right boundary cell "
                          "to vacuum within a few hundred steps")
def test_c3_psystem_single_shock_zero_flux(acceptance_log):
    try:
        rep = convergence_sweep(default_config("psystem", boundary="zero-flux"))
    except DomainError as exc:
        record(acceptance_log, "3z", False, f"p-system with zero-flux walls: {exc}")
        raise
    xi, x, s = rep.xi_final[0], rep.x_final[0], rep.slope
    ok = (rel(xi, PSYSTEM_XI) <= XI_REL_TOL and abs(x - PSYSTEM_X) <= X_ABS_TOL
          and SLOPE_RANGE[0] <= s <= SLOPE_RANGE[1])
    assert record(acceptance_log, "3z", ok, f"p-system zero-flux: xi={xi:.6f}, x={x:.6f}, slope {s:.3f}")


def test_c4_two_shock_shifts(two_shock, acceptance_log):
    coarse, _ = two_shock
    errs = [rel(a, b) for a, b in zip(coarse.xi_final, TWO_SHOCK_XI)]
    ok = all(e <= TWO_SHOCK_XI_REL_TOL for e in errs)
    assert record(acceptance_log, "4a", ok,
                  f"two shocks: xi1={coarse.xi_final[0]:.6f} ({errs[0]:.2%}), "
                  f"xi2={coarse.xi_final[1]:.6f} ({errs[1]:.2%}), tol 1%")


def test_c4_two_shock_sweep_shape(two_shock, acceptance_log):
    coarse, _ = two_shock
    tail, floor = coarse.tail_slope(3), coarse.floor
    ok = SLOPE_RANGE[0] <= tail <= SLOPE_RANGE[1] and FLOOR_RANGE[0] <= floor <= FLOOR_RANGE[1]
    l1 = ", ".join(f"{v:.2e}" for v in coarse.l1)
    assert record(acceptance_log, "4b", ok,
                  f"two shocks: slope of largest three eps {tail:.3f} in [1.8, 2.2], "
                  f"floor {floor:.2e} in [1e-5, 1e-3]; L1 = {l1}")


def test_c4_two_shock_floor_refines(two_shock, acceptance_log):
    coarse, fine = two_shock
    ok = fine.floor < coarse.floor
    assert record(acceptance_log, "4c", ok,
                  f"two shocks: floor at eps={coarse.eps[0]:.4f} drops from {coarse.floor:.2e} "
                  f"(nx=20000) to {fine.floor:.2e} (nx=40000)")


def test_c5_naive_variation_spike(acceptance_log):
    rep = naive_control(default_config("psystem"), t_end=0.05)
    ok = rep.ratio > NAIVE_MIN_RATIO
    assert record(acceptance_log, "5", ok,
                  f"naive variation at t=0.05: max near shock {rep.max_near:.3f} = "
                  f"{rep.ratio:.2f} x max elsewhere {rep.max_plateau:.3f} (need > 5)")


def test_c6_property_suite(acceptance_log):
    results = verify.run_all(samples=1000)
    for r, label in zip(results, "abcdef"):
        record(acceptance_log, f"6{label}", r.passed, r.line()[6:])
    assert all(r.passed for r in results)
