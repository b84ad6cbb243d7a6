import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from shfront.amplitude import ModelParams, make_system, slow_system
from shfront.connect import (
    Diverged, ShootConfig, ShootingFailure, integrate, shoot, shoot_branches, slow_subsystem_check,
    sphere_points, unstable_frame,
)
from shfront.equilibria import catalogue, find, mu1_closed_form
from shfront.lattice import AXIS_X, AngleSpec, make_direction, parse_angle

HEX0 = make_direction("hex", AXIS_X)
HEX30 = make_direction("hex", parse_angle("pi/6", "hex"))
BASE = ModelParams(1.0, 2.0, 1.0, -3.0, -6.0)


def fd_derivative(f, x, h):
    # fourth-order central stencil
    return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h)


@pytest.mark.parametrize("k,n", [(1, 2), (2, 12), (3, 40)])
def test_sphere_points_are_unit_and_distinct(k, n):
    pts = sphere_points(k, n)
    assert np.allclose(np.linalg.norm(pts, axis=1), 1.0)
    d = np.linalg.norm(pts[:, None] - pts[None], axis=2) + np.eye(len(pts))
    assert d.min() > 1e-3


def test_unstable_frame_dimension_and_invariance():
    sys = make_system(BASE, HEX0)
    down = find(catalogue(BASE, HEX0), "hex_down")
    Q = unstable_frame(down, BASE, HEX0, sys)
    assert np.allclose(Q.T @ Q, np.eye(Q.shape[1]), atol=1e-12)
    assert Q.shape[1] == down.spatial_counts[1]
    # the span is invariant under the linearisation
    J = sys.jacobian(sys.embed(np.array(down.amplitudes)))
    JQ = J @ Q
    assert np.allclose(Q @ (Q.T @ JQ), JQ, atol=1e-10)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.2, 4.0), st.lists(st.floats(-0.3, 0.3), min_size=6, max_size=6))
def test_energy_dissipation_identity_along_orbits(c0, y0):
    p = BASE.replace(c0=c0)
    sys = make_system(p, HEX0)
    try:
        tr = integrate(sys, np.array(y0), (0.0, 3.0))
    except Diverged:
        assume(False)
    # the quartic potential is unbounded below; keep to the bounded region around the equilibria
    assume(np.abs(tr.states).max() < 2.0)
    h = 1e-2
    H = lambda x: sys.energy(tr.dense(x))
    for x in np.linspace(2 * h, tr.xi[-1] - 2 * h, 15):
        y = tr.dense(x)
        expected = -c0 * float(np.sum(sys.derivatives(y) ** 2))
        assert abs(fd_derivative(H, x, h) - expected) < 1e-6
        assert math.isclose(sys.dissipation(y), expected, rel_tol=1e-12, abs_tol=1e-15)
    assert tr.max_energy_increase <= 1e-7


def test_integrate_rejects_bad_arguments():
    sys = make_system(BASE, HEX0)
    with pytest.raises(ValueError):
        integrate(sys, np.zeros(6), (0.0, math.inf))
    with pytest.raises(ValueError):
        integrate(sys, np.zeros(6), (0.0, 1.0), rtol=0.0)


def test_integrate_reports_divergence():
    sys = make_system(BASE, HEX0)
    with pytest.raises(Diverged):
        integrate(sys, np.array([3.0, 0, 3.0, 0, 3.0, 0]), (0.0, 50.0))


def check_connection(tr):
    assert tr.final_distance <= 1e-6
    assert tr.endpoint_residual <= 1e-5
    assert tr.max_energy_increase <= 1e-7
    assert tr.energies[0] > tr.energies[-1]


def test_down_hexagons_invade_trivial_state():
    tr = shoot_branches(BASE, HEX0, "hex_down", "trivial")
    check_connection(tr)
    assert tr.persistence == "persistent"


def test_down_hexagons_in_degenerate_direction_via_slow_subsystem():
    sys = slow_system(BASE, HEX30)
    records = catalogue(BASE)
    tr = shoot(find(records, "hex_down"), find(records, "trivial"), BASE, HEX30, system=sys, records=records)
    check_connection(tr)
    assert sys.dim == 5


def test_rolls_invade_beyond_energy_crossing():
    p = ModelParams(5.0, 2.0, 1.0, -1.2, -0.6)
    assert p.mu0 > mu1_closed_form(p)
    tr = shoot_branches(p, HEX0, "rolls", "trivial")
    check_connection(tr)


def test_squares_invade_trivial_state():
    p = ModelParams(1.0, 2.0, 0.0, -3.0, K1=-1.0, kind="square")
    tr = shoot_branches(p, make_direction("square", AngleSpec(2, 1)), "squares", "trivial")
    check_connection(tr)


def test_unreachable_target_reports_best_miss():
    # energy rules out reaching a higher-energy state
    with pytest.raises(ShootingFailure) as info:
        shoot_branches(BASE, HEX0, "hex_down", "rolls", ShootConfig(n_seeds=6, refine=False))
    assert info.value.best is not None
    assert "miss distance" in info.value.report()


def test_orbit_csv_columns():
    tr = shoot_branches(BASE, HEX0, "hex_down", "trivial")
    lines = tr.to_csv().splitlines()
    assert lines[0] == "xi,A1,B1,A2,B2,A3,B3,H"
    assert len(lines) == len(tr.xi) + 1


@pytest.mark.slow
def test_slow_subsystem_deviation_shrinks():
    res = slow_subsystem_check(BASE)
    assert res.monotone
    assert res.deviations[-1] < res.deviations[0]
