import io
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from shfront.frontspeed import (
    double_root_newton, fastest_transverse, marginal_exact, marginal_leading, speed_table, write_speed_csv,
)

kperps = st.floats(-0.95, 0.95)
mus = st.floats(1e-4, 3.0)


def test_reference_speeds():
    assert math.isclose(marginal_leading(0.0, 1.0, 0.3).c, 1.2, rel_tol=1e-14)
    assert abs(marginal_leading(-0.5, 1.0, 0.3).c - 1.0392) < 1e-3
    assert math.isclose(marginal_leading(-0.5, 1.0, 0.3).c, 1.2 * math.sqrt(0.75), rel_tol=1e-14)


def test_exact_residuals_on_grid():
    worst = 0.0
    for k in np.linspace(-0.9, 0.9, 10):
        for mu in np.geomspace(1e-3, 2.0, 10):
            for branch in (1, -1):
                worst = max(worst, *marginal_exact(k, mu, branch).residuals())
    assert worst <= 1e-10


def test_axial_speed_matches_classical_closed_form():
    # invasion of u = 0 by rolls: c = 4 (2 + s) sqrt(s - 1) / (3 sqrt 3), s = sqrt(1 + 6 mu)
    for mu in (0.01, 0.3, 1.0):
        s = math.sqrt(1 + 6 * mu)
        expected = 4 * (2 + s) * math.sqrt(s - 1) / (3 * math.sqrt(3))
        assert math.isclose(marginal_exact(0.0, mu).c, expected, rel_tol=1e-14)


@given(kperps, mus)
def test_newton_oracle_reproduces_closed_form(k, mu):
    ex = marginal_exact(k, mu)
    guess = ex.__class__(k, mu, ex.nu * (1 + 0.02), ex.c * 1.03, ex.omega * 0.97)
    nr = double_root_newton(k, mu, guess)
    assert abs(nr.nu - ex.nu) < 1e-9
    assert abs(nr.c - ex.c) < 1e-9 * (1 + ex.c)
    assert abs(nr.omega - ex.omega) < 1e-9 * (1 + abs(ex.omega))


@given(kperps, mus)
def test_double_root_is_a_repeated_polynomial_root(k, mu):
    ex = marginal_exact(k, mu)
    a = 1 - k * k
    # -(nu^2 + a)^2 + mu + c nu - i omega, descending powers
    coeffs = [-1, 0, -2 * a, ex.c, -a * a + mu - 1j * ex.omega]
    roots = np.roots(coeffs)
    close = np.sort(np.abs(roots - ex.nu))
    # a double root splits by O(sqrt(eps_mach)) in floating point
    assert close[0] < 1e-6 and close[1] < 1e-6 and close[2] > 1e-3


@given(kperps, mus)
def test_pinched_root_decays_into_the_unstable_state(k, mu):
    ex = marginal_exact(k, mu)
    assert ex.nu.real < 0 and ex.c > 0


@given(kperps, mus)
def test_branches_are_complex_conjugate(k, mu):
    p, m = marginal_exact(k, mu, 1), marginal_exact(k, mu, -1)
    assert p.nu == m.nu.conjugate() and p.c == m.c and p.omega == -m.omega


@given(st.floats(0.05, 3.0))
def test_speed_decreases_with_transverse_wavenumber(mu):
    cs = [marginal_exact(k, mu).c for k in np.linspace(0, 0.9, 10)]
    assert all(b < a for a, b in zip(cs, cs[1:]))


@pytest.mark.parametrize("k", [0.0, -0.5, 0.7])
def test_leading_order_converges_quadratically(k):
    epss = [1e-2, 1e-3, 1e-4, 1e-5]
    errs = []
    for eps in epss:
        ex = marginal_exact(k, eps * eps)
        ld = marginal_leading(k, 1.0, eps)
        errs.append(abs(ex.c - ld.c) + abs(ex.nu - ld.nu) + abs(ex.omega - ld.omega))
    slope = np.polyfit(np.log(epss), np.log(errs), 1)[0]
    assert slope >= 1.8


def test_leading_speed_is_the_per_mode_critical_speed():
    # 4 eps sqrt(a mu0) equals eps * c_crit with (d.k)^2 = a
    eps, mu0, k = 0.3, 1.0, -0.5
    assert math.isclose(marginal_leading(k, mu0, eps).c, eps * 4 * math.sqrt((1 - k * k) * mu0))


def test_fastest_transverse_and_validation():
    assert fastest_transverse([-0.5, 0.3, 0.9]) == 0.3
    with pytest.raises(ValueError):
        marginal_exact(1.0, 0.1)
    with pytest.raises(ValueError):
        marginal_exact(0.0, 0.0)
    with pytest.raises(ValueError):
        marginal_exact(0.0, 0.1, branch=2)
    with pytest.raises(ValueError):
        marginal_leading(0.0, 1.0, 0.6)


def test_speed_csv():
    buf = io.StringIO()
    write_speed_csv(speed_table([0.0, -0.5], 1.0, 0.3), buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "kperp,c_exact,c_leading,omega"
    assert lines[1].split(",")[2] == "1.2"
