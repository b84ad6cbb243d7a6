"""Linear spreading speeds of pulled fronts invading u = 0.

A front travelling along d with transverse wavenumber k_perp is governed by

    d(lam, nu, c) = -(nu^2 - k_perp^2 + 1)^2 + mu + c nu - lam,

and its selected speed is given by a double root in nu with lam = i omega on
the imaginary axis.  The closed form below is checked by substitution;
``double_root_newton`` solves the same two equations from scratch and serves
as an independent cross-check.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterable, TextIO

import numpy as np


@dataclass(frozen=True)
class MarginalSolution:
    k_perp: float
    mu: float
    nu: complex
    c: float
    omega: float

    def residuals(self) -> tuple[float, float]:
        return marginal_residuals(self.k_perp, self.mu, self.nu, self.c, self.omega)


def _check_kperp(k_perp: float) -> float:
    if not abs(k_perp) < 1.0:
        raise ValueError(f"|k_perp| must be below 1, got {k_perp}")
    return 1.0 - k_perp * k_perp


def dispersion(nu: complex, k_perp: float, mu: float, c: float, omega: float) -> complex:
    q = nu * nu - k_perp * k_perp + 1.0
    return -q * q + mu + c * nu - 1j * omega


def dispersion_dnu(nu: complex, k_perp: float, c: float) -> complex:
    a = 1.0 - k_perp * k_perp
    return -4.0 * nu * (nu * nu + a) + c


def marginal_residuals(k_perp, mu, nu, c, omega) -> tuple[float, float]:
    return abs(dispersion(nu, k_perp, mu, c, omega)), abs(dispersion_dnu(nu, k_perp, c))


def marginal_exact(k_perp: float, mu: float, branch: int = 1) -> MarginalSolution:
    """Closed-form pinched double root with Re nu < 0.

    ``branch`` = +1 or -1 picks the sign of Im nu; omega carries the same sign.
    """
    if not mu > 0:
        raise ValueError("mu must be positive for a pulled front")
    if branch not in (1, -1):
        raise ValueError("branch must be +1 or -1")
    a = _check_kperp(k_perp)
    s = math.sqrt(a * a + 6.0 * mu)
    lo = math.sqrt(s - a)
    hi = math.sqrt(s + 3.0 * a)
    nu = complex(-lo / (2.0 * math.sqrt(3.0)), branch * hi / 2.0)
    c = 4.0 / (3.0 * math.sqrt(3.0)) * (s + 2.0 * a) * lo
    omega = branch * hi ** 3 * lo / (2.0 * math.sqrt(3.0))
    return MarginalSolution(k_perp, mu, nu, c, omega)


def marginal_leading(k_perp: float, mu0: float, eps: float, branch: int = 1) -> MarginalSolution:
    """First order in eps of the exact solution at mu = eps^2 mu0."""
    if not 0 < eps <= 0.5:
        raise ValueError("eps must lie in (0, 0.5]")
    if not mu0 > 0:
        raise ValueError("mu0 must be positive")
    a = _check_kperp(k_perp)
    root = math.sqrt(mu0)
    nu = complex(-0.5 * eps * math.sqrt(mu0 / a), branch * math.sqrt(a))
    c = 4.0 * eps * math.sqrt(a * mu0)
    omega = branch * 4.0 * eps * a * root
    return MarginalSolution(k_perp, eps * eps * mu0, nu, c, omega)


def double_root_newton(k_perp: float, mu: float, guess: MarginalSolution,
                       tol: float = 1e-14, max_iter: int = 50) -> MarginalSolution:
    """Solve d = d_nu d = 0 for (nu, c, omega) by Newton's method.

    Four real unknowns against the real and imaginary parts of two equations.
    """
    _check_kperp(k_perp)
    a = 1.0 - k_perp * k_perp
    x = np.array([guess.nu.real, guess.nu.imag, guess.c, guess.omega])
    for _ in range(max_iter):
        nu = complex(x[0], x[1])
        f1 = dispersion(nu, k_perp, mu, x[2], x[3])
        f2 = dispersion_dnu(nu, k_perp, x[2])
        F = np.array([f1.real, f1.imag, f2.real, f2.imag])
        if np.max(np.abs(F)) < tol:
            break
        d1 = f2  # d(f1)/d(nu)
        d2 = -4.0 * (3.0 * nu * nu + a)
        # complex-analytic in nu: columns for Re nu and Im nu are f' and i f'
        J = np.array([
            [d1.real, -d1.imag, nu.real, 0.0],
            [d1.imag, d1.real, nu.imag, -1.0],
            [d2.real, -d2.imag, 1.0, 0.0],
            [d2.imag, d2.real, 0.0, 0.0],
        ])
        x = x - np.linalg.solve(J, F)
    else:
        raise RuntimeError("double-root Newton did not converge")
    return MarginalSolution(k_perp, mu, complex(x[0], x[1]), float(x[2]), float(x[3]))


def fastest_transverse(kperps: Iterable[float]) -> float:
    """The transverse wavenumber with the largest 1 - k^2, which spreads fastest."""
    return min(kperps, key=abs)


def speed_table(kperps: Iterable[float], mu0: float, eps: float) -> list[tuple[float, float, float, float]]:
    rows = []
    for k in kperps:
        ex = marginal_exact(k, eps * eps * mu0)
        ld = marginal_leading(k, mu0, eps)
        rows.append((k, ex.c, ld.c, ex.omega))
    return rows


def write_speed_csv(rows, out: TextIO) -> None:
    out.write("kperp,c_exact,c_leading,omega\n")
    for k, ce, cl, om in rows:
        out.write(f"{k:.12g},{ce:.12g},{cl:.12g},{om:.12g}\n")
