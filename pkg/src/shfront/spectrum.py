"""Spatial eigenvalues of the linearised travelling-wave problem, mode by mode.

For a lattice mode gamma and direction d the spatial eigenvalues are the roots of

    p(lam) = -(1 + (d lam + i gamma).(d lam + i gamma))^2 + eps^2 mu0 + eps c0 lam,

a quartic in lam.  At eps = 0 the roots are -i d.gamma +- sqrt(|d_perp.gamma|^2 - 1),
each doubled; they are followed in eps and labelled by the scale on which
they leave their eps = 0 position.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .lattice import Direction, LatticeVector, enumerate_lattice, hyperbolic_gap, transverse_class

RootClass = Literal["more_central", "less_central", "hyperbolic"]


class AmbiguousClassification(ValueError):
    pass


@dataclass(frozen=True)
class DispersionContext:
    mu0: float
    c0: float
    eps: float
    direction: Direction

    def __post_init__(self):
        if not self.c0 > 0:
            raise ValueError("c0 must be positive")
        if not 0 <= self.eps < 1:
            raise ValueError("eps must lie in [0, 1)")


@dataclass(frozen=True)
class ModeSpectrum:
    gamma: LatticeVector
    roots: tuple[complex, ...]
    classes: tuple[RootClass, ...]
    origins: tuple[complex, ...]
    jordan: str  # "2+2", "4" or "hyperbolic-2+2"


def dispersion_poly(gamma: LatticeVector, ctx: DispersionContext) -> np.ndarray:
    """Coefficients of p in descending powers of lam (leading coefficient -1)."""
    u = ctx.direction.axial(gamma)
    s = 1.0 - gamma.norm_sq_int
    eps = ctx.eps
    # q = lam^2 + 2iu lam + s ;  p = -q^2 + eps c0 lam + eps^2 mu0
    return np.array(
        [
            -1.0 + 0j,
            -4j * u,
            4.0 * u * u - 2.0 * s,
            -4j * u * s + eps * ctx.c0,
            -s * s + eps * eps * ctx.mu0,
        ],
        dtype=complex,
    )


def _horner(coeffs: np.ndarray, x: complex) -> tuple[complex, complex]:
    p, dp = 0j, 0j
    for c in coeffs:
        dp = dp * x + p
        p = p * x + c
    return p, dp


def quartic_roots(coeffs: np.ndarray, polish: int = 1) -> np.ndarray:
    """Roots from the balanced companion matrix, each followed by Newton polishing."""
    c = np.asarray(coeffs, dtype=complex)
    monic = c[1:] / c[0]
    n = len(monic)
    comp = np.zeros((n, n), dtype=complex)
    comp[0, :] = -monic
    comp[np.arange(1, n), np.arange(0, n - 1)] = 1.0
    # LAPACK geev balances the matrix before the QR iteration
    roots = np.linalg.eigvals(comp)
    out = []
    for r in roots:
        x = complex(r)
        for _ in range(polish):
            p, dp = _horner(c, x)
            if dp == 0:
                break
            step = p / dp
            # keep the polish local so clustered roots cannot jump between each other
            if abs(step) > 1e-3 * (1.0 + abs(x)):
                break
            x_new = x - step
            if abs(_horner(c, x_new)[0]) <= abs(p):
                x = x_new
        out.append(x)
    return np.array(sorted(out, key=lambda z: (round(z.imag, 9), z.real)), dtype=complex)


def origin_roots(gamma: LatticeVector, direction: Direction) -> tuple[complex, complex]:
    """Distinct eps = 0 roots, each of algebraic multiplicity two."""
    u = direction.axial(gamma)
    v = direction.transverse(gamma)
    cls = transverse_class(gamma, direction)
    if cls == 0:
        r = 0.0
    else:
        r = cmath.sqrt(v * v - 1.0)
        if cls < 0:
            r = complex(0.0, abs(r.imag))
        else:
            r = complex(abs(r.real), 0.0)
    base = complex(0.0, -u)
    return base + r, base - r


def jordan_structure(gamma: LatticeVector, direction: Direction, tol: float = 1e-6) -> str:
    """Geometric rule cross-checked against clustering of the eps = 0 roots."""
    cls = transverse_class(gamma, direction)
    geometric = {0: "4", -1: "2+2", 1: "hyperbolic-2+2"}[cls]
    ctx = DispersionContext(0.0, 1.0, 0.0, direction)
    roots = quartic_roots(dispersion_poly(gamma, ctx), polish=0)
    # clustering: count roots within a sqrt(tol)-scaled radius of the first one
    # (double and quadruple roots carry eigenvalue errors ~ eps_mach^(1/m))
    spread = max(abs(r - roots[0]) for r in roots)
    clustered = "4" if spread < math.sqrt(tol) else None
    if clustered == "4" and geometric != "4":
        raise RuntimeError(f"numerical clustering disagrees with the geometry at {gamma}")
    if geometric == "4" and spread > 1e-2:
        raise RuntimeError(f"expected a quadruple root at {gamma}, spread {spread:.2e}")
    return geometric


def _assign_origins(roots: Sequence[complex], origins: tuple[complex, complex]) -> list[complex]:
    out = []
    for r in roots:
        out.append(min(origins, key=lambda o: abs(r - o)))
    return out


def mode_spectrum(
    gamma: LatticeVector,
    ctx: DispersionContext,
    k_mc: float = 10.0,
    k_lc: float = 10.0,
    strict: bool = True,
) -> ModeSpectrum:
    """Four roots of the mode quartic with a per-root scale label.

    A root is hyperbolic if it stems from an eps = 0 root off the imaginary
    axis.  A root stemming from lam = 0 is more-central while |lam| <= k_mc*eps,
    otherwise (nonzero imaginary origin or the eps^(1/3) roots of a quadruple
    zero) it is less-central.  k_lc bounds the real parts of roots leaving a
    transversal imaginary origin; roots within 5% of either band edge raise
    AmbiguousClassification.
    """
    coeffs = dispersion_poly(gamma, ctx)
    roots = quartic_roots(coeffs)
    origins = origin_roots(gamma, ctx.direction)
    owner = _assign_origins(roots, origins)
    jordan = jordan_structure(gamma, ctx.direction)
    eps = ctx.eps
    classes: list[RootClass] = []
    for r, o in zip(roots, owner):
        if abs(o.real) > 1e-12:
            classes.append("hyperbolic")
            continue
        if eps == 0.0:
            classes.append("more_central" if abs(o) < 1e-12 else "less_central")
            continue
        if abs(o) < 1e-12:
            edge = k_mc * eps
            if strict and abs(abs(r) - edge) < 0.05 * edge:
                raise AmbiguousClassification(f"root {r} of {gamma} sits on the more-central band edge")
            classes.append("more_central" if abs(r) <= edge else "less_central")
        elif jordan == "4":
            # tangential origin away from zero: eps^(1/4) splitting, outside any sqrt(eps) band
            classes.append("less_central")
        else:
            edge = k_lc * math.sqrt(eps)
            if strict and abs(abs(r.real) - edge) < 0.05 * edge:
                raise AmbiguousClassification(f"root {r} of {gamma} sits on the less-central band edge")
            classes.append("less_central" if abs(r.real) <= edge else "hyperbolic")
    return ModeSpectrum(gamma, tuple(complex(r) for r in roots), tuple(classes), tuple(owner), jordan)


def root_residual(gamma: LatticeVector, ctx: DispersionContext, lam: complex) -> float:
    """|p(lam)| / (1 + |lam|^4)."""
    p, _ = _horner(dispersion_poly(gamma, ctx), lam)
    return abs(p) / (1.0 + abs(lam) ** 4)


@dataclass(frozen=True)
class McAsymptotic:
    nu_plus: complex
    nu_minus: complex | None
    branch: str  # generic | critical_speed | perpendicular


def critical_speed(axial: float, mu0: float) -> float:
    """c_crit = 4 |d.k_j| sqrt(mu0)."""
    return 4.0 * abs(axial) * math.sqrt(mu0)


def mc_eigenvalues_asymptotic(j: int, ctx: DispersionContext, tol: float = 1e-10) -> McAsymptotic:
    """Leading eps-coefficients of the two more-central roots of critical mode k_j.

    The roots themselves are eps*nu (generic), or eps*(nu + sqrt(eps) correction)
    at the critical speed; the perpendicular mode has a single root eps*nu.
    """
    if ctx.eps <= 0:
        raise ValueError("asymptotics need eps > 0")
    axial = ctx.direction.proj[j - 1]
    mu0, c0 = ctx.mu0, ctx.c0
    if axial == 0.0:
        return McAsymptotic(complex(-mu0 / c0), None, "perpendicular")
    a2 = axial * axial
    ccrit = critical_speed(axial, mu0)
    if abs(c0 - ccrit) < tol:
        centre = -c0 / (8.0 * a2)
        i32 = cmath.exp(0.75j * math.pi)
        corr = math.sqrt(ctx.eps) * i32 * mu0 ** 0.75 / (2.0 * math.sqrt(2.0) * a2)
        return McAsymptotic(centre + corr, centre - corr, "critical_speed")
    if abs(c0 - ccrit) < 1e-6:
        warnings.warn("speed is close to critical; using the generic expansion", stacklevel=2)
    disc = cmath.sqrt(c0 * c0 - 16.0 * a2 * mu0)
    return McAsymptotic((-c0 + disc) / (8.0 * a2), (-c0 - disc) / (8.0 * a2), "generic")


def lc_eigenvalue_asymptotic(gamma: LatticeVector, ctx: DispersionContext) -> tuple[complex, complex]:
    """Leading sqrt(eps)-coefficients for roots leaving a nonzero imaginary origin transversally.

    With origin i*nu0 and axial component a~ of gamma + d*nu0, the displacement
    delta solves 4 a~^2 delta^2 + i c0 nu0 = 0.
    """
    out = []
    for o in origin_roots(gamma, ctx.direction):
        nu0 = o.imag
        if abs(o.real) > 1e-12 or abs(nu0) < 1e-12:
            raise ValueError("mode has no transversal less-central origin")
        at = ctx.direction.axial(gamma) + nu0
        if abs(at) < 1e-12:
            raise ValueError("tangential origin: roots scale like eps^(1/4)")
        out.append(o)
    o = out[0]
    at = ctx.direction.axial(gamma) + o.imag
    delta = cmath.sqrt(-1j * ctx.c0 * o.imag / (4.0 * at * at))
    return delta, -delta


@dataclass(frozen=True)
class GapReport:
    n_more_central: int
    n_less_central: int
    n_hyperbolic: int
    min_hyperbolic_gap: float
    min_less_central_real: float
    modes: tuple[ModeSpectrum, ...]


def gap_report(direction: Direction, ctx: DispersionContext, radius: float, k_mc: float = 10.0,
               k_lc: float = 10.0) -> GapReport:
    if radius < 2:
        raise ValueError("radius must be at least 2")
    modes = [mode_spectrum(g, ctx, k_mc, k_lc) for g in enumerate_lattice(direction.kind, radius)]
    n_mc = n_lc = n_h = 0
    min_lc = math.inf
    for m in modes:
        for r, c in zip(m.roots, m.classes):
            if c == "more_central":
                n_mc += 1
            elif c == "less_central":
                n_lc += 1
                min_lc = min(min_lc, abs(r.real))
            else:
                n_h += 1
    return GapReport(n_mc, n_lc, n_h, hyperbolic_gap(direction, radius), min_lc, tuple(modes))


def spectrum_csv(report: GapReport) -> str:
    head = ["n1", "n2"]
    for i in range(1, 5):
        head += [f"re{i}", f"im{i}"]
    head += [f"class{i}" for i in range(1, 5)]
    lines = [",".join(head)]
    for m in report.modes:
        row = [str(m.gamma.n1), str(m.gamma.n2)]
        for r in m.roots:
            row += [f"{r.real:.17g}", f"{r.imag:.17g}"]
        row += list(m.classes)
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- scaling probes

Branch = Literal["more_central", "less_central", "jordan4_fast", "tangential", "mc_error"]


def _loglog_slope(x: Sequence[float], y: Sequence[float]) -> float:
    lx, ly = np.log(np.asarray(x)), np.log(np.asarray(y))
    slope, _ = np.polyfit(lx, ly, 1)
    return float(slope)


def geometric_sweep(eps_max: float = 1e-2, n: int = 11, ratio: float = 2.0) -> list[float]:
    return [eps_max / ratio**k for k in range(n)]


def branch_displacements(gamma: LatticeVector, mu0: float, c0: float, direction: Direction,
                         eps_values: Sequence[float], branch: Branch, j: int | None = None) -> list[float]:
    """Per-eps size of the selected branch's departure from its eps = 0 position."""
    out = []
    for eps in eps_values:
        ctx = DispersionContext(mu0, c0, eps, direction)
        ms = mode_spectrum(gamma, ctx)
        roots, cls, own = ms.roots, ms.classes, ms.origins
        if branch == "more_central":
            sel = [abs(r) for r, c in zip(roots, cls) if c == "more_central"]
        elif branch == "mc_error":
            if j is None:
                raise ValueError("mc_error needs the critical-mode index j")
            asym = mc_eigenvalues_asymptotic(j, ctx)
            preds = [eps * asym.nu_plus] + ([eps * asym.nu_minus] if asym.nu_minus is not None else [])
            mc = [r for r, c in zip(roots, cls) if c == "more_central"]
            sel = [min(abs(r - p) for r in mc) for p in preds]
        elif branch == "less_central":
            sel = [abs(r.real) for r, o in zip(roots, own) if abs(o.real) < 1e-12 and abs(o) > 1e-12]
        elif branch == "jordan4_fast":
            if ms.jordan != "4":
                raise ValueError("mode is not a quadruple root")
            sel = sorted(abs(r - o) for r, o in zip(roots, own))[1:]
        elif branch == "tangential":
            if ms.jordan != "4":
                raise ValueError("mode is not a quadruple root")
            sel = [abs(r - o) for r, o in zip(roots, own)]
        else:
            raise ValueError(f"unknown branch {branch!r}")
        if not sel:
            raise ValueError(f"no roots on branch {branch!r} for {gamma}")
        out.append(float(np.mean(sel)))
    return out


def scaling_probe(gamma: LatticeVector, mu0: float, c0: float, direction: Direction,
                  eps_values: Sequence[float], branch: Branch, j: int | None = None) -> float:
    """Fitted log-log exponent of the branch displacement against eps."""
    eps_values = list(eps_values)
    if len(eps_values) < 8:
        raise ValueError("need at least 8 eps values")
    if max(eps_values) > 1e-2:
        raise ValueError("eps sweep must stay below 1e-2")
    ys = branch_displacements(gamma, mu0, c0, direction, eps_values, branch, j)
    return _loglog_slope(eps_values, ys)
