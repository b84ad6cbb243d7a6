"""Stationary patterns of the amplitude system and their stability.

Temporal (Landau) stability and spatial (travelling-wave) stability are linked
through the quadratic eigenvalue problem (D lam^2 + c0 lam + L) psi = 0 with
D = diag(4 (d.k_j)^2) and L the symmetric Landau linearisation.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import bisect

from .amplitude import ModelParams, diffusion_weights, landau_force, landau_jacobian, landau_potential, spatial_matrix
from .lattice import Direction

BRANCHES_HEX = ("trivial", "rolls", "hex_up", "hex_down", "mixed_or_false_hex")
BRANCHES_SQUARE = ("trivial", "rolls", "squares")


class MarginalSpectrum(ValueError):
    """An eigenvalue sits on the imaginary axis (bifurcation point)."""


class StabilityLawWarning(UserWarning):
    pass


# ------------------------------------------------------------------ small symmetric eigensolver

def jacobi_eigenvalues(S: np.ndarray, tol: float = 1e-15, max_sweeps: int = 60) -> np.ndarray:
    """Eigenvalues of a small symmetric matrix by cyclic Jacobi rotations (ascending)."""
    a = np.array(S, dtype=float, copy=True)
    n = a.shape[0]
    if not np.allclose(a, a.T, atol=1e-12 * (1 + np.abs(a).max())):
        raise ValueError("matrix is not symmetric")
    for _ in range(max_sweeps):
        off = math.sqrt(sum(a[i, j] ** 2 for i in range(n) for j in range(n) if i != j))
        if off <= tol * (1.0 + np.abs(np.diag(a)).max()):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if a[p, q] == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * a[p, q])
                if abs(theta) > 1e150:
                    t = 0.5 / theta  # avoids overflow in theta^2
                else:
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                rot = np.eye(n)
                rot[p, p] = rot[q, q] = c
                rot[p, q], rot[q, p] = s, -s
                a = rot.T @ a @ rot
    return np.sort(np.diag(a))


# ------------------------------------------------------------------ catalogue

@dataclass
class EquilibriumRecord:
    branch: str
    amplitudes: tuple[float, ...]
    exists: bool
    violated: str = ""
    energy: float = float("nan")
    landau_eigs: tuple[float, ...] = ()
    spatial_counts: tuple[int, int] | None = None
    per_mode_oscillatory: tuple[bool, ...] = ()
    residual: float = float("nan")
    label: str = ""  # mixed_modes / false_hexagons for the non-hexagonal branch

    @property
    def n_unstable_landau(self) -> int:
        return sum(1 for e in self.landau_eigs if e > 0)

    @property
    def state(self) -> np.ndarray:
        return np.asarray(self.amplitudes, dtype=float)


def _fill(rec: EquilibriumRecord, p: ModelParams, direction: Direction | None) -> EquilibriumRecord:
    if not rec.exists:
        return rec
    A = rec.state
    rec.residual = float(np.abs(landau_force(A, p)).max())
    rec.energy = landau_potential(A, p)
    rec.landau_eigs = tuple(float(e) for e in jacobi_eigenvalues(landau_jacobian(A, p)))
    if direction is not None:
        try:
            st = spatial_stability(A, p, direction)
            rec.spatial_counts = (st.n_stable, st.n_unstable)
            rec.per_mode_oscillatory = tuple(bool(abs(z.imag) > 1e-12) for z in st.eigenvalues if z.real < 0)
        except MarginalSpectrum:
            rec.spatial_counts = None
    return rec


def hexagon_amplitudes(p: ModelParams) -> tuple[float, float] | None:
    """(A_H+, A_H-) = (-beta2 -+ sqrt(beta2^2 - 4 mu0 (K0 + 2K2))) / (2 (K0 + 2K2))."""
    s = p.K0 + 2.0 * p.K2
    disc = p.beta2 ** 2 - 4.0 * p.mu0 * s
    if s == 0.0 or disc <= 0.0:
        return None
    r = math.sqrt(disc)
    return (-p.beta2 - r) / (2.0 * s), (-p.beta2 + r) / (2.0 * s)


def mixed_mode_window(p: ModelParams) -> tuple[float, float]:
    """mu0 interval in which the nontrivial non-hexagonal branch is a mixed mode."""
    dk = (p.K0 - p.K2) ** 2
    return -p.K0 * p.beta2 ** 2 / dk, -p.beta2 ** 2 * (2 * p.K0 + p.K2) / dk


def catalogue(p: ModelParams, direction: Direction | None = None) -> list[EquilibriumRecord]:
    recs: list[EquilibriumRecord] = []
    if p.kind == "hex":
        recs.append(EquilibriumRecord("trivial", (0.0, 0.0, 0.0), True))
        if p.mu0 * p.K0 < 0:
            ar = math.sqrt(-p.mu0 / p.K0)
            recs.append(EquilibriumRecord("rolls", (ar, 0.0, 0.0), True))
        else:
            recs.append(EquilibriumRecord("rolls", (0.0, 0.0, 0.0), False, "mu0*K0 < 0"))
        hx = hexagon_amplitudes(p)
        if hx is None:
            why = "K0+2K2 != 0 and beta2^2 - 4 mu0 (K0+2K2) > 0"
            recs.append(EquilibriumRecord("hex_up", (0.0,) * 3, False, why))
            recs.append(EquilibriumRecord("hex_down", (0.0,) * 3, False, why))
        else:
            # the sign of the amplitude decides up/down; both roots are returned
            for a in sorted(hx, reverse=True):
                name = "hex_up" if a > 0 else "hex_down"
                recs.append(EquilibriumRecord(name, (a, a, a), True))
            if hx[0] * hx[1] > 0:
                # both roots on one side (beta2 = 0 is impossible here), keep labels unique
                recs[-1].branch = recs[-1].branch + "_2"
        k_diff = p.K0 - p.K2
        k_sum = p.K0 + p.K2
        cond = None
        if k_diff != 0 and k_sum != 0:
            cond = (p.K0 * p.beta2 ** 2 + k_diff ** 2 * p.mu0) / k_sum
        if cond is not None and cond < 0:
            a1 = p.beta2 / k_diff
            a2 = math.sqrt(-cond / (k_diff ** 2))
            lo, hi = mixed_mode_window(p)
            name = "mixed_modes" if lo <= p.mu0 < hi else "false_hexagons"
            recs.append(EquilibriumRecord("mixed_or_false_hex", (a1, a2, a2), True, label=name))
        else:
            recs.append(EquilibriumRecord("mixed_or_false_hex", (0.0,) * 3, False,
                                          "(K0 beta2^2 + (K0-K2)^2 mu0)/(K0+K2) < 0"))
    else:
        recs.append(EquilibriumRecord("trivial", (0.0, 0.0), True))
        if p.mu0 * p.K0 < 0:
            recs.append(EquilibriumRecord("rolls", (math.sqrt(-p.mu0 / p.K0), 0.0), True))
        else:
            recs.append(EquilibriumRecord("rolls", (0.0, 0.0), False, "mu0*K0 < 0"))
        s = p.K0 + p.K1
        if p.mu0 * s < 0:
            a = math.sqrt(-p.mu0 / s)
            recs.append(EquilibriumRecord("squares", (a, a), True))
        else:
            recs.append(EquilibriumRecord("squares", (0.0, 0.0), False, "mu0*(K0+K1) < 0"))
    return [_fill(r, p, direction) for r in recs]


def mixed_label(rec: EquilibriumRecord) -> str:
    return rec.label if rec.branch == "mixed_or_false_hex" and rec.exists else ""


def find(records, branch: str) -> EquilibriumRecord:
    for r in records:
        if r.branch == branch:
            return r
    raise KeyError(branch)


# ------------------------------------------------------------------ spatial stability

@dataclass
class SpatialStability:
    n_stable: int
    n_unstable: int
    eigenvalues: tuple[complex, ...]
    n_unstable_landau: int | None
    predicted_stable: int | None
    law_holds: bool | None
    max_residual: float = 0.0


def qep_eigenvalues(L: np.ndarray, weights, c0: float) -> np.ndarray:
    """Eigenvalues of D lam^2 + c0 lam + L via the first-order companion matrix."""
    M = spatial_matrix(np.asarray(L, dtype=float), weights, c0)
    return np.linalg.eigvals(M)


def qep_residual(L: np.ndarray, weights, c0: float, lam: complex) -> float:
    """Smallest singular value of the (normalised) matrix polynomial at lam.

    Zero-weight modes enter as the first-order rows c0 lam + L.
    """
    D = np.diag(weights).astype(complex)
    Q = D * lam * lam + c0 * lam * np.eye(len(weights)) + np.asarray(L, dtype=complex)
    scale = np.abs(D).max() * abs(lam) ** 2 + c0 * abs(lam) + np.abs(L).max() + 1.0
    return float(np.linalg.svd(Q, compute_uv=False)[-1] / scale)


def count_spectrum(eigs, marginal_tol: float = 1e-8) -> tuple[int, int]:
    eigs = np.asarray(eigs)
    if np.any(np.abs(eigs.real) < marginal_tol):
        raise MarginalSpectrum("eigenvalue within tolerance of the imaginary axis")
    return int(np.sum(eigs.real < 0)), int(np.sum(eigs.real > 0))


def spatial_stability(A, p: ModelParams, direction: Direction, marginal_tol: float = 1e-8) -> SpatialStability:
    """Stable/unstable counts of the travelling-wave linearisation at amplitude A.

    The counts are checked against the law n_stable = (#second-order modes) + n,
    n the number of unstable Landau eigenvalues, and a warning is raised on mismatch.
    """
    L = landau_jacobian(A, p)
    w = diffusion_weights(direction)
    return qep_stability(L, w, p.c0, marginal_tol, symmetric=True)


def qep_stability(L, weights, c0: float, marginal_tol: float = 1e-8, symmetric: bool | None = None) -> SpatialStability:
    L = np.asarray(L, dtype=float)
    eigs = qep_eigenvalues(L, weights, c0)
    ns, nu = count_spectrum(eigs, marginal_tol)
    res = max(qep_residual(L, weights, c0, z) for z in eigs)
    if symmetric is None:
        symmetric = bool(np.allclose(L, L.T))
    n_lan = pred = None
    holds = None
    if symmetric:
        lev = jacobi_eigenvalues(L)
        if np.any(np.abs(lev) < marginal_tol):
            raise MarginalSpectrum("Landau linearisation is singular")
        n_lan = int(np.sum(lev > 0))
        pred = sum(1 for x in weights if x > 0) + n_lan
        holds = pred == ns
        if not holds:
            warnings.warn(f"stable count {ns} differs from the predicted {pred}", StabilityLawWarning, stacklevel=2)
    return SpatialStability(ns, nu, tuple(complex(z) for z in eigs), n_lan, pred, holds, res)


# ------------------------------------------------------------------ trivial state tails

@dataclass(frozen=True)
class ModeTail:
    mode: int
    axial_sq: float
    roots: tuple[complex, ...]
    oscillatory: bool
    c_crit: float


def trivial_mode_roots(axial_sq: float, mu0: float, c0: float, mode: int = 1) -> ModeTail:
    """Roots of 4 (d.k)^2 lam^2 + c0 lam + mu0 (or c0 lam + mu0 when d.k = 0)."""
    if mu0 <= 0:
        raise ValueError("mu0 must be positive")
    ccrit = 4.0 * math.sqrt(axial_sq * mu0)
    if axial_sq == 0.0:
        return ModeTail(mode, 0.0, (complex(-mu0 / c0),), False, 0.0)
    a = 4.0 * axial_sq
    disc = complex(c0 * c0 - 4.0 * a * mu0)
    r = np.sqrt(disc)
    roots = ((-c0 + r) / (2 * a), (-c0 - r) / (2 * a))
    return ModeTail(mode, axial_sq, tuple(complex(z) for z in roots), c0 < ccrit, ccrit)


def trivial_mode_classification(p: ModelParams, direction: Direction) -> list[ModeTail]:
    n = p.n_modes
    return [trivial_mode_roots(direction.proj_sq(j), p.mu0, p.c0, j) for j in range(1, n + 1)]


# ------------------------------------------------------------------ energies

def mu1_closed_form(p: ModelParams) -> float:
    """Crossing of the roll and down-hexagon energies for K0 < K2 < 0."""
    K0, K2, b = p.K0, p.K2, p.beta2
    if not (K0 < K2 < 0):
        raise ValueError("mu1 is defined for K0 < K2 < 0")
    den = 2.0 * math.sqrt(2.0) * math.sqrt(K0 * (K0 + K2) ** 3) - 2.0 * K0 * (K0 + 3.0 * K2)
    return -b * b * K0 / den


def hexagon_energy_gap(p: ModelParams) -> float:
    """H(A_H+) - H(A_H-) in closed form."""
    s = p.K0 + 2.0 * p.K2
    disc = p.beta2 ** 2 - 4.0 * p.mu0 * s
    return -p.beta2 * disc ** 1.5 / (4.0 * s ** 3)


def lower_hexagon(p: ModelParams) -> float:
    """Amplitude of the hexagon root with the lower energy (A_H-)."""
    hx = hexagon_amplitudes(p)
    if hx is None:
        raise ValueError("hexagons do not exist")
    return hx[1]


def roll_minus_hexagon(mu0: float, p: ModelParams) -> float:
    q = p.replace(mu0=mu0)
    a = lower_hexagon(q)
    ar = math.sqrt(-mu0 / q.K0)
    return landau_potential(np.array([a, a, a]), q) - landau_potential(np.array([ar, 0.0, 0.0]), q)


def energy_crossing(p: ModelParams, lo: float, hi: float, xtol: float = 1e-13) -> float:
    """Bisection for H(A_H-) = H(A_R) on [lo, hi]."""
    return bisect(lambda m: roll_minus_hexagon(m, p), lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=400)


@dataclass
class EnergyRanking:
    order: list[tuple[str, float]]
    lowest_nontrivial: str | None
    mu1: float | None
    hexagon_gap: float | None = None
    records: list[EquilibriumRecord] = field(default_factory=list)


def energy_ranking(p: ModelParams) -> EnergyRanking:
    """Branches ordered by Lyapunov energy at B = 0 (mixed modes included when present)."""
    if p.K0 >= 0 or p.cross >= 0:
        raise ValueError("energy ranking needs negative cubic couplings")
    recs = [r for r in catalogue(p) if r.exists]
    order = sorted(((r.branch, r.energy) for r in recs), key=lambda t: t[1])
    nontriv = [b for b, _ in order if b != "trivial"]
    mu1 = None
    gap = None
    if p.kind == "hex":
        if p.K0 < p.K2 < 0:
            mu1 = mu1_closed_form(p)
        if hexagon_amplitudes(p) is not None:
            gap = hexagon_energy_gap(p)
    return EnergyRanking(order, nontriv[0] if nontriv else None, mu1, gap, recs)


def equilibria_csv(p: ModelParams, direction: Direction, mu_values) -> str:
    lines = ["mu0,branch,A1,A2,A3,energy,n_unstable_landau,n_stable_spatial"]
    for mu in mu_values:
        q = p.replace(mu0=float(mu))
        for r in catalogue(q, direction):
            if not r.exists:
                continue
            amps = list(r.amplitudes) + [0.0] * (3 - len(r.amplitudes))
            ns = "" if r.spatial_counts is None else str(r.spatial_counts[0])
            name = mixed_label(r) or r.branch
            lines.append(
                f"{mu:.17g},{name},{amps[0]:.17g},{amps[1]:.17g},{amps[2]:.17g},"
                f"{r.energy:.17g},{r.n_unstable_landau},{ns}"
            )
    return "\n".join(lines) + "\n"
