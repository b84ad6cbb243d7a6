"""Physical fields rebuilt from amplitudes, and their file formats.

To leading order a state with amplitudes A_j on the critical modes k_j is

    u(x) = 2 eps sum_j A_j cos(k_j . x),

and an interface travelling along d is the same sum with A_j evaluated at the
slow comoving coordinate Xi = eps (d.x - eps c0 t).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TextIO

import numpy as np
from scipy.interpolate import PchipInterpolator

from .amplitude import ModelParams
from .equilibria import catalogue, find
from .lattice import Direction, generators


@dataclass(frozen=True)
class Grid:
    nx: int
    ny: int
    Lx: float
    Ly: float
    x0: float = 0.0
    y0: float = 0.0

    def __post_init__(self):
        if self.nx <= 0 or self.ny <= 0:
            raise ValueError("grid sizes must be positive")
        if not (self.Lx > 0 and self.Ly > 0):
            raise ValueError("grid extents must be positive")

    def centres(self) -> tuple[np.ndarray, np.ndarray]:
        """Cell-centre coordinates as (nx, ny) arrays."""
        x = self.x0 + (np.arange(self.nx) + 0.5) * (self.Lx / self.nx)
        y = self.y0 + (np.arange(self.ny) + 0.5) * (self.Ly / self.ny)
        return np.meshgrid(x, y, indexing="ij")


@dataclass
class Field2D:
    nx: int
    ny: int
    Lx: float
    Ly: float
    origin: tuple[float, float]
    values: np.ndarray  # (nx, ny), first index along x

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float).reshape(self.nx, self.ny)
        if not np.all(np.isfinite(self.values)):
            raise ValueError("field values must be finite")

    @property
    def dx(self) -> float:
        return self.Lx / self.nx

    @property
    def dy(self) -> float:
        return self.Ly / self.ny

    @classmethod
    def on(cls, grid: Grid, values) -> "Field2D":
        return cls(grid.nx, grid.ny, grid.Lx, grid.Ly, (grid.x0, grid.y0), values)


def _mode_phases(kind: str, X: np.ndarray, Y: np.ndarray) -> list[np.ndarray]:
    return [np.cos(k.kx * X + k.ky * Y) for k in generators(kind)]


def sample_equilibrium_pattern(amplitudes, eps: float, kind: str, grid: Grid) -> Field2D:
    A = np.asarray(amplitudes, dtype=float)
    X, Y = grid.centres()
    waves = _mode_phases(kind, X, Y)
    if len(A) != len(waves):
        raise ValueError(f"{kind} lattice needs {len(waves)} amplitudes")
    u = np.zeros_like(X)
    for a, w in zip(A, waves):
        u += 2.0 * eps * a * w
    return Field2D.on(grid, u)


def _endpoint(params: ModelParams, branch: str) -> np.ndarray:
    return np.asarray(find(catalogue(params), branch).amplitudes, dtype=float)


def amplitude_profile(orbit):
    """Monotone cubic interpolants of A_j(Xi), clamped to the endpoint equilibria."""
    if not orbit.source_branch or not orbit.target_branch:
        raise ValueError("orbit has no endpoint labels")
    sys = orbit.system
    xi = np.asarray(orbit.xi, dtype=float)
    amps = sys.amplitudes(np.asarray(orbit.states))
    keep = np.concatenate([[True], np.diff(xi) > 0])
    xi, amps = xi[keep], amps[keep]
    left = _endpoint(sys.params, orbit.source_branch)
    right = _endpoint(sys.params, orbit.target_branch)
    interp = PchipInterpolator(xi, amps, axis=0, extrapolate=False)

    def profile(s: np.ndarray) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        out = interp(s)
        lo = s < xi[0]
        hi = s > xi[-1]
        out[lo] = left
        out[hi] = right
        return out

    return profile


def sample_interface(orbit, eps: float, c0: float, direction: Direction, t: float,
                     grid: Grid, xi_shift: float = 0.0) -> Field2D:
    """Leading-order interface at time t; ``xi_shift`` moves the front along d."""
    profile = amplitude_profile(orbit)
    X, Y = grid.centres()
    dx, dy = direction.d
    slow = eps * (dx * X + dy * Y - eps * c0 * t) + xi_shift
    A = profile(slow.ravel()).reshape(X.shape + (-1,))
    waves = _mode_phases(direction.kind, X, Y)
    u = np.zeros_like(X)
    for j, w in enumerate(waves):
        u += 2.0 * eps * A[..., j] * w
    return Field2D.on(grid, u)


# ------------------------------------------------------------------ output

def write_field_csv(field: Field2D, out: TextIO) -> None:
    out.write("nx,ny,Lx,Ly,x0,y0\n")
    x0, y0 = field.origin
    out.write(f"{field.nx},{field.ny},{field.Lx!r},{field.Ly!r},{x0!r},{y0!r}\n")
    for v in field.values.ravel():
        out.write(f"{float(v)!r}\n")


def read_field_csv(inp: TextIO) -> Field2D:
    header = inp.readline().strip()
    if header != "nx,ny,Lx,Ly,x0,y0":
        raise ValueError("not a field CSV")
    nx, ny, Lx, Ly, x0, y0 = inp.readline().split(",")
    vals = np.array([float(line) for line in inp if line.strip()])
    return Field2D(int(nx), int(ny), float(Lx), float(Ly), (float(x0), float(y0)), vals)


def pgm_levels(values: np.ndarray) -> tuple[np.ndarray, float, float]:
    lo, hi = float(values.min()), float(values.max())
    if hi > lo:
        scaled = np.floor((values - lo) / (hi - lo) * 255.0 + 0.5)
    else:
        scaled = np.zeros_like(values)
    return scaled.astype(np.int64), lo, hi


def write_field_pgm(field: Field2D, out: TextIO) -> None:
    """ASCII greymap, x to the right and y upwards."""
    levels, lo, hi = pgm_levels(field.values)
    out.write("P2\n")
    out.write(f"# min={lo!r} max={hi!r}\n")
    out.write(f"{field.nx} {field.ny}\n255\n")
    for j in range(field.ny - 1, -1, -1):
        out.write(" ".join(str(int(v)) for v in levels[:, j]) + "\n")
