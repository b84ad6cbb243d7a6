"""Reduced amplitude equations for planar pattern interfaces.

Every variant has the same structure.  Mode j carries a diffusion weight
D_j = 4(d.k_j)^2 and obeys

    D_j A_j'' + c0 A_j' + F_j(A) = 0,

where F = grad V is the Landau nonlinearity.  A mode with D_j = 0 (the mode
perpendicular to the front) reduces to the first-order law c0 A_j' = -F_j(A).
The potential V together with the kinetic term sum D_j B_j^2 / 2 is a Lyapunov
function with dH/dxi = -c0 sum B_j^2 - sum_{D_j=0} F_j^2 / c0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .lattice import Direction, Kind, LatticeVector, generators

Variant = Literal["hex", "hex_degenerate", "square", "square_degenerate", "infinite_speed", "custom"]


@dataclass(frozen=True)
class ModelParams:
    """Amplitude-level model.  K2 is the hex cross coupling, K1 the square one."""

    mu0: float
    c0: float
    beta2: float = 0.0
    K0: float = -3.0
    K2: float = -6.0
    K1: float = -6.0
    kind: Kind = "hex"

    def __post_init__(self):
        if not self.c0 > 0:
            raise ValueError("c0 must be positive")
        if self.kind not in ("hex", "square"):
            raise ValueError(f"unknown lattice kind {self.kind!r}")

    @property
    def n_modes(self) -> int:
        return 3 if self.kind == "hex" else 2

    @property
    def cross(self) -> float:
        return self.K2 if self.kind == "hex" else self.K1

    @property
    def rigorous_regime(self) -> bool:
        """Both cubic couplings negative (flag only)."""
        return self.K0 < 0 and self.cross < 0

    def replace(self, **kw) -> "ModelParams":
        d = dict(mu0=self.mu0, c0=self.c0, beta2=self.beta2, K0=self.K0, K2=self.K2, K1=self.K1, kind=self.kind)
        d.update(kw)
        return ModelParams(**d)


# ------------------------------------------------------------------ Landau part

def landau_force(A: np.ndarray, p: ModelParams) -> np.ndarray:
    """F(A) = grad V(A); stationary states of the Landau system solve F = 0."""
    A = np.asarray(A, dtype=float)
    if p.kind == "hex":
        a1, a2, a3 = A
        s1, s2, s3 = a1 * a1, a2 * a2, a3 * a3
        return np.array(
            [
                p.mu0 * a1 + p.beta2 * a2 * a3 + (p.K0 * s1 + p.K2 * (s2 + s3)) * a1,
                p.mu0 * a2 + p.beta2 * a1 * a3 + (p.K0 * s2 + p.K2 * (s1 + s3)) * a2,
                p.mu0 * a3 + p.beta2 * a1 * a2 + (p.K0 * s3 + p.K2 * (s1 + s2)) * a3,
            ]
        )
    a1, a2 = A
    return np.array(
        [
            p.mu0 * a1 + (p.K0 * a1 * a1 + p.K1 * a2 * a2) * a1,
            p.mu0 * a2 + (p.K0 * a2 * a2 + p.K1 * a1 * a1) * a2,
        ]
    )


def landau_potential(A: np.ndarray, p: ModelParams) -> float:
    A = np.asarray(A, dtype=float)
    sq = A * A
    v = 0.5 * p.mu0 * sq.sum() + 0.25 * p.K0 * (sq * sq).sum()
    if p.kind == "hex":
        v += p.beta2 * A[0] * A[1] * A[2]
        v += 0.5 * p.K2 * (sq[0] * sq[1] + sq[0] * sq[2] + sq[1] * sq[2])
    else:
        v += 0.5 * p.K1 * sq[0] * sq[1]
    return float(v)


def landau_jacobian(A: np.ndarray, p: ModelParams) -> np.ndarray:
    """Symmetric linearisation of the Landau system (Hessian of V)."""
    A = np.asarray(A, dtype=float)
    n = p.n_modes
    J = np.zeros((n, n))
    sq = A * A
    if p.kind == "hex":
        for i in range(3):
            others = [k for k in range(3) if k != i]
            J[i, i] = p.mu0 + 3 * p.K0 * sq[i] + p.K2 * sum(sq[k] for k in others)
            for j in others:
                k = 3 - i - j
                J[i, j] = p.beta2 * A[k] + 2 * p.K2 * A[i] * A[j]
    else:
        J[0, 0] = p.mu0 + 3 * p.K0 * sq[0] + p.K1 * sq[1]
        J[1, 1] = p.mu0 + 3 * p.K0 * sq[1] + p.K1 * sq[0]
        J[0, 1] = J[1, 0] = 2 * p.K1 * A[0] * A[1]
    return J


# ------------------------------------------------------------------ ODE systems

def diffusion_weights(direction: Direction) -> tuple[float, ...]:
    """4 (d.k_j)^2 per generator, exactly zero for the perpendicular mode."""
    n = 3 if direction.kind == "hex" else 2
    return tuple(4.0 * direction.proj_sq(j) for j in range(1, n + 1))


@dataclass(frozen=True)
class ReducedSystem:
    """First-order reduced system with per-mode diffusion weights.

    State layout: for each mode j in order, A_j followed by B_j when D_j > 0.
    """

    params: ModelParams
    weights: tuple[float, ...]
    variant: Variant = "custom"
    speed_scale: float = field(default=1.0)

    def __post_init__(self):
        if len(self.weights) != self.params.n_modes:
            raise ValueError("one diffusion weight per mode is required")
        if any(w < 0 for w in self.weights):
            raise ValueError("diffusion weights must be nonnegative")

    # layout -----------------------------------------------------------
    @property
    def second_order(self) -> tuple[bool, ...]:
        return tuple(w > 0 for w in self.weights)

    @property
    def dim(self) -> int:
        return sum(2 if s else 1 for s in self.second_order)

    @property
    def labels(self) -> tuple[str, ...]:
        out = []
        for j, s in enumerate(self.second_order, start=1):
            out.append(f"A{j}")
            if s:
                out.append(f"B{j}")
        return tuple(out)

    def _index(self) -> tuple[list[int], list[int | None]]:
        ai, bi, k = [], [], 0
        for s in self.second_order:
            ai.append(k)
            k += 1
            if s:
                bi.append(k)
                k += 1
            else:
                bi.append(None)
        return ai, bi

    def amplitudes(self, y: np.ndarray) -> np.ndarray:
        ai, _ = self._index()
        return np.asarray(y)[..., ai]

    def derivatives(self, y: np.ndarray) -> np.ndarray:
        """B_j per mode (zero for first-order modes)."""
        _, bi = self._index()
        y = np.asarray(y)
        out = np.zeros(y.shape[:-1] + (len(bi),))
        for j, b in enumerate(bi):
            if b is not None:
                out[..., j] = y[..., b]
        return out

    def embed(self, A, B=None) -> np.ndarray:
        ai, bi = self._index()
        y = np.zeros(self.dim)
        y[ai] = A
        if B is not None:
            for j, b in enumerate(bi):
                if b is not None:
                    y[b] = B[j]
        return y

    # dynamics ---------------------------------------------------------
    def rhs(self, y: np.ndarray) -> np.ndarray:
        p = self.params
        c0 = p.c0 * self.speed_scale
        ai, bi = self._index()
        A = y[ai]
        F = landau_force(A, p)
        out = np.empty(self.dim)
        for j, w in enumerate(self.weights):
            if bi[j] is None:
                out[ai[j]] = -F[j] / c0
            else:
                B = y[bi[j]]
                out[ai[j]] = B
                out[bi[j]] = -(F[j] + c0 * B) / w
        return out

    def __call__(self, xi, y):
        return self.rhs(y)

    def jacobian(self, y: np.ndarray) -> np.ndarray:
        ai, bi = self._index()
        return spatial_matrix(landau_jacobian(y[ai], self.params), self.weights,
                              self.params.c0 * self.speed_scale)

    # energy -----------------------------------------------------------
    def energy(self, y: np.ndarray) -> float:
        ai, bi = self._index()
        kin = 0.0
        for j, w in enumerate(self.weights):
            if bi[j] is not None:
                kin += 0.5 * w * y[bi[j]] ** 2
        return kin + landau_potential(y[ai], self.params)

    def energy_gradient(self, y: np.ndarray) -> np.ndarray:
        ai, bi = self._index()
        g = np.zeros(self.dim)
        g[ai] = landau_force(y[ai], self.params)
        for j, w in enumerate(self.weights):
            if bi[j] is not None:
                g[bi[j]] = w * y[bi[j]]
        return g

    def dissipation(self, y: np.ndarray) -> float:
        """Closed form of dH/dxi along the flow."""
        ai, bi = self._index()
        c0 = self.params.c0 * self.speed_scale
        F = landau_force(y[ai], self.params)
        d = 0.0
        for j in range(len(self.weights)):
            if bi[j] is None:
                d -= F[j] ** 2 / c0
            else:
                d -= c0 * y[bi[j]] ** 2
        return d


def spatial_matrix(L: np.ndarray, weights, c0: float) -> np.ndarray:
    """First-order linearisation of D psi'' + c0 psi' + L psi = 0.

    Modes with zero weight enter as c0 psi_j' = -(L psi)_j.
    """
    n = len(weights)
    layout = []
    for j, w in enumerate(weights):
        layout.append(("A", j))
        if w > 0:
            layout.append(("B", j))
    pos = {key: i for i, key in enumerate(layout)}
    m = len(layout)
    M = np.zeros((m, m))
    for j, w in enumerate(weights):
        ra = pos[("A", j)]
        if w > 0:
            rb = pos[("B", j)]
            M[ra, rb] = 1.0
            for k in range(n):
                M[rb, pos[("A", k)]] = -L[j, k] / w
            M[rb, rb] = -c0 / w
        else:
            for k in range(n):
                M[ra, pos[("A", k)]] = -L[j, k] / c0
    return M


def make_system(params: ModelParams, direction: Direction) -> ReducedSystem:
    """Reduced system matching the direction (degenerate when d.k_j = 0)."""
    if params.kind != direction.kind:
        raise ValueError("lattice kind of params and direction differ")
    w = diffusion_weights(direction)
    if direction.degenerate_mode is None:
        variant = params.kind
    else:
        variant = f"{params.kind}_degenerate"
    return ReducedSystem(params, w, variant)


def slow_system(params: ModelParams, direction: Direction) -> ReducedSystem:
    """Slow subsystem: the k2 weight set to zero, the other weights kept."""
    w = list(diffusion_weights(direction))
    w[1] = 0.0
    return ReducedSystem(params, tuple(w), f"{params.kind}_degenerate")


def infinite_speed_system(params: ModelParams) -> ReducedSystem:
    """Limit c0 -> infinity in the slow variable xi / c0: A' = -F(A)."""
    return ReducedSystem(params, (0.0,) * params.n_modes, "infinite_speed", 1.0 / params.c0)


@dataclass(frozen=True)
class AmplitudeState:
    """Named phase point of a reduced system."""

    variant: str
    values: tuple[float, ...]


def state_variant(direction: Direction, kind: Kind) -> str:
    return kind if direction.degenerate_mode is None else f"{kind}_degenerate"


def rhs(state: AmplitudeState, params: ModelParams, direction: Direction) -> AmplitudeState:
    sys = make_system(params, direction)
    if state.variant != sys.variant or len(state.values) != sys.dim:
        raise ValueError(f"state variant {state.variant!r} does not match {sys.variant!r}")
    return AmplitudeState(sys.variant, tuple(float(v) for v in sys.rhs(np.asarray(state.values, float))))


def lyapunov(state: AmplitudeState, params: ModelParams, direction: Direction) -> float:
    sys = make_system(params, direction)
    if len(state.values) != sys.dim:
        raise ValueError("state dimension does not match the direction")
    return sys.energy(np.asarray(state.values, float))


# ------------------------------------------------------------------ coefficients

@dataclass(frozen=True)
class CoefficientSet:
    kind: Kind
    K0: float
    cross: float  # K2 (hex) or K1 (square)
    quadratic: float  # eps * beta2 from the quadratic interaction (hex), 0 on squares
    nu0: float
    nu_map: dict


def _sh_symbol(g2: float) -> float:
    """Linear symbol at onset: -(1 - |gamma|^2)^2."""
    return -((1.0 - g2) ** 2)


def _dot(g: LatticeVector, h: LatticeVector) -> float:
    return g.kx * h.kx + g.ky * h.ky


def coefficients_qcsh(beta: float, kind: Kind) -> CoefficientSet:
    """Amplitude coefficients for the nonlinearity -beta |grad u|^2 - u^3.

    The quadratic symbol is N2(gamma1, gamma2) = beta gamma1.gamma2 and the cubic
    symbol is -1.  Second-shell modes are slaved through the onset symbol.
    """
    if kind not in ("hex", "square"):
        raise ValueError(f"unknown lattice kind {kind!r}")
    if abs(beta) >= 1:
        raise ValueError("|beta| must be below 1")

    def n2(g: LatticeVector, h: LatticeVector) -> float:
        return beta * _dot(g, h)

    n3 = -1.0
    zero = LatticeVector(0, 0, kind)
    gens = generators(kind)
    k1, k2 = gens[0], gens[1]

    def slaved(gj: LatticeVector, gl: LatticeVector) -> float:
        g = gj + gl
        sym = _sh_symbol(g.norm_sq_int)
        if sym == 0.0:
            raise ValueError(f"second-shell mode {g} is critical")
        mult = 1 if gj == gl else 2
        return -mult * n2(gj, gl) / sym

    # mean mode, normalised per the 3 * nu0 * sum|A_j|^2 convention
    nu0 = -2.0 * n2(k1, -k1) / _sh_symbol(0) / 3.0
    nu_map = {}
    crit = gens + [-g for g in gens]
    for gj in crit:
        for gl in crit:
            g = gj + gl
            if g.norm_sq_int in (0, 1):
                continue
            nu_map.setdefault((g.n1, g.n2), slaved(gj, gl))

    nu_2k1 = nu_map[(2 * k1.n1, 2 * k1.n2)]
    K0 = 2.0 * (n2(zero, k1) * nu0 + n2(k1.scale(2), -k1) * nu_2k1) + 3.0 * n3
    d12 = k1 - k2
    nu_d12 = nu_map[(d12.n1, d12.n2)]
    if kind == "hex":
        cross = 2.0 * (n2(zero, k1) * nu0 + n2(d12, k2) * nu_d12) + 6.0 * n3
        k3 = gens[2]
        quadratic = 2.0 * n2(-k2, -k3)
    else:
        s12 = k1 + k2
        nu_s12 = nu_map[(s12.n1, s12.n2)]
        cross = 2.0 * (n2(zero, k1) * nu0 + n2(s12, -k2) * nu_s12 + n2(d12, k2) * nu_d12) + 6.0 * n3
        quadratic = 0.0
    return CoefficientSet(kind, float(K0), float(cross), float(quadratic), float(nu0), nu_map)


def params_from_qcsh(eps: float, beta2: float, mu0: float, c0: float, kind: Kind = "hex") -> ModelParams:
    """ModelParams with cubic couplings evaluated at beta = eps * beta2; beta2 kept as given."""
    cs = coefficients_qcsh(eps * beta2, kind)
    if kind == "hex":
        return ModelParams(mu0, c0, beta2, cs.K0, cs.cross, -6.0, "hex")
    return ModelParams(mu0, c0, 0.0, cs.K0, -6.0, cs.cross, "square")
