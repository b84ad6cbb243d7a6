"""Integration of the reduced systems and heteroclinic shooting between equilibria."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import minimize, minimize_scalar

from .amplitude import ModelParams, ReducedSystem, make_system, slow_system, infinite_speed_system
from .equilibria import EquilibriumRecord, MarginalSpectrum, catalogue, count_spectrum, find
from .lattice import Direction, angle_for_delta, make_direction


MAX_NODES = 200_000


class Diverged(RuntimeError):
    def __init__(self, msg, last_state):
        super().__init__(msg)
        self.last_state = last_state


@dataclass
class OrbitTrace:
    system: ReducedSystem
    xi: np.ndarray
    states: np.ndarray  # (n_nodes, dim)
    energies: np.ndarray
    source_branch: str | None = None
    target_branch: str | None = None
    min_distances: dict = field(default_factory=dict)
    status: str = "integrated"
    final_distance: float = math.nan
    endpoint_residual: float = math.nan
    seed_index: int | None = None
    persistence: str = ""
    visits: tuple[str, ...] = ()
    dense: object = None

    @property
    def max_energy_increase(self) -> float:
        if len(self.energies) < 2:
            return 0.0
        return float(max(0.0, np.diff(self.energies).max()))

    def to_csv(self) -> str:
        cols = ["xi", *self.system.labels, "H"]
        lines = [",".join(cols)]
        for x, y, h in zip(self.xi, self.states, self.energies):
            lines.append(",".join(f"{v:.17g}" for v in (x, *y, h)))
        return "\n".join(lines) + "\n"


def integrate(system: ReducedSystem, y0, span: tuple[float, float], rtol: float = 1e-10, atol: float = 1e-12,
              nodes_per_unit: float = 20.0, events=None, method: str = "RK45") -> OrbitTrace:
    """Adaptive Dormand-Prince 5(4) integration with dense output.

    Output nodes are the accepted steps merged with a uniform grid; the grid is
    refined so that at least 200 nodes fall on each unit of energy decrease
    (capped at MAX_NODES).
    """
    if rtol <= 0 or atol <= 0:
        raise ValueError("tolerances must be positive")
    if not all(np.isfinite(span)):
        raise ValueError("integration span must be finite")
    y0 = np.asarray(y0, dtype=float)

    def blowup(_t, y):
        return 1e8 - float(np.abs(y).max())

    blowup.terminal = True
    evs = [blowup] + list(events or [])
    sol = solve_ivp(system, span, y0, method=method, rtol=rtol, atol=atol, dense_output=True, events=evs)
    if sol.status == -1 or (sol.t_events[0].size > 0):
        raise Diverged(f"integration failed: {sol.message}", sol.y[:, -1])
    t_end = sol.t[-1]
    h0 = system.energy(y0)
    h1 = system.energy(sol.y[:, -1])
    n_energy = int(min(math.ceil(200 * max(h0 - h1, 0.0)), MAX_NODES))
    n_uniform = max(int(abs(t_end - span[0]) * nodes_per_unit), n_energy, 2)
    grid = np.linspace(span[0], t_end, n_uniform + 1)
    xi = np.union1d(sol.t, grid)
    states = sol.sol(xi).T
    energies = np.array([system.energy(y) for y in states])
    tr = OrbitTrace(system, xi, states, energies, dense=sol.sol)
    tr.status = "event" if sol.status == 1 else "integrated"
    tr._events = sol.t_events  # type: ignore[attr-defined]
    return tr


# ------------------------------------------------------------------ unstable directions

def _embed_equilibrium(system: ReducedSystem, eq: EquilibriumRecord) -> np.ndarray:
    return system.embed(np.asarray(eq.amplitudes, dtype=float))


def unstable_frame(eq: EquilibriumRecord, params: ModelParams, direction: Direction | None = None,
                   system: ReducedSystem | None = None, marginal_tol: float = 1e-8) -> np.ndarray:
    """Orthonormal real basis (columns) of the unstable eigenspace at an equilibrium."""
    if system is None:
        system = make_system(params, direction)
    y = _embed_equilibrium(system, eq)
    J = system.jacobian(y)
    vals, vecs = np.linalg.eig(J)
    count_spectrum(vals, marginal_tol)  # raises on marginal spectrum
    cols = []
    for lam, v in zip(vals, vecs.T):
        if lam.real <= 0:
            continue
        if abs(lam.imag) < 1e-12:
            cols.append(v.real)
        elif lam.imag > 0:
            cols.append(v.real)
            cols.append(v.imag)
    if not cols:
        return np.zeros((system.dim, 0))
    Q, _ = np.linalg.qr(np.array(cols).T)
    # fix the sign of each column deterministically
    for j in range(Q.shape[1]):
        i = int(np.argmax(np.abs(Q[:, j])))
        if Q[i, j] < 0:
            Q[:, j] = -Q[:, j]
    return Q


def sphere_points(k: int, n: int) -> np.ndarray:
    """Quasi-uniform points on S^(k-1): Fibonacci lattice (k = 3), circle (k = 2), +-1 (k = 1)."""
    if k == 1:
        return np.array([[1.0], [-1.0]])
    if k == 2:
        ang = 2 * np.pi * np.arange(n) / n
        return np.stack([np.cos(ang), np.sin(ang)], axis=1)
    if k == 3:
        i = np.arange(n) + 0.5
        phi = np.arccos(1 - 2 * i / n)
        golden = np.pi * (1 + 5 ** 0.5)
        return np.stack([np.cos(golden * i) * np.sin(phi), np.sin(golden * i) * np.sin(phi), np.cos(phi)], axis=1)
    # tensor grid in hyperspherical angles
    m = max(2, int(round(n ** (1.0 / (k - 1)))))
    grids = [np.linspace(0, np.pi, m + 2)[1:-1]] * (k - 2) + [np.linspace(0, 2 * np.pi, 2 * m, endpoint=False)]
    mesh = np.meshgrid(*grids, indexing="ij")
    angles = np.stack([g.ravel() for g in mesh], axis=1)
    return np.array([_from_angles(a) for a in angles])


def _from_angles(angles: np.ndarray) -> np.ndarray:
    k = len(angles) + 1
    x = np.ones(k)
    for i, a in enumerate(angles):
        x[i] *= math.cos(a)
        x[i + 1:] *= math.sin(a)
    return x


def _to_angles(x: np.ndarray) -> np.ndarray:
    k = len(x)
    out = []
    for i in range(k - 1):
        r = np.linalg.norm(x[i:])
        a = math.acos(np.clip(x[i] / r, -1, 1)) if r > 0 else 0.0
        if i == k - 2 and x[-1] < 0:
            a = 2 * math.pi - a
        out.append(a)
    return np.array(out)


# ------------------------------------------------------------------ shooting

@dataclass(frozen=True)
class ShootConfig:
    eps_shoot: float = 1e-4
    n_seeds: int = 48
    converge_radius: float = 1e-6
    escape_radius: float | None = None
    xi_max: float | None = None
    plateau_radius: float = 0.05
    rtol: float = 1e-10
    atol: float = 1e-12
    refine: bool = True
    refine_evals: int = 60


@dataclass
class SeedOutcome:
    index: int
    direction: np.ndarray
    status: str  # success | miss | timeout | diverged
    min_target_distance: float
    trace: OrbitTrace | None


class ShootingFailure(RuntimeError):
    def __init__(self, msg, best: SeedOutcome | None):
        super().__init__(msg)
        self.best = best

    def report(self) -> str:
        if self.best is None:
            return f"{self}\n"
        return f"{self}\nbest seed {self.best.index} miss distance {self.best.min_target_distance:.6e}\n"


def _run_seed(system, y_src, y_tgt, frame, s, cfg: ShootConfig, index: int) -> SeedOutcome:
    y0 = y_src + cfg.eps_shoot * (frame @ s)
    esc = cfg.escape_radius if cfg.escape_radius is not None else 10.0 * np.linalg.norm(y_src) + 10.0
    xi_max = cfg.xi_max if cfg.xi_max is not None else 500.0 / system.params.c0

    # stop strictly inside the convergence ball so the endpoint honours the radius
    def hit(_t, y):
        return float(np.linalg.norm(y - y_tgt)) - 0.5 * cfg.converge_radius

    hit.terminal = True
    hit.direction = -1

    def escape(_t, y):
        return esc - float(np.linalg.norm(y))

    escape.terminal = True
    # H never increases, so falling below the target's energy rules the target out
    h_floor = system.energy(y_tgt) - 1e-9 * (1.0 + abs(system.energy(y_tgt)))

    def below(_t, y):
        return system.energy(y) - h_floor

    below.terminal = True
    try:
        tr = integrate(system, y0, (0.0, xi_max), cfg.rtol, cfg.atol, events=[hit, escape, below])
    except Diverged:
        return SeedOutcome(index, s, "diverged", math.inf, None)
    ev = tr._events  # type: ignore[attr-defined]
    dist = np.linalg.norm(tr.states - y_tgt, axis=1)
    if ev[1].size > 0:
        status = "success"
    elif ev[2].size > 0 or ev[3].size > 0:
        status = "miss"
    else:
        status = "timeout"
    return SeedOutcome(index, s, status, float(dist.min()), tr)


def _annotate(tr: OrbitTrace, system, records, source, target, cfg: ShootConfig, index: int) -> OrbitTrace:
    tr.source_branch, tr.target_branch = source.branch, target.branch
    tr.seed_index = index
    y_tgt = _embed_equilibrium(system, target)
    tr.final_distance = float(np.linalg.norm(tr.states[-1] - y_tgt))
    tr.endpoint_residual = float(np.linalg.norm(system.rhs(tr.states[-1])))
    visits = []
    for r in records:
        if not r.exists:
            continue
        name = r.label or r.branch
        d = float(np.linalg.norm(tr.states - _embed_equilibrium(system, r), axis=1).min())
        tr.min_distances[name] = d
        if r.branch not in (source.branch, target.branch) and d < cfg.plateau_radius:
            visits.append(name)
    tr.visits = tuple(visits)
    # transversality proxy: a full-dimensional stable subspace at the target
    try:
        ns, _ = count_spectrum(np.linalg.eigvals(system.jacobian(y_tgt)))
        full = ns == system.dim
    except MarginalSpectrum:
        full = False
    tr.persistence = "persistent" if (target.branch == "trivial" and full) else "numerical-only"
    return tr


def iter_seeds(source: EquilibriumRecord, target: EquilibriumRecord, params: ModelParams,
               direction: Direction | None, cfg: ShootConfig = ShootConfig(),
               system: ReducedSystem | None = None):
    """Lazily integrate the seeds of the unstable sphere in index order."""
    if system is None:
        system = make_system(params, direction)
    frame = unstable_frame(source, params, direction, system)
    k = frame.shape[1]
    if k == 0:
        raise ShootingFailure(f"{source.branch} has no unstable directions", None)
    y_src = _embed_equilibrium(system, source)
    y_tgt = _embed_equilibrium(system, target)
    pts = sphere_points(k, cfg.n_seeds)
    for i, s in enumerate(pts):
        yield _run_seed(system, y_src, y_tgt, frame, s, cfg, i)


def shoot_all(source, target, params, direction, cfg: ShootConfig = ShootConfig(), system=None) -> list[SeedOutcome]:
    """Integrate every seed of the unstable sphere; no selection or refinement."""
    return list(iter_seeds(source, target, params, direction, cfg, system))


def shoot(source: EquilibriumRecord, target: EquilibriumRecord, params: ModelParams,
          direction: Direction | None, cfg: ShootConfig = ShootConfig(),
          system: ReducedSystem | None = None, records=None) -> OrbitTrace:
    """Heteroclinic orbit from source to target by shooting along the unstable sphere.

    Seeds are source + eps_shoot * v for v on a deterministic grid of the unit
    sphere of the unstable eigenspace.  The first converging seed (by index) is
    returned.  Without a converging seed the best miss is refined (golden-section
    on a circle, Nelder-Mead in sphere angles otherwise).
    """
    if system is None:
        system = make_system(params, direction)
    if records is None:
        records = catalogue(params)
    outcomes = []
    for o in iter_seeds(source, target, params, direction, cfg, system):
        if o.status == "success":
            return _annotate(o.trace, system, records, source, target, cfg, o.index)
        o.trace = None  # keep memory flat across many seeds
        outcomes.append(o)
    ranked = sorted(outcomes, key=lambda o: (o.min_target_distance, o.index))
    best = ranked[0]
    frame = unstable_frame(source, params, direction, system)
    k = frame.shape[1]
    y_src = _embed_equilibrium(system, source)
    y_tgt = _embed_equilibrium(system, target)
    if cfg.refine and k >= 2:
        cache = {}

        def miss(angles):
            key = tuple(np.round(np.atleast_1d(angles), 14))
            if key not in cache:
                s = _from_angles(np.atleast_1d(angles))
                cache[key] = _run_seed(system, y_src, y_tgt, frame, s, cfg, -1)
            return cache[key].min_target_distance

        a0 = _to_angles(best.direction)
        if k == 2:
            step = math.pi / max(cfg.n_seeds, 2)
            minimize_scalar(miss, bracket=(a0[0] - step, a0[0], a0[0] + step), method="golden",
                            options={"maxiter": cfg.refine_evals})
        else:
            minimize(miss, a0, method="Nelder-Mead", options={"maxfev": cfg.refine_evals, "xatol": 1e-10})
        refined = min(cache.values(), key=lambda o: o.min_target_distance)
        if refined.status == "success":
            return _annotate(refined.trace, system, records, source, target, cfg, best.index)
        if refined.min_target_distance < best.min_target_distance:
            best = refined
    raise ShootingFailure(f"no seed from {source.branch} reached {target.branch}", best)


def shoot_branches(params: ModelParams, direction: Direction, source: str, target: str,
                   cfg: ShootConfig = ShootConfig(), system: ReducedSystem | None = None) -> OrbitTrace:
    records = catalogue(params)
    return shoot(find(records, source), find(records, target), params, direction, cfg, system, records)


# ------------------------------------------------------------------ slow-manifold comparison

@dataclass
class SlowComparison:
    deltas: list[float]
    angles: list[str]
    deviations: list[float]
    monotone: bool


def _align_index(tr: OrbitTrace, y_src, y_tgt, frac: float = 0.5) -> float:
    """xi where the amplitude part first reaches the given fraction of the way to the target."""
    sys = tr.system
    A = sys.amplitudes(tr.states)
    a_src = sys.amplitudes(y_src)
    a_tgt = sys.amplitudes(y_tgt)
    total = np.linalg.norm(a_src - a_tgt)
    prog = np.linalg.norm(A - a_src, axis=1) / total
    i = int(np.argmax(prog >= frac))
    if i == 0:
        return float(tr.xi[0])
    x0, x1 = tr.xi[i - 1], tr.xi[i]
    p0, p1 = prog[i - 1], prog[i]
    return float(x0 + (frac - p0) * (x1 - x0) / (p1 - p0))


def _toward_target(outcomes, y_src_amp, y_tgt_amp, system):
    """Successful outcome whose first amplitude displacement points toward the target."""
    good = [o for o in outcomes if o.status == "success"]
    if not good:
        return None
    want = y_tgt_amp - y_src_amp

    def score(o):
        a = system.amplitudes(o.trace.states)
        k = min(len(a) - 1, max(1, len(a) // 50))
        return -float(np.dot(a[k] - y_src_amp, want))

    return min(good, key=lambda o: (score(o), o.index))


def compare_projection(full: OrbitTrace, slow: OrbitTrace, y_src_full, y_tgt_full, y_src_slow, y_tgt_slow,
                       n_grid: int = 4000) -> float:
    """Sup-distance of the full orbit's slow-variable projection from the slow orbit after alignment."""
    s_full = _align_index(full, y_src_full, y_tgt_full)
    s_slow = _align_index(slow, y_src_slow, y_tgt_slow)
    lo = max(full.xi[0] - s_full, slow.xi[0] - s_slow)
    hi = min(full.xi[-1] - s_full, slow.xi[-1] - s_slow)
    grid = np.linspace(lo, hi, n_grid)
    yf = full.dense(grid + s_full).T
    ys = slow.dense(grid + s_slow).T
    keep = [i for i, lab in enumerate(full.system.labels) if lab in slow.system.labels]
    order = [full.system.labels[i] for i in keep]
    idx_slow = [slow.system.labels.index(lab) for lab in order]
    return float(np.abs(yf[:, keep] - ys[:, idx_slow]).max())


def slow_subsystem_check(params: ModelParams, deltas=(0.3, 0.1, 0.03), source: str = "hex_down",
                         target: str = "trivial", cfg: ShootConfig = ShootConfig(), max_den: int = 64) -> SlowComparison:
    """Full versus slow-subsystem heteroclinics along directions approaching the degenerate one."""
    records = catalogue(params)
    src, tgt = find(records, source), find(records, target)
    out_d, out_a, devs = [], [], []
    for delta in deltas:
        ang = angle_for_delta(delta, max_den)
        direction = make_direction(params.kind, ang)
        full_sys = make_system(params, direction)
        slow_sys = slow_system(params, direction)
        runs = []
        for sys in (full_sys, slow_sys):
            outs = shoot_all(src, tgt, params, direction, cfg, sys)
            ys, yt = _embed_equilibrium(sys, src), _embed_equilibrium(sys, tgt)
            pick = _toward_target(outs, sys.amplitudes(ys), sys.amplitudes(yt), sys)
            if pick is None:
                raise ShootingFailure(f"no orbit for delta={delta} ({sys.variant})", None)
            runs.append((pick.trace, ys, yt))
        (tf, yfs, yft), (ts, yss, yst) = runs
        devs.append(compare_projection(tf, ts, yfs, yft, yss, yst))
        out_d.append(full_sys.weights[1])
        out_a.append(str(ang))
    mono = all(b < a for a, b in zip(devs, devs[1:]))
    return SlowComparison(out_d, out_a, devs, mono)


def infinite_speed_check(params: ModelParams, direction: Direction, speeds=(5.0, 10.0, 20.0),
                         source: str = "hex_down", target: str = "trivial",
                         cfg: ShootConfig = ShootConfig()) -> list[float]:
    """Deviation of full orbits at growing c0 from the c0 -> infinity gradient flow, in xi / c0."""
    devs = []
    for c0 in speeds:
        p = params.replace(c0=c0)
        records = catalogue(p)
        src, tgt = find(records, source), find(records, target)
        full_sys = make_system(p, direction)
        lim_sys = infinite_speed_system(p)
        runs = []
        for sys in (full_sys, lim_sys):
            c = ShootConfig(**{**cfg.__dict__, "xi_max": 500.0 * (1.0 if sys is full_sys else 1.0 / c0)})
            outs = shoot_all(src, tgt, p, direction, c, sys)
            ys, yt = _embed_equilibrium(sys, src), _embed_equilibrium(sys, tgt)
            pick = _toward_target(outs, sys.amplitudes(ys), sys.amplitudes(yt), sys)
            if pick is None:
                raise ShootingFailure(f"no orbit at c0={c0} ({sys.variant})", None)
            runs.append((pick.trace, ys, yt))
        (tf, yfs, yft), (tl, yls, ylt) = runs
        # limit system runs in xi / c0; rescale its grid to compare in xi
        tl.xi = tl.xi * c0
        dense = tl.dense
        tl.dense = lambda x, d=dense, c=c0: d(x / c)
        sf = _align_index(tf, yfs, yft)
        sl = _align_index(tl, yls, ylt)
        lo = max(tf.xi[0] - sf, tl.xi[0] - sl)
        hi = min(tf.xi[-1] - sf, tl.xi[-1] - sl)
        grid = np.linspace(lo, hi, 4000)
        af = full_sys.amplitudes(tf.dense(grid + sf).T)
        al = lim_sys.amplitudes(tl.dense(grid + sl).T)
        devs.append(float(np.abs(af - al).max()))
    return devs
