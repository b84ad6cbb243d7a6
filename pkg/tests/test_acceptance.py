"""Acceptance checks, one test per criterion, each printing a PASS/FAIL line."""

import math
import time

import numpy as np
import pytest
from scipy.optimize import brentq

from shfront.amplitude import ModelParams, coefficients_qcsh, landau_potential, make_system, slow_system
from shfront.cli import PRESETS as CLI_PRESETS
from shfront.connect import Diverged, integrate, shoot, shoot_branches, slow_subsystem_check
from shfront.equilibria import (
    MarginalSpectrum, catalogue, find, hexagon_amplitudes, mu1_closed_form, qep_stability, roll_minus_hexagon,
    spatial_stability, trivial_mode_roots,
)
from shfront.frontspeed import marginal_exact, marginal_leading
from shfront.lattice import AXIS_X, AngleSpec, LatticeVector, generators, make_direction, parse_angle
from shfront.pde import preset, run_experiment
from shfront.spectrum import DispersionContext, gap_report, scaling_probe

HEX0 = make_direction("hex", AXIS_X)
HEX30 = make_direction("hex", parse_angle("pi/6", "hex"))
SQ0 = make_direction("square", AXIS_X)
SQ21 = make_direction("square", AngleSpec(2, 1))
SWEEP = [1e-2 * 10 ** (-3 * k / 10) for k in range(11)]  # 1e-2 down to 1e-5


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail, elapsed):
        with capsys.disabled():
            print(f"\ncriterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}  [{elapsed:.3g} s]")
        return ok
    return emit


def test_criterion_01_coefficients(report):
    t = time.perf_counter()
    hx = coefficients_qcsh(0.0, "hex")
    sq = coefficients_qcsh(0.0, "square")
    elapsed = time.perf_counter() - t
    reps = 50
    t = time.perf_counter()
    for _ in range(reps):
        coefficients_qcsh(0.0, "hex")
    per_call = (time.perf_counter() - t) / reps
    ok = hx.K0 == -3.0 and hx.cross == -6.0 and sq.cross == -6.0 and per_call < 1e-3
    assert report(1, ok, f"K0={hx.K0} K2={hx.cross} K1={sq.cross} per_call={per_call:.2e}s", elapsed)


def test_criterion_02_front_speed_formulas(report):
    t = time.perf_counter()
    c0 = marginal_leading(0.0, 1.0, 0.3).c
    c30 = marginal_leading(-0.5, 1.0, 0.3).c
    worst = 0.0
    for k in np.linspace(-0.9, 0.9, 10):
        for mu in np.geomspace(1e-3, 2.0, 10):
            worst = max(worst, *marginal_exact(k, mu).residuals())
    elapsed = time.perf_counter() - t
    ok = abs(c0 - 1.2) < 1e-12 and abs(c30 - 1.0392) <= 1e-3 and worst <= 1e-10 and elapsed < 1.0
    assert report(2, ok, f"c(0)={c0:.6f} c(-1/2)={c30:.6f} max_residual={worst:.2e}", elapsed)


def test_criterion_03_spectral_counts(report):
    t = time.perf_counter()
    cases = [("hex 0", HEX0, 12), ("hex cot=2", make_direction("hex", AngleSpec(2, 1)), 12),
             ("hex pi/6", HEX30, 10), ("square cot=2", SQ21, 8), ("square 0", SQ0, 6)]
    got = {name: gap_report(d, DispersionContext(1.0, 1.0, 1e-2, d), 6).n_more_central for name, d, _ in cases}
    elapsed = time.perf_counter() - t
    ok = all(got[name] == want for name, _, want in cases) and elapsed < 5.0
    assert report(3, ok, " ".join(f"{k}:{v}" for k, v in got.items()), elapsed)


def test_criterion_04_asymptotic_orders(report):
    t = time.perf_counter()
    mc = min(scaling_probe(generators("hex")[j - 1], 1.0, 1.5, HEX0, SWEEP, "mc_error", j) for j in (1, 2, 3))
    lc = scaling_probe(LatticeVector(2, 1, "hex"), 1.0, 2.0, HEX0, SWEEP, "less_central")
    j4 = scaling_probe(LatticeVector(0, 1, "square"), 1.0, 2.0, SQ0, SWEEP, "jordan4_fast")
    tg = scaling_probe(LatticeVector(1, 1, "square"), 1.0, 2.0, SQ0, SWEEP, "tangential")
    elapsed = time.perf_counter() - t
    ok = (mc >= 1.8 and abs(lc - 0.5) <= 0.05 and abs(j4 - 1 / 3) <= 0.05 and abs(tg - 0.25) <= 0.05
          and elapsed < 10.0)
    assert report(4, ok, f"mc_err={mc:.3f} lc={lc:.3f} jordan4={j4:.3f} tangential={tg:.3f}", elapsed)


def test_criterion_05_stability_law(report):
    t = time.perf_counter()
    rng = np.random.default_rng(20261017)
    checked = failures = 0
    while checked < 200:
        M = rng.normal(scale=1.5, size=(3, 3))
        L = 0.5 * (M + M.T)
        w = tuple(rng.uniform(0.05, 5.0, 3))
        c0 = rng.uniform(0.05, 5.0)
        try:
            st = qep_stability(L, w, c0, marginal_tol=1e-8)
        except MarginalSpectrum:
            continue
        checked += 1
        failures += st.n_stable != 3 + int(np.sum(np.linalg.eigvalsh(L) > 0))
    # the same law on Landau linearisations of actual equilibria
    model_checked = 0
    while model_checked < 50:
        p = ModelParams(rng.uniform(0.05, 4), rng.uniform(0.2, 5), rng.uniform(-2, 2),
                        rng.uniform(-4, -0.1), rng.uniform(-4, -0.1))
        ang = AngleSpec(int(rng.integers(1, 20)), 0)
        ang = AngleSpec(ang.a, int(rng.integers(0, ang.a)))
        d = make_direction("hex", ang)
        for r in catalogue(p):
            if not r.exists:
                continue
            try:
                st = spatial_stability(np.array(r.amplitudes), p, d)
            except MarginalSpectrum:
                continue
            model_checked += 1
            failures += not st.law_holds
    L = 0.5 * np.array([[1.0, -1.0], [3.0, 1.0]])
    ce = qep_stability(L, (1.0, 2.0), 1.0, symmetric=False)
    split = sorted((z.real > 0, abs(z.imag) > 1e-8) for z in ce.eigenvalues)
    counter_ok = split == [(False, True), (False, True), (True, True), (True, True)]
    elapsed = time.perf_counter() - t
    ok = failures == 0 and counter_ok and elapsed < 5.0
    assert report(5, ok, f"draws={checked}+{model_checked} violations={failures} counterexample_2+2={counter_ok}",
                  elapsed)


def test_criterion_06_energy_hierarchy(report):
    t = time.perf_counter()
    p = ModelParams(1.0, 2.0, 1.0, -1.2, -0.6)
    mu1 = mu1_closed_form(p)
    root = brentq(lambda m: roll_minus_hexagon(m, p), 0.5, 10.0, xtol=1e-14, rtol=1e-15)
    worst_gap = math.inf
    for mu0 in np.geomspace(1e-3, 100.0, 400):
        q = p.replace(mu0=mu0)
        up, down = hexagon_amplitudes(q)
        gap = landau_potential(np.full(3, up), q) - landau_potential(np.full(3, down), q)
        worst_gap = min(worst_gap, gap)
    elapsed = time.perf_counter() - t
    ok = abs(root - mu1) <= 1e-8 and worst_gap > 0 and elapsed < 1.0
    assert report(6, ok, f"mu1={mu1:.12f} bisected={root:.12f} min_gap={worst_gap:.3e}", elapsed)


def fd4(f, x, h):
    return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h)


def test_criterion_07_lyapunov_dissipation(report):
    t = time.perf_counter()
    rng = np.random.default_rng(7)
    systems = [make_system(ModelParams(1.0, c, 1.0, -3.0, -6.0), d)
               for c in (0.5, 2.0, 5.0) for d in (HEX0, make_direction("hex", AngleSpec(3, 1)), HEX30)]
    done = rejected = 0
    worst_rise = worst_id = 0.0
    while done < 100:
        sys = systems[rng.integers(len(systems))]
        y0 = rng.uniform(-0.4, 0.4, sys.dim)
        try:
            tr = integrate(sys, y0, (0.0, 4.0), rtol=1e-10, atol=1e-12)
        except Diverged:
            rejected += 1
            continue
        if np.abs(tr.states).max() > 2.0:  # left the region around the equilibria
            rejected += 1
            continue
        done += 1
        worst_rise = max(worst_rise, tr.max_energy_increase)
        H = lambda x: sys.energy(tr.dense(x))
        h = 1e-3  # fast modes at large c0 need a fine stencil; dense-output noise stays ~1e-7
        c0 = sys.params.c0
        for x in tr.xi[(tr.xi > 2 * h) & (tr.xi < tr.xi[-1] - 2 * h)][::5]:
            y = tr.dense(x)
            # B_j = A_j' on every mode, including a first-order one
            slopes = sys.amplitudes(sys.rhs(y))
            worst_id = max(worst_id, abs(fd4(H, x, h) + c0 * float(np.sum(slopes ** 2))))
    elapsed = time.perf_counter() - t
    ok = worst_rise <= 1e-7 and worst_id <= 1e-6 and elapsed < 30.0
    assert report(7, ok, f"trajectories={done} (rejected {rejected}) max_rise={worst_rise:.2e} "
                         f"max_identity_error={worst_id:.2e}", elapsed)


def test_criterion_08_heteroclinics(report):
    t = time.perf_counter()
    base = ModelParams(1.0, 2.0, 1.0, -3.0, -6.0)
    runs = {"hex_down->trivial theta=0": shoot_branches(base, HEX0, "hex_down", "trivial")}
    recs = catalogue(base)
    runs["hex_down->trivial theta=pi/6 slow"] = shoot(find(recs, "hex_down"), find(recs, "trivial"), base, HEX30,
                                                      system=slow_system(base, HEX30), records=recs)
    rp = ModelParams(5.0, 2.0, 1.0, -1.2, -0.6)
    assert rp.mu0 > mu1_closed_form(rp)
    runs["rolls->trivial"] = shoot_branches(rp, HEX0, "rolls", "trivial")
    sq = CLI_PRESETS["shoot"]["square-front"]
    sp = ModelParams(sq["mu0"], sq["c0"], sq["beta2"], sq["K0"], K1=sq["K1"], kind="square")
    sd = make_direction("square", parse_angle(sq["angle"], "square"))
    runs["squares->trivial"] = shoot_branches(sp, sd, "squares", "trivial")
    elapsed = time.perf_counter() - t
    ok = all(tr.endpoint_residual <= 1e-5 and tr.final_distance <= 1e-6 for tr in runs.values()) and elapsed < 120
    detail = "; ".join(f"{k}: dist={tr.final_distance:.1e} res={tr.endpoint_residual:.1e}" for k, tr in runs.items())
    assert report(8, ok, detail, elapsed)


def test_criterion_09_criticality(report):
    t = time.perf_counter()
    lo, hi = trivial_mode_roots(0.9, 1.0, 0.8), trivial_mode_roots(0.9, 1.0, 4.0)
    complex_lo = all(abs(z.imag) > 0 for z in lo.roots)
    real_hi = all(z.imag == 0 for z in hi.roots)
    # independent collision location: discriminant of 4 a nu^2 + c nu + mu0 = 0
    c_coll = brentq(lambda c: c * c - 16 * 0.9 * 1.0, 1.0, 10.0, xtol=1e-14)
    elapsed = time.perf_counter() - t
    ok = (complex_lo and real_hi and abs(lo.c_crit - 3.795) <= 1e-3 and abs(lo.c_crit - c_coll) < 1e-12
          and elapsed < 1.0)
    assert report(9, ok, f"complex@0.8={complex_lo} real@4={real_hi} c_crit={lo.c_crit:.6f}", elapsed)


@pytest.mark.slow
@pytest.mark.parametrize("name,c_pred,below", [("theta0", 1.2, True), ("theta30", 1.0392, False)])
def test_criterion_10_pde_front_speed(report, name, c_pred, below):
    t = time.perf_counter()
    rep = run_experiment(preset(name))
    elapsed = time.perf_counter() - t
    rel = abs(rep.fitted_speed - c_pred) / c_pred
    ok = rel <= 0.12 and abs(rep.c_pred - c_pred) < 1e-3 and elapsed <= 600
    if below:
        ok = ok and rep.fitted_speed < rep.c_pred
    assert report(10, ok, f"{name}: fitted={rep.fitted_speed:.4f} c_pred={rep.c_pred:.4f} rel_err={rel:.3f}",
                  elapsed)


@pytest.mark.slow
def test_criterion_11_slow_manifold_convergence(report):
    t = time.perf_counter()
    res = slow_subsystem_check(ModelParams(1.0, 2.0, 1.0, -3.0, -6.0))
    elapsed = time.perf_counter() - t
    ok = res.monotone and elapsed < 120
    devs = " ".join(f"delta={d:.3g}:{v:.3e}" for d, v in zip(res.deltas, res.deviations))
    assert report(11, ok, devs, elapsed)
