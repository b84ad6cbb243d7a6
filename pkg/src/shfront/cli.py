"""Command-line entry point.

Every subcommand reads its parameters from (lowest to highest priority)
built-in defaults, a ``--preset``, a ``--config`` key = value file and explicit
flags, writes its data files into ``--out`` and records a JSON manifest of
the resolved parameters next to them.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import __version__
from .amplitude import ModelParams
from .connect import ShootConfig, ShootingFailure, shoot_branches
from .equilibria import (MarginalSpectrum, catalogue, energy_ranking, equilibria_csv, find, mixed_label,
                         trivial_mode_roots)
from .frontspeed import speed_table, write_speed_csv
from .lattice import LatticeError, lattice_csv, make_direction, parse_angle
from .pattern import Grid, sample_equilibrium_pattern, sample_interface, write_field_csv, write_field_pgm
from .spectrum import AmbiguousClassification, DispersionContext, gap_report, spectrum_csv
from . import pde as pdemod


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class Opt:
    type: Callable[[str], Any]
    default: Any
    help: str


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in str(text).replace(";", ",").split(",") if v.strip())


def _bool(text: str) -> bool:
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


MODEL = {
    "lattice": Opt(str, "hex", "hex or square"),
    "angle": Opt(str, "0", "exact direction: 0, pi/6, or cot=p/q"),
    "mu0": Opt(float, 1.0, "scaled distance to onset"),
    "c0": Opt(float, 2.0, "scaled front speed"),
    "beta2": Opt(float, 1.0, "quadratic coefficient"),
    "K0": Opt(float, -3.0, "self-coupling cubic coefficient"),
    "K2": Opt(float, -6.0, "hexagonal cross-coupling"),
    "K1": Opt(float, -6.0, "square cross-coupling"),
}

OPTIONS: dict[str, dict[str, Opt]] = {
    "spectrum": {**MODEL, "eps": Opt(float, 0.01, "small parameter"), "radius": Opt(float, 6.0, "lattice radius")},
    "gap": {**MODEL, "eps": Opt(float, 0.01, "small parameter"), "radius": Opt(float, 6.0, "lattice radius")},
    "equilibria": {**MODEL, "mu_min": Opt(float, 0.05, "first mu0 of the sweep"),
                   "mu_max": Opt(float, 5.0, "last mu0 of the sweep"),
                   "mu_steps": Opt(int, 100, "number of mu0 values")},
    "bifurcation": {**MODEL, "axial_sq": Opt(float, math.nan, "override (d.k1)^2 for the trivial-state tails"),
                    "speeds": Opt(_floats, (), "comma-separated c0 values for the trivial-state tails")},
    "shoot": {**MODEL, "source": Opt(str, "hex_down", "source branch"),
              "target": Opt(str, "trivial", "target branch"),
              "seeds": Opt(int, 48, "number of unstable-sphere seeds"),
              "eps_shoot": Opt(float, 1e-4, "initial offset from the source")},
    "frontspeed": {"mu0": Opt(float, 1.0, "scaled distance to onset"), "eps": Opt(float, 0.3, "small parameter"),
                   "kperp_max": Opt(float, 0.95, "largest |k_perp| in the table"),
                   "kperp_steps": Opt(int, 39, "table rows")},
    "pattern": {**MODEL, "eps": Opt(float, 0.3, "small parameter"),
                "branch": Opt(str, "hex_down", "equilibrium branch, or source for --interface"),
                "interface": Opt(_bool, False, "sample the front connecting branch to target"),
                "target": Opt(str, "trivial", "target branch for --interface"),
                "t": Opt(float, 0.0, "time for --interface"),
                "nx": Opt(int, 256, "grid points in x"), "ny": Opt(int, 64, "grid points in y"),
                "Lx": Opt(float, 8 * math.pi, "extent in x"), "Ly": Opt(float, 8 * math.pi / math.sqrt(3), "extent in y"),
                "x0": Opt(float, 0.0, "left edge"), "y0": Opt(float, 0.0, "bottom edge"),
                "amplify": Opt(float, 1.0, "multiply the field for display")},
}

PDE_TYPES = {
    "nx": int, "ny": int, "angle": str, "boundary": str, "strip_norm": str,
    "t0": float, "t1": float, "field_times": _floats,
}
OPTIONS["pde"] = {
    k: Opt(PDE_TYPES.get(k, float), None, f"PdeConfig.{k}") for k in pdemod.CONFIG_KEYS
}

PRESETS: dict[str, dict[str, dict]] = {
    "shoot": {
        "hex-front": dict(mu0=1.0, c0=2.0, beta2=1.0, K0=-3.0, K2=-6.0, angle="0"),
        "hex-front-oblique": dict(mu0=1.0, c0=2.0, beta2=1.0, K0=-3.0, K2=-6.0, angle="pi/6"),
        "rolls-front": dict(mu0=5.0, c0=2.0, beta2=1.0, K0=-1.2, K2=-0.6, angle="0", source="rolls"),
        "square-front": dict(lattice="square", mu0=1.0, c0=2.0, beta2=0.0, K0=-3.0, K1=-6.0, angle="cot=2",
                             source="squares"),
    },
    "equilibria": {
        "hex-dominant": dict(K0=-0.3, K2=-0.6),
        "roll-crossing": dict(K0=-1.2, K2=-0.6),
    },
    "bifurcation": {
        "hex-dominant": dict(K0=-0.3, K2=-0.6),
        "roll-crossing": dict(K0=-1.2, K2=-0.6),
        "criticality": dict(mu0=1.0, axial_sq=0.9, speeds=(0.8, 3.795, 4.0)),
    },
    "pde": {name: {} for name in pdemod.PRESETS},
}
PRESETS["pattern"] = PRESETS["shoot"]


def read_config(path: str, allowed: dict[str, Opt]) -> dict[str, Any]:
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in allowed:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            out[key] = allowed[key].type(value)
        except ValueError as exc:
            raise UsageError(f"{path}:{lineno}: bad value for {key!r}: {exc}") from None
    return out


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="shfront", description="Fronts of hexagonal and square patterns.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, opts in OPTIONS.items():
        presets = sorted(PRESETS.get(name, {}))
        sp = sub.add_parser(name, help=COMMANDS[name].__doc__.splitlines()[0],
                            argument_default=argparse.SUPPRESS)
        sp.add_argument("--config", help="key = value file; keys are the long option names")
        sp.add_argument("--out", default=".", help="output directory")
        if presets:
            sp.add_argument("--preset", choices=presets, help="named parameter set")
        for key, opt in opts.items():
            flag = "--" + key.replace("_", "-")
            default = "" if opt.default is None else f" (default {opt.default})"
            sp.add_argument(flag, dest=key, type=opt.type, help=opt.help + default)
    return ap


def resolve(command: str, ns: argparse.Namespace) -> dict[str, Any]:
    opts = OPTIONS[command]
    params = {k: o.default for k, o in opts.items() if o.default is not None}
    name = getattr(ns, "preset", None)
    if name:
        params.update(PRESETS[command][name])
    if getattr(ns, "config", None):
        params.update(read_config(ns.config, opts))
    params.update({k: v for k, v in vars(ns).items() if k in opts})
    return params


def _model(p: dict) -> ModelParams:
    return ModelParams(p["mu0"], p["c0"], p["beta2"], p["K0"], p["K2"], p["K1"], p["lattice"])


def _direction(p: dict):
    return make_direction(p["lattice"], parse_angle(p["angle"], p["lattice"]))


def _write(out: Path, name: str, text: str) -> Path:
    path = out / name
    path.write_text(text)
    return path


# ------------------------------------------------------------------ subcommands

def cmd_spectrum(p, out):
    """Spatial eigenvalues of every lattice mode in a disc."""
    rep = gap_report(_direction(p), DispersionContext(p["mu0"], p["c0"], p["eps"], _direction(p)), p["radius"])
    return [_write(out, "spectrum.csv", spectrum_csv(rep))], f"modes={len(rep.modes)}"


def cmd_gap(p, out):
    """Count more-central, less-central and hyperbolic eigenvalues."""
    d = _direction(p)
    rep = gap_report(d, DispersionContext(p["mu0"], p["c0"], p["eps"], d), p["radius"])
    paths = [_write(out, "lattice.csv", lattice_csv(p["lattice"], p["radius"], d)),
             _write(out, "spectrum.csv", spectrum_csv(rep))]
    summary = (f"n_mc={rep.n_more_central} n_lc={rep.n_less_central} n_hyp={rep.n_hyperbolic} "
               f"gap={rep.min_hyperbolic_gap:.6g}")
    return paths, summary


def cmd_equilibria(p, out):
    """Bifurcation table of the amplitude equilibria over a mu0 sweep."""
    mus = np.linspace(p["mu_min"], p["mu_max"], p["mu_steps"])
    text = equilibria_csv(_model(p), _direction(p), mus)
    return [_write(out, "equilibria.csv", text)], f"rows={text.count(chr(10)) - 1}"


def cmd_bifurcation(p, out):
    """Energy ordering of the branches and the trivial-state tails."""
    m = _model(p)
    paths = []
    rank = energy_ranking(m)
    lines = ["branch,label,energy"]
    labels = {r.branch: mixed_label(r) or r.branch for r in rank.records}
    for branch, h in rank.order:
        lines.append(f"{branch},{labels[branch]},{h:.17g}")
    paths.append(_write(out, "energies.csv", "\n".join(lines) + "\n"))
    axial_sq = p["axial_sq"]
    if math.isnan(axial_sq):
        axial_sq = _direction(p).proj_sq(1)
    speeds = p["speeds"] or (m.c0,)
    rows = ["c0,axial_sq,re1,im1,re2,im2,oscillatory,c_crit"]
    for c in speeds:
        tail = trivial_mode_roots(axial_sq, m.mu0, c)
        r1, r2 = (tail.roots + (complex("nan"),))[:2]
        rows.append(f"{c:.17g},{axial_sq:.17g},{r1.real:.17g},{r1.imag:.17g},{r2.real:.17g},{r2.imag:.17g},"
                    f"{int(tail.oscillatory)},{tail.c_crit:.17g}")
    paths.append(_write(out, "tails.csv", "\n".join(rows) + "\n"))
    mu1 = "none" if rank.mu1 is None else f"{rank.mu1:.12g}"
    return paths, f"lowest={rank.lowest_nontrivial} mu1={mu1}"


def _shoot(p):
    cfg = ShootConfig(eps_shoot=p["eps_shoot"], n_seeds=p["seeds"])
    return shoot_branches(_model(p), _direction(p), p["source"], p["target"], cfg)


def cmd_shoot(p, out):
    """Heteroclinic orbit between two equilibria by shooting."""
    tr = _shoot(p)
    summary = (f"status={tr.status} seed={tr.seed_index} distance={tr.final_distance:.3g} "
               f"residual={tr.endpoint_residual:.3g} persistence={tr.persistence}")
    return [_write(out, "orbit.csv", tr.to_csv())], summary


def cmd_frontspeed(p, out):
    """Linear spreading speed against transverse wavenumber."""
    n = p["kperp_steps"]
    ks = np.linspace(-p["kperp_max"], p["kperp_max"], n) if n > 1 else np.array([0.0])
    rows = speed_table(ks, p["mu0"], p["eps"])
    path = out / "frontspeed.csv"
    with path.open("w") as fh:
        write_speed_csv(rows, fh)
    best = max(rows, key=lambda r: r[1])
    return [path], f"max_c_exact={best[1]:.6g} at kperp={best[0]:.3g}"


def cmd_pattern(p, out):
    """Leading-order physical field of an equilibrium or a front."""
    m = _model(p)
    grid = Grid(p["nx"], p["ny"], p["Lx"], p["Ly"], p["x0"], p["y0"])
    if p["interface"]:
        q = dict(p, source=p["branch"], seeds=48, eps_shoot=1e-4)
        tr = _shoot(q)
        field = sample_interface(tr, p["eps"], m.c0, _direction(p), p["t"], grid)
    else:
        rec = find(catalogue(m), p["branch"])
        if not rec.exists:
            raise ValueError(f"branch {p['branch']} does not exist at these parameters")
        field = sample_equilibrium_pattern(rec.amplitudes, p["eps"], m.kind, grid)
    field.values = field.values * p["amplify"]
    paths = [out / "field.csv", out / "field.pgm"]
    with paths[0].open("w") as fh:
        write_field_csv(field, fh)
    with paths[1].open("w") as fh:
        write_field_pgm(field, fh)
    return paths, f"min={field.values.min():.6g} max={field.values.max():.6g}"


def cmd_pde(p, out):
    """Direct simulation and front-speed measurement."""
    name = p.pop("_preset", None)
    base = pdemod.preset(name) if name else pdemod.PdeConfig()
    cfg = base.replace(**p)
    rep = pdemod.run_experiment(cfg)
    path = out / "front.csv"
    with path.open("w") as fh:
        rep.write_csv(fh)
    paths = [path]
    for t, fld in sorted(rep.snapshots.items()):
        fp = out / f"field_t{t:g}.pgm"
        with fp.open("w") as fh:
            write_field_pgm(fld, fh)
        paths.append(fp)
    summary = f"fitted={rep.fitted_speed:.6g} c_pred={rep.c_pred:.6g} rel_err={rep.relative_error:.4g}"
    return paths, summary


COMMANDS = {
    "spectrum": cmd_spectrum, "gap": cmd_gap, "equilibria": cmd_equilibria, "bifurcation": cmd_bifurcation,
    "shoot": cmd_shoot, "frontspeed": cmd_frontspeed, "pattern": cmd_pattern, "pde": cmd_pde,
}

DOMAIN_ERRORS = (ValueError, KeyError, ShootingFailure, MarginalSpectrum, LatticeError,
                 AmbiguousClassification, pdemod.BlowUp, pdemod.NoFront)


def _jsonable(v):
    if isinstance(v, tuple):
        return list(v)
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    return v


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    command = ns.command
    out = Path(getattr(ns, "out", "."))
    start = time.perf_counter()
    try:
        params = resolve(command, ns)
        if command == "pde":
            # PdeConfig owns its own defaults; the preset is applied there
            params = {k: v for k, v in params.items() if v is not None}
            if getattr(ns, "preset", None):
                params["_preset"] = ns.preset
    except UsageError as exc:
        print(f"shfront {command}: {exc}", file=sys.stderr)
        return 2
    out.mkdir(parents=True, exist_ok=True)
    recorded = {k: _jsonable(v) for k, v in params.items()}
    try:
        paths, summary = COMMANDS[command](params, out)
    except DOMAIN_ERRORS as exc:
        msg = exc.report() if isinstance(exc, ShootingFailure) else str(exc)
        print(f"shfront {command}: {msg}", file=sys.stderr)
        return 1
    manifest = {
        "subcommand": command,
        "preset": getattr(ns, "preset", None),
        "parameters": recorded,
        "outputs": [str(p) for p in paths],
        "version": __version__,
        "wall_time": time.perf_counter() - start,
    }
    (out / f"{command}.manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    print(summary)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
