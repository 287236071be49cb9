"""Scenario-driven command line interface.

Scenarios are flat INI files (key = value sections, '#' comments) with a
versioned ``schema`` field.  Every run writes one or more CSV files plus a
metadata text file recording the schema version, all physical parameters,
and the conventions in force (static past t0, Moore normalization,
tolerances).  Outputs are deterministic: the same config always produces
byte-identical CSV bodies.

Exit codes: 0 success, 2 configuration error, 3 numeric failure,
4 I/O failure.

Config reference (all lengths in units of L, all rates in c = 1 units):

    [scenario]
    schema = 1
    name = my-run              # output file stem
    analysis = trace           # billiard-table | trace | resonance |
                               # classical-energy | quantum-energy |
                               # density-map | twowall-modes
    output_dir = out

    [wall]                     # single-wall sections
    kind = sinusoidal          # static | sinusoidal
    L = 1.0
    dL = 0.01                  # or: dL_over_L = 0.01
    omega = 6.2832             # or: omega_over_omegaN = 1.0 with N below
    phase = 0.0
    t0 = 0.0

    [cavity2]                  # two-wall scenarios (analysis = twowall-modes)
    L = 1.0
    mode = harmonic            # breathing | translational | harmonic
    dL1 = 0.01
    dL2 = 0.01
    omegaR = 6.2832
    omegaL = 6.2832
    delta = 0.0

    [seed]                     # classical density seed
    kind = gaussian            # gaussian | uniform | mode
    center = 0.25
    width = 0.08
    amplitude = 1.0
    k = 1

    [resonance]
    N = 2
    scan_min = -0.02           # d omega / omega grid for --scan-domega
    scan_max = 0.02
    scan_steps = 41

    [numeric]
    root_tol = 1e-12
    quad_tol = 1e-9
    n_max = 100
    n_probe = 64
    t_max = 40.0
    nx = 400
    nt = 81
    tau = 0.0
    n_trace = 100
    tau_min = 0.0
    tau_max = 10.0
    n_tau = 101
"""

from __future__ import annotations

import argparse
import configparser
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .billiard import BilliardMap
from .classical_energy import (
    ProfileFunction,
    density_field,
    energy_at_bounces,
    fit_log_slope,
    gaussian_seed,
    mode_seed,
    uniform_seed,
)
from .errors import CavopticsError, ConfigError, ConstraintViolation, NumericError
from .quantum import MooreFunction, quantum_energy_at_bounces
from .resonance import (
    analyze_resonance,
    principal_starting_points,
    resonance_window,
    window_scan,
)
from .trajectory import Sinusoidal, Static, WallTrajectory
from .twowall import TwoWallCavity, two_wall_exponents

SCHEMA_VERSION = 1

ANALYSES = (
    "billiard-table",
    "trace",
    "resonance",
    "classical-energy",
    "quantum-energy",
    "density-map",
    "twowall-modes",
)


def _fmt(x) -> str:
    """17 significant digits: round-trips doubles exactly."""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    return f"{float(x):.17g}"


@dataclass
class Scenario:
    name: str
    analysis: str
    output_dir: Path
    wall: dict = field(default_factory=dict)
    cavity2: dict = field(default_factory=dict)
    seed: dict = field(default_factory=dict)
    resonance: dict = field(default_factory=dict)
    numeric: dict = field(default_factory=dict)

    def num(self, key: str, default):
        v = self.numeric.get(key, default)
        return type(default)(v) if default is not None else v


def parse_config(path: str | Path) -> Scenario:
    """Parse and validate a scenario file; raises ConfigError with the
    offending section/field named."""
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",))
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file not found: {p}")
    try:
        with open(p) as fh:
            cp.read_file(fh)
    except (configparser.Error, OSError) as exc:
        raise ConfigError(f"cannot parse {p}: {exc}") from exc
    if "scenario" not in cp:
        raise ConfigError("missing [scenario] section")
    sc = cp["scenario"]
    schema = sc.get("schema")
    if schema is None or int(schema) != SCHEMA_VERSION:
        raise ConfigError(f"[scenario] schema must be {SCHEMA_VERSION}, got {schema!r}")
    analysis = sc.get("analysis", "")
    if analysis not in ANALYSES:
        raise ConfigError(
            f"[scenario] analysis must be one of {', '.join(ANALYSES)}; got {analysis!r}"
        )
    name = sc.get("name")
    if not name:
        raise ConfigError("[scenario] name is required")

    def section(s: str) -> dict:
        return dict(cp[s]) if s in cp else {}

    return Scenario(
        name=name,
        analysis=analysis,
        output_dir=Path(sc.get("output_dir", "out")),
        wall=section("wall"),
        cavity2=section("cavity2"),
        seed=section("seed"),
        resonance=section("resonance"),
        numeric=section("numeric"),
    )


def build_wall(scn: Scenario) -> WallTrajectory:
    w = scn.wall
    kind = w.get("kind", "static").lower()
    try:
        L = float(w.get("l", 1.0))
        if kind == "static":
            return Static(L)
        if kind == "sinusoidal":
            if "dl_over_l" in w:
                dL = float(w["dl_over_l"]) * L
            else:
                dL = float(w.get("dl", 0.0))
            if "omega" in w:
                omega = float(w["omega"])
            elif "omega_over_omegan" in w:
                N = int(scn.resonance.get("n", 1))
                omega = float(w["omega_over_omegan"]) * N * math.pi / L
            else:
                raise ConfigError("[wall] needs omega or omega_over_omegaN")
            return Sinusoidal(
                L, dL, omega,
                phase=float(w.get("phase", 0.0)),
                motion_start=float(w.get("t0", 0.0)),
            )
        raise ConfigError(f"[wall] unknown kind {kind!r}")
    except ConstraintViolation as exc:
        raise ConfigError(f"[wall] invalid parameters: {exc}") from exc
    except ValueError as exc:
        raise ConfigError(f"[wall] bad value: {exc}") from exc


def build_cavity(scn: Scenario) -> TwoWallCavity:
    c = scn.cavity2
    try:
        L = float(c.get("l", 1.0))
        mode = c.get("mode", "harmonic").lower()
        if mode == "breathing":
            return TwoWallCavity.breathing(L, float(c.get("dl1", 0.0)), float(c["omegar"]))
        if mode == "translational":
            return TwoWallCavity.translational(L, float(c.get("dl1", 0.0)), float(c["omegar"]))
        if mode == "harmonic":
            return TwoWallCavity.harmonic(
                L,
                float(c.get("dl1", 0.0)),
                float(c.get("dl2", 0.0)),
                float(c["omegar"]),
                float(c.get("omegal", c["omegar"])),
                float(c.get("delta", 0.0)),
            )
        raise ConfigError(f"[cavity2] unknown mode {mode!r}")
    except KeyError as exc:
        raise ConfigError(f"[cavity2] missing field: {exc}") from exc
    except ConstraintViolation as exc:
        raise ConfigError(f"[cavity2] invalid parameters: {exc}") from exc
    except ValueError as exc:
        raise ConfigError(f"[cavity2] bad value: {exc}") from exc


def build_seed(scn: Scenario, L: float) -> ProfileFunction:
    s = scn.seed
    kind = s.get("kind", "uniform").lower()
    try:
        if kind == "gaussian":
            return gaussian_seed(
                L,
                center=float(s.get("center", 0.0)),
                width=float(s.get("width", 0.1)),
                amplitude=float(s.get("amplitude", 1.0)),
            )
        if kind == "uniform":
            return uniform_seed(L, float(s.get("amplitude", 1.0)))
        if kind == "mode":
            return mode_seed(L, int(s.get("k", 1)))
        raise ConfigError(f"[seed] unknown kind {kind!r}")
    except ConstraintViolation as exc:
        raise ConfigError(f"[seed] invalid parameters: {exc}") from exc


# -- CSV/metadata writers ----------------------------------------------------


def write_csv(
    path: Path,
    header: Sequence[str],
    rows,
    meta: dict | None = None,
) -> None:
    """CSV with '#'-prefixed metadata lines; 17 significant digits."""
    path.parent.mkdir(parents=True, exist_ok=True)
    try:
        with open(path, "w", newline="\n") as fh:
            for key in sorted(meta or {}):
                fh.write(f"# {key} = {_fmt((meta or {})[key])}\n")
            fh.write(",".join(header) + "\n")
            for row in rows:
                fh.write(",".join(_fmt(v) for v in row) + "\n")
    except OSError as exc:
        raise IOError(f"cannot write {path}: {exc}") from exc


def write_meta(path: Path, scn: Scenario, extra: dict | None = None) -> None:
    entries = {
        "schema": SCHEMA_VERSION,
        "cavoptics_version": __version__,
        "name": scn.name,
        "analysis": scn.analysis,
        "convention.static_past": "L(t) = L for t < t0; derivatives one-sided from the right at t0",
        "convention.moore_normalization": "R(tau) = tau / L on the static branch",
        "convention.units": "c = 1; energies in 1/L, densities in 1/L^2",
    }
    for sect_name, sect in (
        ("wall", scn.wall), ("cavity2", scn.cavity2), ("seed", scn.seed),
        ("resonance", scn.resonance), ("numeric", scn.numeric),
    ):
        for k in sorted(sect):
            entries[f"{sect_name}.{k}"] = sect[k]
    for k in sorted(extra or {}):
        entries[k] = (extra or {})[k]
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        for k in sorted(entries):
            fh.write(f"{k} = {entries[k]}\n")


# -- analysis runners --------------------------------------------------------


def run_billiard_table(scn: Scenario) -> list[Path]:
    wall = build_wall(scn)
    bmap = BilliardMap(wall, root_tolerance=scn.num("root_tol", 1e-12))
    lo = scn.num("tau_min", 0.0)
    hi = scn.num("tau_max", 10.0)
    n = scn.num("n_tau", 101)
    taus = np.linspace(lo, hi, n)
    rows = [
        (tau, bmap.eval_f(tau), bmap.eval_f_inv(tau), bmap.doppler(tau))
        for tau in map(float, taus)
    ]
    out = scn.output_dir / f"{scn.name}_billiard.csv"
    write_csv(out, ["tau", "f", "f_inv", "fdot"], rows,
              meta={"units.tau": "L", "units.f": "L"})
    return [out]


def run_trace(scn: Scenario) -> list[Path]:
    wall = build_wall(scn)
    bmap = BilliardMap(wall, root_tolerance=scn.num("root_tol", 1e-12))
    tau = scn.num("tau", 0.0)
    n = scn.num("n_trace", 100)
    path = bmap.trace(tau, n)
    rows = [
        (k + 1, path.times[k], path.star_times[k], path.log_doppler[k])
        for k in range(len(path))
    ]
    out = scn.output_dir / f"{scn.name}_trace.csv"
    write_csv(out, ["k", "T_k", "T_star_k", "log_D_k"], rows,
              meta={"start_tau": tau, "units.T_k": "L"})
    return [out]


def run_resonance(scn: Scenario, scan_domega: bool = False) -> list[Path]:
    wall = build_wall(scn)
    if not isinstance(wall, Sinusoidal):
        raise ConfigError("resonance analysis needs a sinusoidal wall")
    N = int(scn.resonance.get("n", 1))
    outs = []
    if scan_domega:
        lo = float(scn.resonance.get("scan_min", -0.02))
        hi = float(scn.resonance.get("scan_max", 0.02))
        steps = int(scn.resonance.get("scan_steps", 41))
        ratios = np.linspace(lo, hi, steps)
        flags = window_scan(wall.rest_length, wall.amplitude, N, ratios)
        bound = resonance_window(wall.amplitude, wall.rest_length)
        rows = [(x, int(f), bound) for x, f in zip(map(float, ratios), flags)]
        out = scn.output_dir / f"{scn.name}_window.csv"
        write_csv(out, ["domega_over_omega", "unstable", "bound"], rows,
                  meta={"N": N, "dL_over_L": wall.amplitude / wall.rest_length})
        outs.append(out)
    else:
        report = analyze_resonance(wall, N, n_probe=scn.num("n_probe", 64))
        rows = [
            (t.tau0, t.period, t.sign.value, t.exponent, t.series_index)
            for t in report.trajectories
        ]
        out = scn.output_dir / f"{scn.name}_resonance.csv"
        write_csv(out, ["tau0", "period", "sign", "lambda", "series_index"], rows,
                  meta={
                      "N": N,
                      "window_halfwidth": report.window_halfwidth,
                      "num_series": report.num_series,
                      "peak_count_per_series": report.peak_count_per_series,
                      "degenerate": int(report.degenerate),
                  })
        outs.append(out)
    return outs


def _resonant_force_points(wall: Sinusoidal, N: int) -> list[float]:
    tp, tm = principal_starting_points(N, wall.rest_length)
    return [float(x) for x in tp] + [float(x) for x in tm]


def run_classical_energy(scn: Scenario) -> list[Path]:
    wall = build_wall(scn)
    bmap = BilliardMap(wall, root_tolerance=scn.num("root_tol", 1e-12))
    profile = build_seed(scn, wall.rest_length)
    n_max = scn.num("n_max", 100)
    force = []
    analytic = None
    if isinstance(wall, Sinusoidal):
        N = int(scn.resonance.get("n", 0) or round(wall.omega * wall.rest_length / math.pi))
        if N >= 1:
            force = _resonant_force_points(wall, N)
            w_dl = N * math.pi / wall.rest_length * wall.amplitude
            if w_dl < 1.0:
                analytic = math.log((1.0 + w_dl) / (1.0 - w_dl))
    be = energy_at_bounces(
        profile, bmap, n_max, tol=scn.num("quad_tol", 1e-9), force_points=force
    )
    slope = fit_log_slope(be.n, be.log_energy)
    rows = [
        (int(be.n[i]), be.times[i], math.exp(be.log_energy[i]), be.log_energy[i])
        for i in range(len(be.n))
    ]
    meta = {"fitted_slope": slope, "units.E": "1/L", "units.t": "L"}
    if analytic is not None:
        # per-period growth of the cumulative Doppler factor at the peak spots
        meta["analytic_log_D1"] = analytic
        meta["analytic_two_log_D1"] = 2.0 * analytic
    out = scn.output_dir / f"{scn.name}_energy.csv"
    write_csv(out, ["n", "t", "E", "log_E"], rows, meta=meta)
    return [out]


def run_quantum_energy(scn: Scenario) -> list[Path]:
    wall = build_wall(scn)
    bmap = BilliardMap(wall, root_tolerance=scn.num("root_tol", 1e-12))
    mf = MooreFunction(bmap)
    outs = []
    # profile CSV over one late window
    lo = scn.num("tau_min", 0.0)
    hi = scn.num("tau_max", 10.0)
    n = scn.num("n_tau", 201)
    rows = []
    for tau in map(float, np.linspace(lo, hi, n)):
        r, d1, d2, d3 = mf.jet(tau)
        s = d3 / d1 - 1.5 * (d2 / d1) ** 2
        rho = -math.pi / 48.0 * d1 * d1 - s / (24.0 * math.pi)
        rows.append((tau, r, d1, s, rho))
    out1 = scn.output_dir / f"{scn.name}_quantum_profile.csv"
    write_csv(out1, ["tau", "R", "Rdot", "S_R", "rho_q"], rows,
              meta={"units.rho_q": "1/L^2"})
    outs.append(out1)

    force = []
    if isinstance(wall, Sinusoidal):
        N = int(scn.resonance.get("n", 0) or round(wall.omega * wall.rest_length / math.pi))
        if N >= 1:
            force = _resonant_force_points(wall, N)
    n_idx, times, energies = quantum_energy_at_bounces(
        bmap, scn.num("n_max", 50), tol=scn.num("quad_tol", 1e-9), force_points=force
    )
    rows = [(int(n_idx[i]), times[i], energies[i]) for i in range(len(n_idx))]
    out2 = scn.output_dir / f"{scn.name}_quantum_energy.csv"
    write_csv(out2, ["n", "t", "E_q"], rows, meta={"units.E_q": "1/L"})
    outs.append(out2)
    return outs


def run_density_map(scn: Scenario) -> list[Path]:
    wall = build_wall(scn)
    bmap = BilliardMap(wall, root_tolerance=scn.num("root_tol", 1e-12))
    profile = build_seed(scn, wall.rest_length)
    t_max = scn.num("t_max", 40.0)
    nx = scn.num("nx", 400)
    nt = scn.num("nt", 81)
    rows = []
    for t in map(float, np.linspace(0.0, t_max, nt)):
        L_t = wall.position(t)
        for x in map(float, np.linspace(0.0, L_t, nx)):
            rho = density_field(profile, bmap, t, [x])[0]
            rows.append((t, x, rho))
    out = scn.output_dir / f"{scn.name}_density.csv"
    write_csv(out, ["t", "x", "T00"], rows, meta={"units.T00": "1/L^2"})
    return [out]


def run_twowall(scn: Scenario) -> list[Path]:
    cavity = build_cavity(scn)
    N = int(scn.resonance.get("n", 1))
    rows = []
    for side in ("L", "R"):
        try:
            exps = two_wall_exponents(cavity, N, side=side,
                                      n_probe=scn.num("n_probe", 64))
        except ConstraintViolation as exc:
            raise ConfigError(str(exc)) from exc
        for e in exps:
            rows.append((side, e.t1, e.tau0, e.exact, e.small_amplitude,
                         e.traced, e.sign.value))
    out = scn.output_dir / f"{scn.name}_twowall.csv"
    write_csv(
        out,
        ["side", "t1", "tau0", "lambda_exact", "lambda_small_amp", "lambda_traced", "sign"],
        rows,
        meta={"N": N},
    )
    return [out]


_RUNNERS = {
    "billiard-table": run_billiard_table,
    "trace": run_trace,
    "resonance": run_resonance,
    "classical-energy": run_classical_energy,
    "quantum-energy": run_quantum_energy,
    "density-map": run_density_map,
    "twowall-modes": run_twowall,
}


def run(config_path: str | Path, overrides: dict | None = None,
        scan_domega: bool = False) -> list[Path]:
    """Execute the scenario; returns the list of files written."""
    scn = parse_config(config_path)
    for key, value in (overrides or {}).items():
        if value is not None:
            scn.numeric[key] = str(value)
    if "output_dir" in (overrides or {}) and overrides["output_dir"]:
        scn.output_dir = Path(overrides["output_dir"])
    if scn.analysis == "resonance":
        outputs = run_resonance(scn, scan_domega=scan_domega)
    else:
        outputs = _RUNNERS[scn.analysis](scn)
    write_meta(
        scn.output_dir / f"{scn.name}_meta.txt", scn,
        extra={"outputs": ";".join(p.name for p in outputs)},
    )
    return outputs


def main(argv: Sequence[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="cavoptics",
        description="Optical-path simulations of 1D cavities with moving walls",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", required=True, help="scenario file")
        p.add_argument("--output-dir", default=None)

    p = sub.add_parser("billiard-table", help="tabulate f, f^-1, f' on a grid")
    add_common(p)
    p.add_argument("--tau-min", type=float, default=None)
    p.add_argument("--tau-max", type=float, default=None)
    p.add_argument("--n-tau", type=int, default=None)

    p = sub.add_parser("trace", help="dump one ray path")
    add_common(p)
    p.add_argument("--tau", type=float, default=None)
    p.add_argument("--n", type=int, default=None, dest="n_trace")

    p = sub.add_parser("resonance", help="periodic-orbit census or window scan")
    add_common(p)
    p.add_argument("--scan-domega", action="store_true")

    p = sub.add_parser("energy", help="classical energy at bounce times")
    add_common(p)
    p.add_argument("--n-max", type=int, default=None)

    p = sub.add_parser("quantum", help="vacuum density profile and energy")
    add_common(p)
    p.add_argument("--n-max", type=int, default=None)

    p = sub.add_parser("density-map", help="T00(t, x) grid")
    add_common(p)
    p.add_argument("--t-max", type=float, default=None)
    p.add_argument("--nx", type=int, default=None)
    p.add_argument("--nt", type=int, default=None)

    p = sub.add_parser("twowall", help="two-wall mode exponents")
    add_common(p)

    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0

    cmd_analysis = {
        "billiard-table": "billiard-table",
        "trace": "trace",
        "resonance": "resonance",
        "energy": "classical-energy",
        "quantum": "quantum-energy",
        "density-map": "density-map",
        "twowall": "twowall-modes",
    }

    overrides = {
        k: v for k, v in vars(args).items()
        if k not in ("command", "config", "output_dir") and v is not None
        and k != "scan_domega"
    }
    overrides = {k: v for k, v in overrides.items()}
    if args.output_dir:
        overrides["output_dir"] = args.output_dir

    try:
        scn = parse_config(args.config)
        expected = cmd_analysis[args.command]
        if scn.analysis != expected:
            raise ConfigError(
                f"config analysis is {scn.analysis!r} but subcommand expects {expected!r}"
            )
        outputs = run(
            args.config, overrides,
            scan_domega=bool(getattr(args, "scan_domega", False)),
        )
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"numeric failure: {exc} {exc.diagnostics}", file=sys.stderr)
        return 3
    except (IOError, OSError) as exc:
        print(f"i/o failure: {exc}", file=sys.stderr)
        return 4
    except CavopticsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for out in outputs:
        print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
