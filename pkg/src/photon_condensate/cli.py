"""Command-line front end.

    photon-condensate <command> [--config FILE] [--key value]... [--jobs N] [--out DIR]

Commands: bec-curve, laser-curve, compare, cavity, gpe, ks-fit. Parameters
come from a flat ``key = value`` file, then from ``--key value`` overrides;
unknown keys are rejected. Every run writes ``manifest.txt`` into the output
directory, echoing the resolved parameters (reusable as ``--config``) plus
``result.*`` lines. Exit status is 0 on success, 2 if some sweep points
failed, 1 on a hard failure.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from importlib import resources

import numpy as np

from . import bose, cavity, comparison, gpe, microlaser, spectro
from ._accel import backend_name
from .errors import PhotonCondensateError
from .io import ensure_dir, fmt, read_key_values, write_columns, write_csv, write_key_values
from .svg import PALETTE, Plot

ENV_OUT = "PHOTON_CONDENSATE_OUT"
MANIFEST = "manifest.txt"
BUNDLED_SPECTRUM = "bundled"

EXIT_OK, EXIT_HARD, EXIT_PARTIAL = 0, 1, 2


class ConfigError(PhotonCondensateError, ValueError):
    """Bad command line or configuration file."""


# ---------------------------------------------------------------- parameters

def _float_list(text):
    vals = [float(v) for v in str(text).split(",") if v.strip()]
    if not vals:
        raise ValueError("empty list")
    if len(set(vals)) != len(vals):
        raise ValueError("duplicate entries")
    return vals


def _bool(text):
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _optional_float(text):
    t = str(text).strip().lower()
    return None if t in ("", "none") else float(t)


def _choice(*options):
    def parse(text):
        t = str(text).strip()
        if t not in options:
            raise ValueError(f"expected one of {', '.join(options)}")
        return t
    return parse


def _show(value):
    if value is None:
        return "none"
    if isinstance(value, (list, tuple)):
        return ",".join(fmt(float(v)) for v in value)
    return fmt(value)


_FORMAT = ("format", _choice("csv", "svg", "both"), "both")

# command -> ordered (key, parser, default)
SCHEMAS = {
    "bec-curve": [
        ("x", _float_list, "0.05,0.2,1,5"),
        ("n_min", float, 1e-2),
        ("n_max", float, 1e4),
        ("n_points", int, 200),
        _FORMAT,
    ],
    "laser-curve": [
        ("beta", _float_list, "1e-5,1e-3,0.1,1"),
        ("rho_min", float, 1e-2),
        ("rho_max", float, 1e8),
        ("n_points", int, 400),
        _FORMAT,
    ],
    "compare": [
        ("beta", _float_list, "0.1,0.5,0.9,1"),
        ("control_min", float, 1e-2),
        ("control_max", float, 1e2),
        ("n_points", int, 200),
        _FORMAT,
    ],
    "cavity": [
        ("q", int, 8),
        ("n", float, cavity.DEFAULT_REFRACTIVE_INDEX),
        ("lambda0_nm", _optional_float, 580.0),
        ("L0_um", _optional_float, None),
        ("R_m", _optional_float, 0.5),
        ("T_K", float, 300.0),
        ("format", _choice("csv"), "csv"),
    ],
    "gpe": [
        ("nx", int, 64),
        ("box", float, 16.0),
        ("trap_omega", float, 1.0),
        ("g", float, 0.0),
        ("gamma_net", float, 0.0),
        ("gamma_sat", float, 0.0),
        ("absorb_width", int, 0),
        ("absorb_rate", float, 0.0),
        ("init", _choice("gaussian", "ground", "uniform"), "gaussian"),
        ("width", float, 1.0),
        ("norm", float, 1.0),
        ("offset_x", float, 0.0),
        ("offset_y", float, 0.0),
        ("kick_x", float, 0.0),
        ("dt", _optional_float, 0.01),
        ("steps", int, 1000),
        ("sample_every", int, 10),
        ("snapshot_every", int, 0),
        _FORMAT,
    ],
    "ks-fit": [
        ("input", str, BUNDLED_SPECTRUM),
        ("floor", float, spectro.DEFAULT_FLOOR),
        ("dos_correction", _bool, False),
        ("min_r_squared", float, spectro.MIN_R_SQUARED),
        _FORMAT,
    ],
}


def resolve(command, file_values=None, overrides=None):
    """Merge defaults, file values and overrides into a typed dict.

    Raises ``ConfigError`` for unknown keys or unparsable values.
    """
    schema = SCHEMAS[command]
    known = {k: (parse, default) for k, parse, default in schema}
    raw = {}
    for source in (file_values or {}, overrides or {}):
        for key, value in source.items():
            if key not in known:
                raise ConfigError(f"unknown key {key!r} for {command} "
                                  f"(known: {', '.join(known)})")
            raw[key] = value
    out = {}
    for key, parse, default in schema:
        value = raw.get(key, default)
        if isinstance(value, str) or key in raw:
            try:
                value = parse(value)
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"bad value for {key!r}: {value!r} ({exc})") from None
        out[key] = value
    out["_explicit"] = frozenset(raw)
    return out


def _load_config(path, command):
    try:
        values = read_key_values(path)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    # a previous manifest is a valid config: drop its bookkeeping lines
    cmd = values.pop("command", command)
    if cmd != command:
        raise ConfigError(f"config {path} is for {cmd!r}, not {command!r}")
    return {k: v for k, v in values.items() if not k.startswith("result.")}


def _split_overrides(tokens):
    out = {}
    it = iter(tokens)
    for tok in it:
        if not tok.startswith("--") or len(tok) < 3:
            raise ConfigError(f"expected --key value, got {tok!r}")
        key = tok[2:]
        if "=" in key:
            key, value = key.split("=", 1)
        else:
            try:
                value = next(it)
            except StopIteration:
                raise ConfigError(f"missing value for {tok}") from None
        out[key.replace("-", "_")] = value
    return out


def _grid(lo, hi, n, what):
    if not (0 < lo < hi) or n < 2:
        raise ConfigError(f"{what} grid needs 0 < min < max and at least 2 points")
    return np.logspace(math.log10(lo), math.log10(hi), n)


def _tag(value):
    return f"{value:g}"


# ------------------------------------------------------------------- workers

def _map(func, items, jobs):
    """Ordered map over a process pool; results are collected in the caller."""
    if jobs <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ProcessPoolExecutor(max_workers=min(jobs, len(items))) as pool:
        return list(pool.map(func, items))


def _bec_task(args):
    x, grid = args
    spec = bose.TrapSpectrum(x)
    n_ground = np.full(grid.size, np.nan)
    mu = np.full(grid.size, np.nan)
    failures = []
    for k, n in enumerate(grid):
        try:
            state = bose.solve_mu(spec, float(n))
        except PhotonCondensateError as exc:
            failures.append(f"x={x:g} n_total={n:g}: {exc}")
            continue
        n_ground[k], mu[k] = state.n_ground, state.mu
    return n_ground, mu, failures


def _laser_task(args):
    beta, grid = args
    rho, photons = microlaser.threshold_curve(beta, grid)
    return photons


def _compare_task(args):
    beta, grid = args
    return comparison.comparison_curves(beta, grid)


# ------------------------------------------------------------------ commands

def _wants(cfg, kind):
    return cfg["format"] in (kind, "both")


def cmd_bec_curve(cfg, out, jobs):
    grid = _grid(cfg["n_min"], cfg["n_max"], cfg["n_points"], "n_total")
    xs = cfg["x"]
    if any(not x > 0 for x in xs):
        raise ConfigError("every x must be > 0")
    results = _map(_bec_task, [(x, grid) for x in xs], jobs)
    plot = Plot(title="Ground-state population in a 2D harmonic trap",
                xlabel="n_total", ylabel="n_ground", xlog=True, ylog=True)
    failures, n_crit = [], []
    for x, (n_ground, mu, fails) in zip(xs, results):
        failures.extend(fails)
        if _wants(cfg, "csv"):
            write_columns(os.path.join(out, f"bec_x_{_tag(x)}.csv"),
                          {"n_total": grid, "n_ground": n_ground, "mu": mu})
        nc = bose.critical_number(x)
        n_crit.append(nc)
        plot.add(grid, n_ground, f"x = {_tag(x)}")
        ok = np.isfinite(n_ground)
        if grid[0] <= nc <= grid[-1] and ok.sum() >= 2:
            y = math.exp(np.interp(math.log(nc), np.log(grid[ok]), np.log(n_ground[ok])))
            plot.mark(nc, y, f"N_C = {nc:.3g}")
    if _wants(cfg, "svg"):
        plot.save(os.path.join(out, "bec_curves.svg"))
    return [("result.N_critical", n_crit)], failures


def cmd_laser_curve(cfg, out, jobs):
    grid = _grid(cfg["rho_min"], cfg["rho_max"], cfg["n_points"], "rho")
    betas = cfg["beta"]
    if any(not 0 < b <= 1 for b in betas):
        raise ConfigError("every beta must lie in (0, 1]")
    results = _map(_laser_task, [(b, grid) for b in betas], jobs)
    plot = Plot(title="Microlaser mode population", xlabel="rho = R_p / kappa",
                ylabel="P", xlog=True, ylog=True)
    t_curv, t_unity = [], []
    for beta, photons in zip(betas, results):
        if _wants(cfg, "csv"):
            write_columns(os.path.join(out, f"laser_beta_{_tag(beta)}.csv"),
                          {"rho": grid, "P": photons})
        t_curv.append(microlaser.locate_threshold(grid, photons, "curvature"))
        t_unity.append(microlaser.locate_threshold(grid, photons, "unity"))
        plot.add(grid, photons, f"beta = {_tag(beta)}")
    if _wants(cfg, "svg"):
        plot.save(os.path.join(out, "laser_curves.svg"))
    return [("result.threshold_curvature", t_curv),
            ("result.threshold_unity", t_unity)], []


def cmd_compare(cfg, out, jobs):
    grid = _grid(cfg["control_min"], cfg["control_max"], cfg["n_points"], "control")
    betas = sorted(cfg["beta"])
    if any(not 0 < b <= 1 for b in betas):
        raise ConfigError("every beta must lie in (0, 1]")
    results = _map(_compare_task, [(b, grid) for b in betas], jobs)
    plot = Plot(title="Microlaser (solid) against matched trap (dashed)",
                xlabel="control (rho or n_total)", ylabel="population",
                xlog=True, ylog=True)
    rows, x_matched = [], []
    for k, (beta, comp) in enumerate(zip(betas, results)):
        pair = comparison.match_x_to_beta(beta)
        p0_error = abs(float(comparison.low_density_fraction(pair.x_matched)) - beta)
        if _wants(cfg, "csv"):
            write_columns(os.path.join(out, f"compare_beta_{_tag(beta)}.csv"),
                          {"control": comp.control, "P_laser": comp.laser,
                           "n_ground_bec": comp.bec, "deviation": comp.deviation})
        rows.append((beta, pair.x_matched, p0_error, float(comp.deviation.max())))
        x_matched.append(pair.x_matched)
        color = PALETTE[k % len(PALETTE)]
        plot.add(comp.control, comp.laser, f"laser beta = {_tag(beta)}", color=color)
        plot.add(comp.control, comp.bec, f"trap x = {pair.x_matched:.3g}",
                 color=color, dashed=True)
    if _wants(cfg, "csv"):
        write_csv(os.path.join(out, "summary.csv"),
                  ["beta", "x_matched", "p0_error", "max_deviation"], rows)
    if _wants(cfg, "svg"):
        plot.save(os.path.join(out, "compare.svg"))
    return [("result.x_matched", x_matched),
            ("result.max_deviation", [r[3] for r in rows])], []


def _cavity_geometry(cfg):
    explicit = cfg["_explicit"]
    lam, l0 = cfg["lambda0_nm"], cfg["L0_um"]
    if "L0_um" in explicit and l0 is not None:
        if "lambda0_nm" in explicit and lam is not None:
            raise ConfigError("give only one of lambda0_nm and L0_um")
        lam = None
    if lam is None and l0 is None:
        raise ConfigError("give lambda0_nm or L0_um")
    return cavity.CavityGeometry(
        q=cfg["q"], n_refractive=cfg["n"],
        length_l0=None if lam is not None else l0 * 1e-6,
        cutoff_lambda0=lam * 1e-9 if lam is not None else None,
        mirror_radius=cfg["R_m"], temperature=cfg["T_K"])


_CAVITY_UNITS = {
    "q": "1", "n_refractive": "1", "L0_m": "m", "lambda0_m": "m", "mass_kg": "kg",
    "cstar_m_per_s": "m/s", "rest_energy_J": "J", "temperature_K": "K", "R_m": "m",
    "omega_rad_per_s": "rad/s", "nu_Hz": "Hz", "x_reduced": "1", "N_critical": "1",
    "paraxial": "bool",
}


def cmd_cavity(cfg, out, jobs):
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", cavity.ParaxialWarning)
        table = cavity.summary(_cavity_geometry(cfg))
    write_csv(os.path.join(out, "cavity.csv"), ["name", "value", "unit"],
              [(k, v, _CAVITY_UNITS[k]) for k, v in table.items()])
    extra = [(f"result.{k}", v) for k, v in table.items()
             if k in ("nu_Hz", "x_reduced", "N_critical")]
    return extra + [("result.warnings", len(caught))], []


OBSERVABLE_COLUMNS = ["t", "norm", "kinetic", "potential", "interaction", "total",
                      "peak_density"]


def cmd_gpe(cfg, out, jobs):
    nx = cfg["nx"]
    dx = cfg["box"] / nx
    if cfg["trap_omega"] > 0:
        potential = gpe.harmonic_potential(1.0, cfg["trap_omega"])
    else:
        potential = None
    params = gpe.GpeParams(mass=1.0, potential=potential, g_interaction=cfg["g"],
                           gamma_net=cfg["gamma_net"], gamma_sat=cfg["gamma_sat"],
                           dt=cfg["dt"], hbar=1.0, absorb_width=cfg["absorb_width"],
                           absorb_rate=cfg["absorb_rate"])
    if cfg["init"] == "uniform":
        fld = gpe.ComplexField2D.zeros(nx, dx=dx)
        fld.values[:] = math.sqrt(cfg["norm"] / (cfg["box"] ** 2))
    else:
        fld = gpe.ComplexField2D.gaussian(nx, cfg["width"], cfg["norm"], dx=dx,
                                          center=(cfg["offset_x"], cfg["offset_y"]))
        if cfg["init"] == "ground":
            cons = gpe.GpeParams(mass=1.0, potential=potential, g_interaction=cfg["g"],
                                 hbar=1.0)
            fld = gpe.ground_state(cons, cfg["norm"], fld)
    if cfg["kick_x"]:
        X, _ = fld.mesh()
        fld.values = fld.values * np.exp(1j * cfg["kick_x"] * X)

    every = cfg["sample_every"]
    snap_every = cfg["snapshot_every"]
    if snap_every and snap_every % every:
        raise ConfigError("snapshot_every must be a multiple of sample_every")
    rows, snaps = [], []

    def collect(step, t, field):
        obs = gpe.observables(field, params)
        rows.append((t,) + tuple(obs))
        if step == 0 or step == cfg["steps"] or (snap_every and step % snap_every == 0):
            snaps.append((step, field.copy()))

    gpe.evolve(fld, params, steps=cfg["steps"], sample_every=every, callback=collect)
    write_csv(os.path.join(out, "observables.csv"), OBSERVABLE_COLUMNS, rows)
    for step, field in snaps:
        if _wants(cfg, "csv"):
            gpe.write_field_csv(field, os.path.join(out, f"field_{step:07d}.csv"))
        gpe.write_density_pgm(field, os.path.join(out, f"density_{step:07d}.pgm"))
    data = np.array(rows)
    if _wants(cfg, "svg"):
        plot = Plot(title="Observables", xlabel="t", ylabel="value")
        plot.add(data[:, 0], data[:, 1], "norm")
        plot.add(data[:, 0], data[:, 5], "total energy")
        plot.add(data[:, 0], data[:, 6], "peak density")
        plot.save(os.path.join(out, "observables.svg"))
    norm0, norm1 = data[0, 1], data[-1, 1]
    return [("result.norm_drift", abs(norm1 - norm0) / norm0 if norm0 else 0.0),
            ("result.energy_final", data[-1, 5])], []


def bundled_spectrum_path():
    return str(resources.files("photon_condensate") / "data" / "synthetic_spectra.csv")


def cmd_ks_fit(cfg, out, jobs):
    path = bundled_spectrum_path() if cfg["input"] == BUNDLED_SPECTRUM else cfg["input"]
    pair = spectro.load_spectra(path, floor=cfg["floor"])
    fit = spectro.fit_ks(pair, cfg["dos_correction"], cfg["min_r_squared"])
    spectro.write_fit(fit, pair, os.path.join(out, "ks_report.txt"),
                      os.path.join(out, "ks_points.csv"), cfg["dos_correction"])
    if _wants(cfg, "svg"):
        lr = spectro.ks_log_ratio(pair, cfg["dos_correction"])
        plot = Plot(title=f"Kennard-Stepanov fit, T = {fit.temperature_fit:.2f} K",
                    xlabel="photon energy (eV)", ylabel="ln(A / F)")
        plot.add(lr.energy, lr.log_ratio, "data")
        plot.add(lr.energy, fit.intercept + fit.slope * lr.energy, "fit", dashed=True)
        plot.save(os.path.join(out, "ks_fit.svg"))
    return [("result.temperature_K", fit.temperature_fit),
            ("result.zpl_wavelength_nm", fit.zpl_wavelength),
            ("result.r_squared", fit.r_squared)], []


COMMANDS = {
    "bec-curve": cmd_bec_curve,
    "laser-curve": cmd_laser_curve,
    "compare": cmd_compare,
    "cavity": cmd_cavity,
    "gpe": cmd_gpe,
    "ks-fit": cmd_ks_fit,
}


# ---------------------------------------------------------------------- main

def write_manifest(path, command, cfg, results, failures, status):
    items = [("command", command)]
    items += [(k, _show(cfg[k])) for k, _, _ in SCHEMAS[command]]
    items += [(k, _show(v)) for k, v in results]
    items.append(("result.status", status))
    items.append(("result.failed_points", len(failures)))
    items.append(("result.backend", backend_name()))
    write_key_values(path, items)
    if failures:
        with open(path, "a", encoding="utf-8") as fh:
            for line in failures:
                fh.write(f"# failed: {line}\n")


def _parser():
    p = argparse.ArgumentParser(
        prog="photon-condensate",
        description="Photon condensate models: equilibrium trap, microlaser, "
                    "order-parameter dynamics and spectral thermometry.",
        epilog="Any other --key value pair sets a command parameter; see README.")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config", help="flat 'key = value' parameter file")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for sweeps")
    p.add_argument("--out", help=f"output directory (default ${ENV_OUT} or ./out/<command>)")
    return p


def main(argv=None) -> int:
    args, rest = _parser().parse_known_args(argv)
    command = args.command
    try:
        if args.jobs < 1:
            raise ConfigError("--jobs must be >= 1")
        file_values = _load_config(args.config, command) if args.config else {}
        cfg = resolve(command, file_values, _split_overrides(rest))
        out = args.out or os.environ.get(ENV_OUT) or os.path.join("out", command)
        ensure_dir(out)
        results, failures = COMMANDS[command](cfg, out, args.jobs)
    except (PhotonCondensateError, OSError) as exc:
        print(f"photon-condensate {command}: error: {exc}", file=sys.stderr)
        return EXIT_HARD
    status = "partial" if failures else "ok"
    write_manifest(os.path.join(out, MANIFEST), command, cfg, results, failures, status)
    for line in failures:
        print(f"photon-condensate {command}: failed point: {line}", file=sys.stderr)
    print(f"photon-condensate {command}: {status}, output in {out}")
    return EXIT_PARTIAL if failures else EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
