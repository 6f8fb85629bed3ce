"""Command-line front end.

Subcommands compute the energy density, survival curves, exponent
sweeps, and arc-decay diagnostics, emitting CSV/JSON files suitable
for plotting or re-fitting.  Configuration is resolved in three
layers: built-in defaults (the reference potential), then a flat
key=value config file (--config), then individual command-line
overrides.  The TAILSURV_OUTDIR environment variable relocates
relative output paths; it never affects anything else.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from pathlib import Path

import numpy as np

from .analysis import (beta_sweep, default_sweep_grid, fit_power_law)
from .emit import read_table, write_model_json, write_table
from .errors import ConfigError, TailsurvError, ToleranceError
from .model import InitialState, WBPotential
from .oracle import run_verification
from .spectral import SpectralDensity, arc_density_magnitude
from .survival import (asymptote_one_term, asymptote_series, survival_exact,
                       survival_laplace_axis)

DEFAULTS: dict[str, object] = {
    # reference potential and initial state
    "v0": 0.5,
    "vb": 1.8,
    "r_a": 3.0,
    "r_d": 3.4,
    "beta": 0.3,
    "n_a": 1,
    # time grid: logarithmic, 200 points per decade
    "t_min": 0.1,
    "t_max": 2000.0,
    "t_per_decade": 200,
    # energy grid for density emission
    "e_min": 1.0e-4,
    "e_max": 16.0,
    "e_points": 600,
    # fitting and sweeping
    "fit_lo": 400.0,
    "fit_hi": 800.0,
    "fit_samples": 50,
    "beta_start": -0.45,
    "beta_stop": 1.0,
    "beta_step": 0.05,
    # survival methods and tolerances
    "methods": "exact",
    "n_terms": 4,
    "abs_tol": 1.0e-8,
    # arc diagnostics
    "arc_radii": "50,100,200,400",
    "arc_angles": "-pi/16,-pi/8,-3pi/16",
    # output
    "out": "",
}

_METHODS = ("exact", "laplace", "laplace-threshold", "one-term", "series")


def _parse_value(key: str, text: str):
    kind = type(DEFAULTS[key])
    try:
        if kind is int:
            return int(text)
        if kind is float:
            return float(text)
    except ValueError:
        raise ConfigError(f"config key {key}: expected {kind.__name__}, got {text!r}")
    return text


def load_config(path) -> dict:
    """Flat key=value file; # starts a comment; unknown keys rejected."""
    cfg = {}
    for ln, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{ln}: expected key=value, got {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        if key not in DEFAULTS:
            raise ConfigError(f"{path}:{ln}: unknown config key {key!r}")
        cfg[key] = _parse_value(key, val.strip())
    return cfg


def _resolve_config(args) -> dict:
    cfg = dict(DEFAULTS)
    if getattr(args, "config", None):
        cfg.update(load_config(args.config))
    for key in DEFAULTS:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    return cfg


def _out_path(cfg: dict, fallback: str) -> Path:
    name = str(cfg["out"]) or fallback
    path = Path(name)
    outdir = os.environ.get("TAILSURV_OUTDIR")
    if outdir and not path.is_absolute():
        path = Path(outdir) / path
    return path


def _build_density(cfg: dict) -> SpectralDensity:
    pot = WBPotential(v0=float(cfg["v0"]), vb=float(cfg["vb"]),
                      r_a=float(cfg["r_a"]), r_d=float(cfg["r_d"]),
                      beta=float(cfg["beta"]))
    init = InitialState.from_potential(pot, n_a=int(cfg["n_a"]))
    return SpectralDensity(pot, init)


def _time_grid(cfg: dict) -> np.ndarray:
    t_min, t_max = float(cfg["t_min"]), float(cfg["t_max"])
    if not 0 < t_min < t_max:
        raise ConfigError(f"need 0 < t_min < t_max, got [{t_min:g}, {t_max:g}]")
    n = max(2, round(float(cfg["t_per_decade"]) * math.log10(t_max / t_min)))
    return np.geomspace(t_min, t_max, n)


def _parse_angles(text: str) -> list[float]:
    out = []
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            continue
        try:
            out.append(_simple_ratio(part))
        except (ValueError, ZeroDivisionError):
            raise ConfigError(f"bad angle {part!r}")
    return out


def _simple_ratio(text: str) -> float:
    """Parse 'c', 'cpi', 'cpi/d', '-pi/16' style angle strings."""
    text = text.strip().replace(" ", "")
    den = 1.0
    if "/" in text:
        text, den_s = text.split("/", 1)
        den = float(den_s)
    if "pi" in text:
        coeff_s = text.replace("pi", "")
        if coeff_s in ("", "+", "-"):
            coeff_s += "1"
        num = float(coeff_s) * math.pi
    else:
        num = float(text)
    return num / den


def _parse_floats(text: str) -> list[float]:
    try:
        return [float(p) for p in str(text).split(",") if p.strip()]
    except ValueError:
        raise ConfigError(f"bad numeric list {text!r}")


# ----------------------------------------------------------------- #
# subcommands                                                       #
# ----------------------------------------------------------------- #

def cmd_density(cfg: dict) -> int:
    density = _build_density(cfg)
    e = np.geomspace(float(cfg["e_min"]), float(cfg["e_max"]),
                     int(cfg["e_points"]))
    om = density.omega(e)
    path = _out_path(cfg, "density.csv")
    write_table(path, ["E", "omega"], [e, om])
    norm = density.normalization_integral()
    print(f"density: {e.size} points -> {path} (integral over continuum: {norm:.9f})")
    return 0


def cmd_survive(cfg: dict) -> int:
    density = _build_density(cfg)
    times = _time_grid(cfg)
    methods = [m.strip() for m in str(cfg["methods"]).split(",") if m.strip()]
    for m in methods:
        if m not in _METHODS:
            raise ConfigError(f"unknown method {m!r}; choose from {_METHODS}")
    if "exact" not in methods:
        methods.insert(0, "exact")

    header = ["t"]
    columns = []
    exact = survival_exact(density, times, abs_tol=float(cfg["abs_tol"]))
    columns.append(exact.probability)
    header.append("P_exact")
    for m in methods:
        if m == "exact":
            continue
        if m in ("laplace", "laplace-threshold"):
            if times[0] < 200.0:
                print("warning: the rotated-contour representation omits the "
                      "resonance-pole part, significant below t ~ 200; "
                      f"grid starts at t = {times[0]:g}", file=sys.stderr)
            form = "continued" if m == "laplace" else "threshold"
            ser = survival_laplace_axis(density, times, form=form)
            columns.append(ser.probability)
            header.append(f"P_{m.replace('-', '_')}")
        elif m == "one-term":
            model = asymptote_one_term(density.threshold)
            columns.append(model.evaluate(times).probability)
            header.append("P_one_term")
        elif m == "series":
            model = asymptote_series(density.threshold, int(cfg["n_terms"]))
            columns.append(model.evaluate(times).probability)
            header.append(f"P_series_{int(cfg['n_terms'])}")
            write_model_json(_out_path(cfg, "survival.csv").with_suffix(".model.json"),
                             model)
    path = _out_path(cfg, "survival.csv")
    write_table(path, header, [times] + columns)
    print(f"survival: {times.size} times, methods {','.join(methods)} -> {path} "
          f"(exact error estimate {exact.meta['max_error_estimate']:.2e})")
    return 0


def cmd_sweep(cfg: dict) -> int:
    base = WBPotential(v0=float(cfg["v0"]), vb=float(cfg["vb"]),
                       r_a=float(cfg["r_a"]), r_d=float(cfg["r_d"]),
                       beta=float(cfg["beta"]))
    start, stop, step = (float(cfg["beta_start"]), float(cfg["beta_stop"]),
                         float(cfg["beta_step"]))
    if step <= 0 or stop < start:
        raise ConfigError("need beta_step > 0 and beta_stop >= beta_start")
    betas = np.round(np.arange(start, stop + step / 2, step), 10)
    rows = beta_sweep(base, betas,
                      window=(float(cfg["fit_lo"]), float(cfg["fit_hi"])),
                      n_samples=int(cfg["fit_samples"]))
    path = _out_path(cfg, "sweep.csv")
    write_table(path, ["beta", "mu_f", "prefactor", "mu_predicted", "residual"],
                [[r.beta for r in rows], [r.mu_f for r in rows],
                 [r.prefactor for r in rows], [r.mu_predicted for r in rows],
                 [r.residual for r in rows]])
    print(f"sweep: {len(rows)} tail strengths -> {path}")
    return 0


def cmd_arc_check(cfg: dict) -> int:
    pot = WBPotential(v0=float(cfg["v0"]), vb=float(cfg["vb"]),
                      r_a=float(cfg["r_a"]), r_d=float(cfg["r_d"]),
                      beta=float(cfg["beta"]))
    init = InitialState.from_potential(pot, n_a=int(cfg["n_a"]))
    radii = _parse_floats(cfg["arc_radii"])
    angles = _parse_angles(cfg["arc_angles"])
    if len(radii) < 2:
        raise ConfigError("arc check needs at least two radii")
    all_ok = True
    print(f"# arc decay check: beta={pot.beta:g}")
    print("# angle_rad radius |G|")
    for ang in angles:
        vals = [arc_density_magnitude(pot, init, r, ang) for r in radii]
        ok = all(b < a for a, b in zip(vals, vals[1:]))
        all_ok &= ok
        for r, v in zip(radii, vals):
            print(f"{ang:+.10f} {r:g} {v:.17g}")
        print(f"# angle {ang:+.10f}: " + ("decreasing" if ok else "NOT DECREASING"))
    if not all_ok:
        raise ToleranceError("|G| failed to decrease along at least one ray")
    return 0


def cmd_fit(cfg: dict, path: str, column: str | None) -> int:
    header, data = read_table(path)
    if "t" not in data:
        raise ConfigError(f"{path}: no 't' column (found {header})")
    if column is None:
        candidates = [h for h in header if h != "t"]
        if not candidates:
            raise ConfigError(f"{path}: no data columns")
        column = candidates[0]
    if column not in data:
        raise ConfigError(f"{path}: no column {column!r} (found {header})")
    from .survival import SurvivalSeries

    series = SurvivalSeries(times=data["t"], probability=data[column],
                            amplitudes=None, method=f"file:{column}")
    fit = fit_power_law(series, float(cfg["fit_lo"]), float(cfg["fit_hi"]))
    print(f"fit: column {column}, window [{fit.window[0]:g}, {fit.window[1]:g}], "
          f"{fit.n_points} points")
    print(f"mu_f = {fit.mu_f:.17g}")
    print(f"prefactor = {fit.prefactor:.17g}")
    print(f"rms_residual_lnP = {fit.rms_residual:.17g}")
    return 0


def cmd_show_config(cfg: dict) -> int:
    for key in DEFAULTS:
        print(f"{key} = {cfg[key]}")
    return 0


def cmd_verify(cfg: dict) -> int:
    density = _build_density(cfg)
    report = run_verification(density)
    for line in report.lines():
        print(line)
    if not report.all_passed:
        raise ToleranceError("oracle verification failed")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tailsurv",
        description="Survival-probability toolkit for a well-barrier "
                    "potential with an inverse-square tail.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="flat key=value config file")
        for key, val in DEFAULTS.items():
            kind = type(val)
            p.add_argument(f"--{key}", type=(str if kind is str else kind),
                           default=None, help=f"override (default {val!r})")

    for name, help_text in (
            ("density", "emit the energy density on a grid"),
            ("survive", "emit survival curves (exact and asymptotic)"),
            ("sweep", "emit the effective-exponent sweep over tail strengths"),
            ("arc-check", "report |G| decay along lower-half-plane rays"),
            ("show-config", "print the resolved configuration"),
            ("fit", "fit a power law to an emitted survival file"),
            ("verify", argparse.SUPPRESS)):
        p = sub.add_parser(name, help=help_text)
        add_common(p)
        if name == "fit":
            p.add_argument("file", help="CSV with a t column and data columns")
            p.add_argument("--column", default=None,
                           help="data column to fit (default: first)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _resolve_config(args)
        if args.command == "density":
            return cmd_density(cfg)
        if args.command == "survive":
            return cmd_survive(cfg)
        if args.command == "sweep":
            return cmd_sweep(cfg)
        if args.command == "arc-check":
            return cmd_arc_check(cfg)
        if args.command == "fit":
            return cmd_fit(cfg, args.file, args.column)
        if args.command == "show-config":
            return cmd_show_config(cfg)
        if args.command == "verify":
            return cmd_verify(cfg)
        raise ConfigError(f"unknown command {args.command!r}")
    except TailsurvError as exc:
        print(f"error-class: {type(exc).__name__}", file=sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    raise SystemExit(main())
