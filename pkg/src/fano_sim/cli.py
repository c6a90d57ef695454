"""``fano-sim`` command line.

Exit status: 0 on success, 1 for configuration errors, 2 for numerical
failures (including sweeps with invalid cells, whose report goes to stderr).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import svg
from .analysis import NotConverged, sweep_steady
from .config import ConfigError, RunConfig, load_config
from .dynamics import MethodDisagreement, simulate, steady_state
from .linalg import DegenerateKernel
from .presets import PRESETS, get_preset, UnknownPreset

TRAJECTORY_HEADER = ["time", "rho_aa", "rho_bb", "rho_cc", "re_rho_ab", "im_rho_ab", "coh_mag"]
OPTICAL_HEADER = ["time", "re_rho_ac", "im_rho_ac", "re_rho_bc", "im_rho_bc"]
STEADY_HEADER = ["n_bar", "delta_over_gamma", "rho_aa", "rho_bb", "rho_cc", "re_rho_ab", "im_rho_ab",
                 "coh_mag", "coh_ratio", "residual", "method_agreement"]
SWEEP_HEADER = ["n_bar", "delta_over_gamma", "coh_mag", "coh_ratio", "rho_aa", "rho_bb", "valid"]

NUMERICAL_ERRORS = (DegenerateKernel, MethodDisagreement, NotConverged, np.linalg.LinAlgError)


def fmt(value) -> str:
    """17 significant digits, enough to round-trip a double."""
    return f"{float(value):.17g}"


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def read_csv(path) -> tuple[list[str], np.ndarray]:
    """Header and float matrix of a CSV written by this module."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], np.array([[float(v) for v in row] for row in rows[1:]])


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(text)


def trajectory_svg(times, rho_aa, rho_bb, coh_mag, time_label: str) -> str:
    return svg.line_plot(
        times,
        {"rho_aa": rho_aa, "rho_bb": rho_bb, "|rho_ab|": coh_mag},
        title="Excited populations and coherence",
        xlabel=time_label,
        ylabel="population / coherence",
    )


def run_simulate(cfg: RunConfig) -> int:
    if cfg.preset is not None:
        cfg.preset.check_n_bar(cfg.params.n_bar)
    scale = cfg.time_scale
    series = simulate(
        cfg.params.normalized(),
        cfg.t_max * scale,
        cfg.n_samples,
        x0=cfg.initial_state,
        include_optical=cfg.include_optical,
    )
    times = series.times / scale
    mag = series.coherence_magnitude
    rows = ([fmt(t), *map(fmt, x), fmt(m)] for t, x, m in zip(times, series.states, mag))
    out = cfg.output_dir
    _write(out / "trajectory.csv", _csv_text(TRAJECTORY_HEADER, rows))
    label = "time (s)" if cfg.units == "SI" else "time (1/gamma_bar)"
    _write(out / "trajectory.svg", trajectory_svg(times, series.states[:, 0], series.states[:, 1], mag, label))
    if series.optical is not None:
        rows = ([fmt(t), *map(fmt, z)] for t, z in zip(times, series.optical))
        _write(out / "optical.csv", _csv_text(OPTICAL_HEADER, rows))
    print(f"wrote {out / 'trajectory.csv'} ({len(series)} samples)")
    return 0


def run_steady(cfg: RunConfig) -> int:
    if cfg.preset is not None:
        cfg.preset.check_n_bar(cfg.params.n_bar)
    params = cfg.params.normalized()
    result = steady_state(params, x0=cfg.initial_state)
    row = [fmt(params.n_bar), fmt(params.delta_over_gamma), *map(fmt, result.x_ss),
           fmt(result.coherence_magnitude), fmt(result.coherence_ratio),
           fmt(result.residual), fmt(result.method_agreement)]
    text = _csv_text(STEADY_HEADER, [row])
    _write(cfg.output_dir / "steady.csv", text)
    sys.stdout.write(text)
    return 0


def sweep_csv(result) -> str:
    rows = []
    for i, n_bar in enumerate(result.n_bar_axis):
        for j, ratio in enumerate(result.delta_over_gamma_axis):
            rows.append([
                fmt(n_bar), fmt(ratio),
                fmt(result.coherence_magnitude[i, j]), fmt(result.coherence_ratio[i, j]),
                fmt(result.population_a[i, j]), fmt(result.population_b[i, j]),
                "1" if result.valid[i, j] else "0",
            ])
    return _csv_text(SWEEP_HEADER, rows)


def run_sweep(cfg: RunConfig, jobs: int) -> int:
    if cfg.preset is not None:
        cfg.preset.check_n_bar(float(np.max(cfg.n_bar_axis)))
    result = sweep_steady(cfg.params.normalized(), cfg.n_bar_axis, cfg.delta_axis, jobs=jobs)
    out = cfg.output_dir
    _write(out / "sweep.csv", sweep_csv(result))
    log_n = bool(np.all(result.n_bar_axis > 0))
    log_d = bool(np.all(result.delta_over_gamma_axis > 0))
    for name, values, label in (
        ("coh_mag", result.coherence_magnitude, "stationary |rho_ab|"),
        ("coh_ratio", result.coherence_ratio, "|rho_ab| / (rho_aa + rho_bb)"),
    ):
        doc = svg.heatmap(result.n_bar_axis, result.delta_over_gamma_axis, values, title=label,
                          xlabel="mean photon number", ylabel="delta / gamma_bar", log_x=log_n, log_y=log_d)
        _write(out / f"sweep_{name}.svg", doc)
    print(f"wrote {out / 'sweep.csv'} ({result.valid.size} cells, {int(result.valid.sum())} valid)")
    if result.errors:
        for (i, j), message in sorted(result.errors.items()):
            print(
                f"invalid cell n_bar={result.n_bar_axis[i]:.6g} delta/gamma={result.delta_over_gamma_axis[j]:.6g}: {message}",
                file=sys.stderr,
            )
        return 2
    return 0


def run_preset(args) -> int:
    if args.show:
        try:
            p = get_preset(args.show)
        except UnknownPreset as exc:
            print(exc.args[0], file=sys.stderr)
            return 1
        doc = {"name": p.name, "units": p.units, "description": p.description,
               "n_bar_max": p.n_bar_max, "params": asdict(p.params)}
        doc["params"]["field_mode"] = p.params.field_mode.value
        print(json.dumps(doc, indent=2))
    else:
        for name in sorted(PRESETS):
            print(f"{name}\t{PRESETS[name].description}")
    return 0


def _jobs(args) -> int:
    env = os.environ.get("FANO_SIM_JOBS")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ConfigError(f"FANO_SIM_JOBS must be an integer, got {env!r}") from None
    return args.jobs


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fano-sim", description="V-type three-level system under incoherent driving")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="JSON run configuration")
        p.add_argument("--preset", help="override the configured preset")
        p.add_argument("--units", choices=["dimensionless", "SI"])
        p.add_argument("--n-bar", dest="n_bar", type=float)
        p.add_argument("--delta-over-gamma", dest="delta_over_gamma", type=float)
        p.add_argument("--out", "--output-dir", dest="output_dir")

    sim = sub.add_parser("simulate", help="time evolution from the configured initial state")
    common(sim)
    sim.add_argument("--t-max", dest="t_max", type=float)
    sim.add_argument("--n-samples", dest="n_samples", type=int)
    sim.add_argument("--include-optical", dest="include_optical", action="store_true", default=None)

    common(sub.add_parser("steady", help="stationary state, cross-checked by long-time propagation"))

    sweep = sub.add_parser("sweep", help="steady-state grid over n_bar and delta/gamma_bar")
    common(sweep)
    sweep.add_argument("--jobs", type=int, default=1, help="worker processes (FANO_SIM_JOBS overrides)")

    pre = sub.add_parser("preset", help="list or show named parameter sets")
    group = pre.add_mutually_exclusive_group(required=True)
    group.add_argument("--list", action="store_true")
    group.add_argument("--show", metavar="NAME")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "preset":
        return run_preset(args)
    overrides = {k: getattr(args, k, None) for k in
                 ("preset", "units", "n_bar", "delta_over_gamma", "output_dir", "t_max", "n_samples", "include_optical")}
    try:
        jobs = _jobs(args) if args.command == "sweep" else 1
        cfg = load_config(args.config, args.command, overrides)
        if args.command == "simulate":
            return run_simulate(cfg)
        if args.command == "steady":
            return run_steady(cfg)
        return run_sweep(cfg, jobs)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    except NUMERICAL_ERRORS as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"cannot write output: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
