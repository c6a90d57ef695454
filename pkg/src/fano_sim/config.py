"""Run configuration: JSON document plus command-line overrides.

Schema (every key optional unless noted)::

    {
      "preset": "rb87-d1",                  # base parameter set
      "units": "dimensionless" | "SI",      # default: the preset's, else dimensionless
      "params": {
        "gamma_a_iso": 1.0, "gamma_b_iso": 1.0, "p": 0.0,
        "delta": 0.1,  or  "delta_over_gamma": 0.1,
        "n_bar": 100,  or  "hbar_omega_over_kT": 0.01,  or  "temperature": 5800 (SI only),
        "omega_ac": 0.0, "omega_bc": 0.0,
        "field_mode": "polarized" | "isotropic"
      },
      "time": {"t_max": 20.0, "n_samples": 2048},          # simulate
      "sweep": {                                            # sweep
        "n_bar": [1, 10, 100]  or  {"start": 1, "stop": 345, "num": 20, "spacing": "log"},
        "delta_over_gamma": {"start": 0.01, "stop": 10, "num": 20, "spacing": "log"}
      },
      "initial_state": [0, 0, 1, 0, 0],
      "include_optical": false,
      "output_dir": ".",
      "jobs": 1
    }

Units: in ``dimensionless`` mode rates are in arbitrary units and times in
units of ``1/gamma_bar``; in ``SI`` mode rates are in rad/s and times in
seconds. Either way the physics is computed with ``gamma_bar = 1``.

Temperatures are converted with CODATA 2018 ``hbar`` and ``k_B`` as shipped in
:mod:`scipy.constants`, evaluated at the mean transition frequency
``(omega_ac + omega_bc) / 2``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from scipy import constants

from .model import GROUND_STATE, InvalidParameters, SystemParams, mean_photon_number
from .presets import Preset, UnknownPreset, get_preset

UNIT_SYSTEMS = ("dimensionless", "SI")
MODES = ("simulate", "steady", "sweep")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    mode: str
    params: SystemParams
    units: str = "dimensionless"
    preset: Preset | None = None
    t_max: float = 20.0
    n_samples: int = 2048
    n_bar_axis: np.ndarray | None = None
    delta_axis: np.ndarray | None = None
    initial_state: np.ndarray = field(default_factory=lambda: GROUND_STATE.copy())
    include_optical: bool = False
    output_dir: Path = Path(".")
    jobs: int = 1

    @property
    def time_scale(self) -> float:
        """Multiply a configured time by this to get units of ``1/gamma_bar``."""
        return self.params.gamma_bar if self.units == "SI" else 1.0


def thermal_n_bar(temperature: float, omega_ac: float, omega_bc: float) -> float:
    """Mean photon number at the mean transition frequency for a blackbody at ``temperature`` K."""
    if temperature <= 0:
        raise ConfigError("temperature must be positive")
    omega = 0.5 * (omega_ac + omega_bc)
    if omega <= 0:
        raise ConfigError("temperature needs omega_ac and omega_bc")
    return mean_photon_number(constants.hbar * omega / (constants.k * temperature))


def _axis(spec, name: str) -> np.ndarray:
    if isinstance(spec, (int, float)):
        spec = [spec]
    if isinstance(spec, list):
        axis = np.asarray(spec, dtype=float)
    elif isinstance(spec, dict):
        try:
            start, stop, num = float(spec["start"]), float(spec["stop"]), int(spec["num"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"sweep.{name} needs start, stop and num") from exc
        spacing = spec.get("spacing", "log")
        if num < 1:
            raise ConfigError(f"sweep.{name}.num must be >= 1")
        if spacing == "log":
            if start <= 0 or stop <= 0:
                raise ConfigError(f"sweep.{name}: log spacing needs positive limits")
            axis = np.geomspace(start, stop, num)
        elif spacing == "linear":
            axis = np.linspace(start, stop, num)
        else:
            raise ConfigError(f"sweep.{name}.spacing must be 'log' or 'linear'")
    else:
        raise ConfigError(f"sweep.{name} must be a list or a range object")
    if axis.size == 0 or not np.all(np.isfinite(axis)):
        raise ConfigError(f"sweep.{name} must be non-empty and finite")
    return axis


def _build_params(raw: dict, base: SystemParams | None, units: str) -> SystemParams:
    known = {"gamma_a_iso", "gamma_b_iso", "p", "delta", "delta_over_gamma", "n_bar",
             "hbar_omega_over_kT", "temperature", "omega_ac", "omega_bc", "field_mode"}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown parameter keys: {', '.join(sorted(unknown))}")
    if "delta" in raw and "delta_over_gamma" in raw:
        raise ConfigError("give either delta or delta_over_gamma, not both")
    if len({"n_bar", "hbar_omega_over_kT", "temperature"} & set(raw)) > 1:
        raise ConfigError("give only one of n_bar, hbar_omega_over_kT, temperature")
    if "temperature" in raw and units != "SI":
        raise ConfigError("temperature requires SI units")

    fields = {k: raw[k] for k in ("gamma_a_iso", "gamma_b_iso", "p", "delta", "n_bar", "omega_ac", "omega_bc", "field_mode") if k in raw}
    try:
        params = replace(base, **fields) if base is not None else SystemParams(**fields)
        if "delta_over_gamma" in raw:
            delta = float(raw["delta_over_gamma"]) * params.gamma_bar
            omegas = {}
            if params.omega_ac and params.omega_bc:
                omegas = {"omega_ac": params.omega_bc + delta}
            params = replace(params, delta=delta, **omegas)
        if "hbar_omega_over_kT" in raw:
            params = replace(params, n_bar=mean_photon_number(float(raw["hbar_omega_over_kT"])))
        if "temperature" in raw:
            params = replace(params, n_bar=thermal_n_bar(float(raw["temperature"]), params.omega_ac, params.omega_bc))
    except (InvalidParameters, ValueError, TypeError) as exc:
        raise ConfigError(f"invalid parameters: {exc}") from exc
    return params


def build_config(doc: dict, mode: str, overrides: dict | None = None) -> RunConfig:
    """Validate a parsed JSON document, apply ``overrides`` and return a :class:`RunConfig`.

    ``overrides`` keys mirror the JSON keys; ``n_bar`` and ``delta_over_gamma``
    replace the corresponding parameter (or sweep axis, in sweep mode).
    """
    if mode not in MODES:
        raise ConfigError(f"mode must be one of {MODES}")
    if not isinstance(doc, dict):
        raise ConfigError("configuration must be a JSON object")
    overrides = {k: v for k, v in (overrides or {}).items() if v is not None}
    doc = json.loads(json.dumps(doc))
    for key in ("preset", "units", "output_dir", "jobs", "include_optical"):
        if key in overrides:
            doc[key] = overrides[key]
    for key in ("t_max", "n_samples"):
        if key in overrides:
            doc.setdefault("time", {})[key] = overrides[key]
    for key in ("n_bar", "delta_over_gamma"):
        if key in overrides:
            if mode == "sweep":
                doc.setdefault("sweep", {})[key] = overrides[key]
            else:
                raw = doc.setdefault("params", {})
                if key == "n_bar":
                    for alias in ("hbar_omega_over_kT", "temperature"):
                        raw.pop(alias, None)
                else:
                    raw.pop("delta", None)
                raw[key] = overrides[key]

    unknown = set(doc) - {"mode", "preset", "units", "params", "time", "sweep", "initial_state",
                          "include_optical", "output_dir", "jobs"}
    if unknown:
        raise ConfigError(f"unknown configuration keys: {', '.join(sorted(unknown))}")
    if "mode" in doc and doc["mode"] != mode:
        raise ConfigError(f"configuration is for mode {doc['mode']!r}, not {mode!r}")

    preset = None
    if doc.get("preset") is not None:
        try:
            preset = get_preset(doc["preset"])
        except UnknownPreset as exc:
            raise ConfigError(str(exc.args[0])) from exc
    units = doc.get("units", preset.units if preset else "dimensionless")
    if units not in UNIT_SYSTEMS:
        raise ConfigError(f"units must be one of {UNIT_SYSTEMS}")
    raw_params = doc.get("params", {})
    if not isinstance(raw_params, dict):
        raise ConfigError("params must be an object")
    params = _build_params(raw_params, preset.params if preset else None, units)

    cfg = RunConfig(mode=mode, params=params, units=units, preset=preset)
    time = doc.get("time", {})
    try:
        cfg.t_max = float(time.get("t_max", 20.0 if units == "dimensionless" else 20.0 / params.gamma_bar))
        cfg.n_samples = int(time.get("n_samples", 2048))
        cfg.jobs = int(doc.get("jobs", 1))
    except (TypeError, ValueError, AttributeError) as exc:
        raise ConfigError(f"invalid numeric setting: {exc}") from exc
    if not cfg.t_max > 0 or not np.isfinite(cfg.t_max):
        raise ConfigError("time.t_max must be positive")
    if cfg.n_samples < 2:
        raise ConfigError("time.n_samples must be >= 2")
    cfg.include_optical = bool(doc.get("include_optical", False))
    cfg.output_dir = Path(doc.get("output_dir", "."))

    if "initial_state" in doc:
        x0 = np.asarray(doc["initial_state"], dtype=float)
        if x0.shape != (5,) or not np.all(np.isfinite(x0)) or abs(x0[:3].sum() - 1.0) > 1e-10:
            raise ConfigError("initial_state must be 5 finite numbers with unit trace")
        cfg.initial_state = x0

    if mode == "sweep":
        sweep = doc.get("sweep", {})
        if "n_bar" not in sweep or "delta_over_gamma" not in sweep:
            raise ConfigError("sweep mode needs sweep.n_bar and sweep.delta_over_gamma")
        cfg.n_bar_axis = _axis(sweep["n_bar"], "n_bar")
        cfg.delta_axis = _axis(sweep["delta_over_gamma"], "delta_over_gamma")
        if np.any(cfg.n_bar_axis < 0):
            raise ConfigError("sweep.n_bar values must be non-negative")
    return cfg


def load_config(path, mode: str, overrides: dict | None = None) -> RunConfig:
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from exc
    return build_config(doc, mode, overrides)
