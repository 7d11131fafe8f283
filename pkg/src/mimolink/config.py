"""Configuration loading: one structured file drives every command.

Files are TOML (or the JSON manifest a previous run wrote, whose embedded
config snapshot is reused verbatim). Sections and keys mirror the module
split: sim.* and channel.* feed the Monte Carlo engine, antenna.* the
pattern model, network.* the layout and link budget. Every key has a
default, unknown keys are rejected, and the fully resolved mapping is
echoed into the run manifest so a run can be reproduced from it exactly.
"""

from __future__ import annotations

import copy
import json

try:
    import tomllib
except ImportError:
    import tomli as tomllib

from .antenna import AntennaPattern
from .network import PathLossModel
from .simulate import SimConfig, StoppingRule


class ConfigError(Exception):
    """Invalid configuration file or values (CLI exit code 2)."""


DEFAULTS = {
    "sim": {
        "n_t": 2,
        "n_r": 2,
        "antenna_configs": [],
        "snr_grid_db": [0.0, 5.0, 10.0, 15.0, 20.0],
        "modulation": "qpsk",
        "receiver": "mmse",
        "n_interferers": 0,
        "interferer_inr_db": 3.0,
        "interferer_inrs_db": [],
        "interferer_n_t": 1,
        "inr_from_network": False,
        "min_bit_errors": 100,
        "max_trials": 10_000_000,
        "confidence": 0.95,
        "target_rel_halfwidth": 0.1,
        "seed": 0,
        "workers": 1,
        "backend": "auto",
    },
    "channel": {
        "k_factor": 0.0,
        "r_rx": 0.0,
        "r_tx": 0.0,
        "aoa_deg": 0.0,
        "aod_deg": 0.0,
    },
    "antenna": {
        "g_max_dbi": 18.0,
        "theta_3db_h_deg": 60.0,
        "theta_3db_v_deg": 7.0,
        "g_fb_db": 30.0,
        "downtilt_deg": 2.0,
        "sidelobe_suppression_db": 18.0,
        "cut": "vertical",
        "step_deg": 1.0,
    },
    "network": {
        "layout": "",
        "serving_site": "1",
        "serving_azimuth_deg": 0.0,
        "ms_x_km": 0.5,
        "ms_y_km": 0.0,
        "tx_power_dbm": 43.0,
        "noise_floor_dbm": -104.0,
        "path_loss_exponent": 3.5,
        "reference_distance_km": 0.1,
        "reference_loss_db": 100.0,
        "bs_height_m": 30.0,
        "ms_height_m": 1.5,
    },
}


def _coerce(default, value, key: str):
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise ConfigError(f"{key} must be a boolean, got {value!r}")
        return value
    if isinstance(default, int) and not isinstance(default, bool):
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{key} must be an integer, got {value!r}")
        return value
    if isinstance(default, float):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{key} must be a number, got {value!r}")
        return float(value)
    if isinstance(default, str):
        if not isinstance(value, str):
            raise ConfigError(f"{key} must be a string, got {value!r}")
        return value
    if isinstance(default, list):
        if not isinstance(value, list):
            raise ConfigError(f"{key} must be a list, got {value!r}")
        return list(value)
    raise ConfigError(f"{key} has unsupported default type {type(default)!r}")


def _merge(defaults: dict, override: dict, prefix: str = "") -> dict:
    out = copy.deepcopy(defaults)
    for key, value in override.items():
        if key not in defaults:
            raise ConfigError(f"unknown configuration key {prefix}{key!r}")
        if isinstance(defaults[key], dict):
            if not isinstance(value, dict):
                raise ConfigError(f"{prefix}{key} must be a section")
            out[key] = _merge(defaults[key], value, prefix=f"{prefix}{key}.")
        else:
            out[key] = _coerce(defaults[key], value, f"{prefix}{key}")
    return out


def load_config(path=None) -> dict:
    """Resolve a config file (or nothing) against the defaults."""
    if path is None:
        return copy.deepcopy(DEFAULTS)
    try:
        if str(path).endswith(".json"):
            with open(path) as fh:
                raw = json.load(fh)
        else:
            with open(str(path), "rb") as fh:
                raw = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except (tomllib.TOMLDecodeError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"config {path} must be a table of sections")
    # A manifest written by a previous run embeds the resolved config.
    if "command" in raw and "config" in raw:
        raw = raw["config"]
    return _merge(DEFAULTS, raw)


def parse_antenna_configs(cfg: dict):
    """List of (n_t, n_r) pairs to sweep; falls back to sim.n_t/n_r."""
    labels = cfg["sim"]["antenna_configs"]
    if not labels:
        return [(int(cfg["sim"]["n_t"]), int(cfg["sim"]["n_r"]))]
    pairs = []
    for label in labels:
        if not isinstance(label, str) or "x" not in label:
            raise ConfigError(
                f"sim.antenna_configs entries must look like '2x2', got {label!r}"
            )
        left, _, right = label.partition("x")
        try:
            pairs.append((int(left), int(right)))
        except ValueError:
            raise ConfigError(
                f"sim.antenna_configs entries must look like '2x2', got {label!r}"
            ) from None
    return pairs


def interferer_inrs_db(cfg: dict):
    """Per-interferer INRs in dB from the explicit list or the count."""
    sim = cfg["sim"]
    if sim["interferer_inrs_db"]:
        return tuple(float(v) for v in sim["interferer_inrs_db"])
    if sim["n_interferers"]:
        return (float(sim["interferer_inr_db"]),) * int(sim["n_interferers"])
    return ()


def sim_config(
    cfg: dict,
    n_t: int | None = None,
    n_r: int | None = None,
    stream_key: int = 0,
    inrs_db_override=None,
) -> SimConfig:
    """Build the engine config for one antenna configuration."""
    sim = cfg["sim"]
    ch = cfg["channel"]
    inrs = inrs_db_override if inrs_db_override is not None else interferer_inrs_db(cfg)
    try:
        return SimConfig(
            n_t=int(n_t if n_t is not None else sim["n_t"]),
            n_r=int(n_r if n_r is not None else sim["n_r"]),
            snr_grid_db=tuple(float(v) for v in sim["snr_grid_db"]),
            k_factor=ch["k_factor"],
            r_rx=ch["r_rx"],
            r_tx=ch["r_tx"],
            aoa_deg=ch["aoa_deg"],
            aod_deg=ch["aod_deg"],
            modulation=sim["modulation"],
            receiver=sim["receiver"],
            interferer_inrs_db=tuple(inrs),
            interferer_n_t=int(sim["interferer_n_t"]),
            stopping=StoppingRule(
                min_bit_errors=sim["min_bit_errors"],
                max_trials=sim["max_trials"],
                confidence=sim["confidence"],
                target_rel_halfwidth=sim["target_rel_halfwidth"],
            ),
            seed=int(sim["seed"]),
            stream_key=stream_key,
            backend=sim["backend"],
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def antenna_pattern(cfg: dict) -> AntennaPattern:
    a = cfg["antenna"]
    try:
        return AntennaPattern(
            g_max=a["g_max_dbi"],
            theta_3db_h=a["theta_3db_h_deg"],
            theta_3db_v=a["theta_3db_v_deg"],
            g_fb=a["g_fb_db"],
            downtilt=a["downtilt_deg"],
            sidelobe_suppression=a["sidelobe_suppression_db"],
        )
    except ValueError as exc:
        raise ConfigError(f"antenna: {exc}") from exc


def path_loss_model(cfg: dict) -> PathLossModel:
    n = cfg["network"]
    try:
        return PathLossModel(
            reference_distance_km=n["reference_distance_km"],
            reference_loss_db=n["reference_loss_db"],
            exponent=n["path_loss_exponent"],
        )
    except ValueError as exc:
        raise ConfigError(f"network: {exc}") from exc
