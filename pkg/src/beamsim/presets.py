"""Named experiment presets and JSON config parsing.

The ``*-paper`` presets follow the reference system shapes (16x8 array /
2 RF chains / 64x32 grid for U=2; 16x16 / 4 / 64x64 for U=4; 792
subcarriers at 120 kHz; 25-path truncation).  The ``*-desk`` presets shrink
the array, grid and subcarrier count so full sweeps run in CI-scale time.

A sweep config JSON looks like

    {"version": 1, "kind": "sweep_config", "preset": "u4-desk",
     "trials": 200, "eirp_dbm": [42.0],
     "scenario": {"shared_cluster_probability": 0.8}}

Fields outside "preset" override the preset's values; "scenario" / "ofdm" /
"array" / "beamspace_grid" merge field-by-field.
"""

from __future__ import annotations

import dataclasses
from typing import Any

from .bspace import AngleGrid
from .channel import OfdmConfig, ScenarioConfig
from .evaluation import STRATEGIES, SweepConfig
from .geometry import ArrayConfig

PRESET_NAMES = ("u2-paper", "u4-paper", "u2-desk", "u4-desk")

_COMMON_SCENARIO = dict(
    cluster_count_range=(1, 3),
    paths_per_cluster_range=(1, 4),
    angle_spread_per_cluster_deg=5.0,
    delay_spread_s=100e-9,
    shared_cluster_probability=0.25,
    rng_seed=0,
)


def _preset(num_ues, users, n_x, n_y, g_theta, g_phi, k, taps, eirp):
    ts = 1.0 / (k * 120e3)
    return {
        "eirp_dbm": list(eirp),
        "strategies": list(STRATEGIES),
        "trials": 50,
        "users_per_cluster": users,
        "truncation_budget": 25,
        "estimator": "ground_truth",
        "array": {"n_x": n_x, "n_y": n_y},
        "beamspace_grid": {"g_theta": g_theta, "g_phi": g_phi},
        "ofdm": {"num_subcarriers": k, "subcarrier_spacing_hz": 120e3,
                 "num_taps": taps, "sample_period_s": ts,
                 "pulse_rolloff": 0.25, "first_tap": 1},
        "scenario": {**_COMMON_SCENARIO, "num_ues": num_ues, "delay_offset_s": ts},
    }


PRESETS: dict[str, dict] = {
    "u2-paper": _preset(10, 2, 16, 8, 64, 32, 792, 64, (12, 18, 24, 30, 36, 42)),
    "u4-paper": _preset(10, 4, 16, 16, 64, 64, 792, 64, (12, 18, 24, 30, 36, 42)),
    "u2-desk": _preset(3, 2, 8, 4, 32, 16, 64, 8, (18, 30, 42)),
    "u4-desk": _preset(4, 4, 8, 4, 32, 16, 64, 8, (18, 30, 42)),
}


def _merge(base: dict, override: dict) -> dict:
    out = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = {**out[key], **value}
        else:
            out[key] = value
    return out


def _build_scenario(d: dict) -> ScenarioConfig:
    d = dict(d)
    spread_deg = d.pop("angle_spread_per_cluster_deg", None)
    if spread_deg is not None:
        import math
        d["angle_spread_per_cluster"] = math.radians(float(spread_deg))
    for key in ("cluster_count_range", "paths_per_cluster_range"):
        if key in d:
            d[key] = tuple(int(v) for v in d[key])
    return ScenarioConfig(**d)


def sweep_config_from_dict(doc: dict[str, Any]) -> SweepConfig:
    """Resolve a sweep config document (preset plus overrides) to a SweepConfig."""
    if doc.get("kind") not in (None, "sweep_config"):
        raise ValueError(f"expected a sweep_config document, got {doc.get('kind')!r}")
    if int(doc.get("version", 1)) != 1:
        raise ValueError(f"unsupported config version {doc.get('version')!r}")
    preset = doc.get("preset")
    base: dict = {}
    if preset is not None:
        if preset not in PRESETS:
            raise ValueError(f"unknown preset {preset!r}; choose from {PRESET_NAMES}")
        base = PRESETS[preset]
    merged = _merge(base, {k: v for k, v in doc.items()
                           if k not in ("version", "kind", "preset")})
    try:
        return SweepConfig(
            eirp_dbm=tuple(float(e) for e in merged["eirp_dbm"]),
            strategies=tuple(merged["strategies"]),
            scenario=_build_scenario(merged["scenario"]),
            ofdm=OfdmConfig(**merged["ofdm"]),
            array=ArrayConfig(**merged["array"]),
            users_per_cluster=int(merged["users_per_cluster"]),
            beamspace_grid=AngleGrid(**merged["beamspace_grid"]),
            trials=int(merged.get("trials", 1)),
            truncation_budget=int(merged.get("truncation_budget", 25)),
            noise_power_dbm=merged.get("noise_power_dbm"),
            noise_figure_db=float(merged.get("noise_figure_db", 7.0)),
            estimation_snr_offset_db=float(merged.get("estimation_snr_offset_db", 10.0)),
            estimator=str(merged.get("estimator", "ground_truth")),
            dft_oversampling=int(merged.get("dft_oversampling", 1)),
            subtract_residuals=bool(merged.get("subtract_residuals", False)),
        )
    except KeyError as exc:
        raise ValueError(f"sweep config is missing required field {exc}") from exc


def sweep_config_to_dict(cfg: SweepConfig) -> dict:
    """Inverse of :func:`sweep_config_from_dict` (fully resolved, no preset)."""
    doc = dataclasses.asdict(cfg)
    doc["eirp_dbm"] = list(cfg.eirp_dbm)
    doc["strategies"] = list(cfg.strategies)
    return {"version": 1, "kind": "sweep_config", **doc}


def generate_config_from_dict(doc: dict[str, Any]) -> tuple[ScenarioConfig, int]:
    """Resolve a scenario-generation config to (ScenarioConfig, trials)."""
    if doc.get("kind") not in (None, "generate_config"):
        raise ValueError(f"expected a generate_config document, got {doc.get('kind')!r}")
    if int(doc.get("version", 1)) != 1:
        raise ValueError(f"unsupported config version {doc.get('version')!r}")
    base: dict = {}
    if doc.get("preset") is not None:
        base = PRESETS[doc["preset"]]["scenario"]
    merged = _merge(base, doc.get("scenario", {}))
    if not merged:
        raise ValueError("generate config needs a 'scenario' section or a preset")
    return _build_scenario(merged), int(doc.get("trials", 1))
