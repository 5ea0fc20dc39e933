"""JSON exchange formats: scenarios, AoD-lists, beamspaces, predictions.

These schemas are the package's external contract; angles cross the file
boundary in degrees and are converted to radians on load.

scenario file      {"version": 1, "kind": "scenario", "ues": [
                      {"ue_id": int, "clusters": [{"paths": [
                          {"gain_re", "gain_im", "delay_s",
                           "azimuth_deg", "elevation_deg"}]}]}]}
aod-list           {"clusters": [[{"azimuth_deg", "elevation_deg"}, ...], ...]}
beamspace          {"grid": {"g_theta", "g_phi"}, "values": [row-major floats]}
prediction file    {"version": 1, "kind": "predictions", "predictions": [
                      {"trial": int, "ue_id": int, "aod_list": <aod-list>,
                       "beamspace": <beamspace, optional>}]}
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .bspace import AngleGrid, AodList, Beamspace
from .channel import PathComponent, RayCluster, UeChannel
from .evaluation import _FilePredictions
from .geometry import Direction

SCHEMA_VERSION = 1


def direction_to_json(d: Direction) -> dict:
    return {"azimuth_deg": math.degrees(d.azimuth), "elevation_deg": math.degrees(d.elevation)}


def direction_from_json(obj: dict) -> Direction:
    return Direction.from_degrees(float(obj["azimuth_deg"]), float(obj["elevation_deg"]))


def ue_channel_to_json(ch: UeChannel) -> dict:
    return {
        "ue_id": ch.ue_id,
        "clusters": [
            {"paths": [
                {"gain_re": p.gain.real, "gain_im": p.gain.imag, "delay_s": p.delay,
                 **direction_to_json(p.direction)}
                for p in cluster.paths]}
            for cluster in ch.clusters],
    }


def ue_channel_from_json(obj: dict) -> UeChannel:
    clusters = []
    for cl in obj["clusters"]:
        paths = tuple(
            PathComponent(complex(float(p["gain_re"]), float(p["gain_im"])),
                          float(p["delay_s"]), direction_from_json(p))
            for p in cl["paths"])
        clusters.append(RayCluster(paths))
    return UeChannel(tuple(clusters), int(obj["ue_id"]))


def scenario_to_json(ues: list[UeChannel]) -> dict:
    return {"version": SCHEMA_VERSION, "kind": "scenario",
            "ues": [ue_channel_to_json(ch) for ch in ues]}


def scenario_from_json(obj: dict) -> list[UeChannel]:
    _expect_kind(obj, "scenario")
    return [ue_channel_from_json(u) for u in obj["ues"]]


def aod_list_to_json(aods: AodList) -> dict:
    return {"clusters": [[direction_to_json(d) for d in cluster]
                         for cluster in aods.clusters]}


def aod_list_from_json(obj: dict) -> AodList:
    return AodList(tuple(tuple(direction_from_json(d) for d in cluster)
                         for cluster in obj["clusters"]))


def beamspace_to_json(b: Beamspace) -> dict:
    return {"grid": {"g_theta": b.grid.g_theta, "g_phi": b.grid.g_phi},
            "values": [float(v) for v in b.values.reshape(-1)]}


def beamspace_from_json(obj: dict) -> Beamspace:
    grid = AngleGrid(int(obj["grid"]["g_theta"]), int(obj["grid"]["g_phi"]))
    values = np.asarray(obj["values"], dtype=float).reshape(grid.g_theta, grid.g_phi)
    return Beamspace(values, grid)


def predictions_to_json(entries: list[dict]) -> dict:
    """entries: [{"trial", "ue_id", "aod_list", optional "beamspace"}]."""
    return {"version": SCHEMA_VERSION, "kind": "predictions", "predictions": entries}


def predictions_from_json(obj: dict) -> _FilePredictions:
    _expect_kind(obj, "predictions")
    aod_lists = {}
    beamspaces = {}
    for entry in obj["predictions"]:
        key = (int(entry["trial"]), int(entry["ue_id"]))
        if "aod_list" in entry:
            aod_lists[key] = aod_list_from_json(entry["aod_list"])
        if entry.get("beamspace") is not None:
            beamspaces[key] = beamspace_from_json(entry["beamspace"])
        if key not in aod_lists and key not in beamspaces:
            raise ValueError(f"prediction entry {key} has neither aod_list nor beamspace")
    return _FilePredictions(aod_lists, beamspaces)


def _expect_kind(obj: dict, kind: str) -> None:
    if not isinstance(obj, dict) or obj.get("kind") != kind:
        raise ValueError(f"expected a {kind!r} document, got kind={obj.get('kind')!r}"
                         if isinstance(obj, dict) else f"expected a {kind!r} JSON object")
    if int(obj.get("version", -1)) != SCHEMA_VERSION:
        raise ValueError(f"unsupported schema version {obj.get('version')!r}")


def dump_json(obj: dict, path: str | Path) -> None:
    """Canonical JSON writer: sorted keys, indent 2, trailing newline."""
    Path(path).write_text(json.dumps(obj, sort_keys=True, indent=2) + "\n")


def load_json(path: str | Path) -> dict:
    with open(path) as fh:
        return json.load(fh)
