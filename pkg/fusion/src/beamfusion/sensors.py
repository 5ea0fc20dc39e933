"""Synthetic sensor streams derived from a scenario file.

Real deployments would feed measured LiDAR / camera / positioning data; here
the scatterer geometry implied by each channel path is rendered back into
the sensors so the sensors-to-AoD mapping is well posed and learnable at toy
scale.  Everything is a pure function of the scenario document: no RNG.

World frame: the BS sits near the low-Y edge of the coverage box and looks
along +Y.  A path with array-frame unit vector (ux, uy, uz) (uz along
broadside) places one scatterer at

    (bs_x + 11*ux,  bs_y + 5 + 200*uz,  bs_z + 4.8*uy)

which stays inside the default coverage box and is injective in direction:
on the upper hemisphere (ux, uy) already determine uz.

Per UE the sensors are: the voxelized point cloud of its own scatterers
(plus BS/UE markers), the scene-wide BS camera image (shared by all UEs of
the scene), and the UE-minus-BS 2-D coordinate input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .voxel import VoxelSpec, voxelize

IMAGE_SHAPE = (48, 81)

_BS_POS = (755.5, 434.0, 5.0)


@dataclass(frozen=True)
class UeSensors:
    ue_id: int
    voxel: np.ndarray
    image: np.ndarray
    coords: np.ndarray  # UE position minus BS position, (x, y)


def _unit_vector(azimuth: float, elevation: float) -> tuple[float, float, float]:
    return (math.cos(azimuth) * math.sin(elevation),
            math.sin(azimuth) * math.sin(elevation),
            math.cos(elevation))


def _scatterer(azimuth: float, elevation: float) -> tuple[float, float, float]:
    ux, uy, uz = _unit_vector(azimuth, elevation)
    return (_BS_POS[0] + 11.0 * ux,
            _BS_POS[1] + 5.0 + 200.0 * max(uz, 0.0),
            _BS_POS[2] + 4.8 * uy)


def _ue_position(ue_id: int) -> tuple[float, float, float]:
    return (_BS_POS[0] - 8.0 + 3.7 * (ue_id % 5),
            _BS_POS[1] + 30.0 + 17.0 * (ue_id % 12),
            1.5)


def _directions_deg(ue_doc: dict) -> list[tuple[float, float]]:
    return [(float(p["azimuth_deg"]), float(p["elevation_deg"]))
            for cluster in ue_doc["clusters"] for p in cluster["paths"]]


def _render_image(all_dirs_deg) -> np.ndarray:
    """Scene camera raster: azimuth -> column, elevation -> row, in [0, 1]."""
    rows, cols = IMAGE_SHAPE
    img = np.zeros(IMAGE_SHAPE)
    for az, el in all_dirs_deg:
        c = min(int((az + 180.0) / 360.0 * cols), cols - 1)
        r = min(int(el / 180.0 * rows), rows - 1)
        img[r, c] = 1.0
    return img


def synthesize_sensors(scenario: dict, spec: VoxelSpec = VoxelSpec()) -> list[UeSensors]:
    """Per-UE (voxel, image, coords) derived from a scenario document."""
    if scenario.get("kind") != "scenario":
        raise ValueError("expected a scenario document")
    scene_dirs = [d for ue in scenario["ues"] for d in _directions_deg(ue)]
    image = _render_image(scene_dirs)
    out = []
    for ue in scenario["ues"]:
        ue_id = int(ue["ue_id"])
        points = [_scatterer(math.radians(az), math.radians(el))
                  for az, el in _directions_deg(ue)]
        ue_pos = _ue_position(ue_id)
        grid = voxelize(points, _BS_POS, ue_pos, spec)
        coords = np.array([ue_pos[0] - _BS_POS[0], ue_pos[1] - _BS_POS[1]])
        out.append(UeSensors(ue_id, grid, image, coords))
    return out
