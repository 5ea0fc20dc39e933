"""LiDAR-style voxelization of point clouds into a fixed-size occupancy grid.

The coverage box is quantized into b_x x b_y x b_z bins.  The bin holding
the BS gets the marker -2, the bin holding the UE gets -1, every other bin
is 1 if at least one point falls inside it and 0 otherwise.  Points outside
the box are discarded.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

BS_MARKER = -2.0
UE_MARKER = -1.0


@dataclass(frozen=True)
class VoxelSpec:
    """Coverage box and bin counts; defaults follow the reference setup."""

    x_range: tuple[float, float] = (744.0, 767.0)
    y_range: tuple[float, float] = (429.0, 679.0)
    z_range: tuple[float, float] = (0.0, 10.0)
    bins: tuple[int, int, int] = (20, 200, 10)

    def __post_init__(self) -> None:
        for lo, hi in (self.x_range, self.y_range, self.z_range):
            if hi <= lo:
                raise ValueError("coverage box ranges must be increasing")
        if any(b < 1 for b in self.bins):
            raise ValueError("bin counts must be >= 1")

    def _lows(self) -> np.ndarray:
        return np.array([self.x_range[0], self.y_range[0], self.z_range[0]])

    def _widths(self) -> np.ndarray:
        spans = np.array([self.x_range[1] - self.x_range[0],
                          self.y_range[1] - self.y_range[0],
                          self.z_range[1] - self.z_range[0]])
        return spans / np.array(self.bins)

    def contains(self, point) -> bool:
        x, y, z = point
        return (self.x_range[0] <= x <= self.x_range[1]
                and self.y_range[0] <= y <= self.y_range[1]
                and self.z_range[0] <= z <= self.z_range[1])

    def bin_index(self, point) -> tuple[int, int, int]:
        idx = (np.asarray(point, dtype=float) - self._lows()) / self._widths()
        return tuple(int(min(int(i), b - 1)) for i, b in zip(idx, self.bins))


def voxelize(points, bs_pos, ue_pos, spec: VoxelSpec = VoxelSpec()) -> np.ndarray:
    """Occupancy grid of shape ``spec.bins`` with BS/UE markers applied last."""
    if not spec.contains(bs_pos):
        raise ValueError(f"BS position {bs_pos} lies outside the coverage box")
    if not spec.contains(ue_pos):
        raise ValueError(f"UE position {ue_pos} lies outside the coverage box")
    grid = np.zeros(spec.bins)
    for p in points:
        if spec.contains(p):
            grid[spec.bin_index(p)] = 1.0
    grid[spec.bin_index(bs_pos)] = BS_MARKER
    grid[spec.bin_index(ue_pos)] = UE_MARKER
    return grid
