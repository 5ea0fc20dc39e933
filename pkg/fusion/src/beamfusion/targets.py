"""Training targets: angle quantizer, hard/soft encodings, path truncation.

The formulas intentionally mirror the simulator's exchange contract so loss
values agree with the reference implementation on identical inputs: bins are
uniform over azimuth [-pi, pi) x elevation [0, pi]; a cell is hard-encoded 1
when a path quantizes into it; the soft value decays linearly with the
per-axis distance from the path to the cell's angular interval, normalized
by delta/2 (azimuth wraps, elevation does not).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class EncodingSpec:
    theta_bins: int = 32
    phi_bins: int = 16
    delta_deg: float = 10.0

    @property
    def theta_width(self) -> float:
        return 2.0 * math.pi / self.theta_bins

    @property
    def phi_width(self) -> float:
        return math.pi / self.phi_bins

    def quantize(self, azimuth: float, elevation: float) -> tuple[int, int]:
        i = int((azimuth + math.pi) / self.theta_width)
        j = int(elevation / self.phi_width)
        return min(i, self.theta_bins - 1), min(j, self.phi_bins - 1)

    def cell_center_deg(self, i: int, j: int) -> tuple[float, float]:
        return (math.degrees(-math.pi + (i + 0.5) * self.theta_width),
                math.degrees((j + 0.5) * self.phi_width))


def truncate_paths(ue_doc: dict, budget: int = 25) -> list[list[tuple[float, float]]]:
    """Strongest-`budget` path directions (radians) across all clusters combined."""
    indexed = []
    for c_i, cluster in enumerate(ue_doc["clusters"]):
        for p_i, p in enumerate(cluster["paths"]):
            mag = math.hypot(float(p["gain_re"]), float(p["gain_im"]))
            indexed.append((-mag, c_i, p_i, p))
    indexed.sort(key=lambda t: t[:3])
    keep = set((c_i, p_i) for _, c_i, p_i, _ in indexed[:budget])
    clusters = []
    for c_i, cluster in enumerate(ue_doc["clusters"]):
        dirs = [(math.radians(float(p["azimuth_deg"])), math.radians(float(p["elevation_deg"])))
                for p_i, p in enumerate(cluster["paths"]) if (c_i, p_i) in keep]
        if dirs:
            clusters.append(dirs)
    return clusters


def hard_target(clusters, spec: EncodingSpec) -> np.ndarray:
    values = np.zeros((spec.theta_bins, spec.phi_bins))
    for az, el in (d for c in clusters for d in c):
        values[spec.quantize(az, el)] = 1.0
    return values


def soft_target(clusters, spec: EncodingSpec) -> np.ndarray:
    half = math.radians(spec.delta_deg) / 2.0
    theta_c = (-math.pi + (np.arange(spec.theta_bins) + 0.5) * spec.theta_width)[:, None]
    phi_c = ((np.arange(spec.phi_bins) + 0.5) * spec.phi_width)[None, :]
    best = np.full((spec.theta_bins, spec.phi_bins), np.inf)
    for az, el in (d for c in clusters for d in c):
        d_theta = np.abs((theta_c - az + math.pi) % (2.0 * math.pi) - math.pi)
        d_theta = np.maximum(d_theta - spec.theta_width / 2.0, 0.0)
        d_phi = np.maximum(np.abs(phi_c - el) - spec.phi_width / 2.0, 0.0)
        best = np.minimum(best, np.maximum(d_theta, d_phi) / half)
    return np.clip(1.0 - best, 0.0, 1.0)


def decode_probabilities(probs: np.ndarray, spec: EncodingSpec) -> list[tuple[float, float]]:
    """Cell-center directions (degrees) of all cells strictly above 0.5."""
    hits = np.nonzero(np.asarray(probs) > 0.5)
    return [spec.cell_center_deg(int(i), int(j)) for i, j in zip(*hits)]
