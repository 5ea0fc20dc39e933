"""Beamspace representation of a channel on an angular grid.

The beamspace is a nonnegative G_theta x G_phi matrix: for each grid
direction it accumulates, cluster by cluster, the squared magnitude of the
cluster-averaged projection of the paths onto the array manifold,

    value(i, j) = sum_c | (1/L_c) sum_l  a_y(g)^H A(d_l) conj(a_x(g)) |^2

with unit path gains, so it depends on the path directions only.  The
projection factorizes as <a_y(g), a_y(d)> * <a_x(g), a_x(d)>, i.e. it is a
function of the directional-cosine differences alone; two paths with the
same (Omega_x, Omega_y) are indistinguishable (grating lobes included).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import UeChannel
from .geometry import ArrayConfig, Direction


class DegenerateResidualError(Exception):
    """Raised when a beamspace (typically a residual) has no positive cell."""


@dataclass(frozen=True)
class AngleGrid:
    """Angular grid with point (i, j) at (2*pi*i/g_theta - pi, pi*j/g_phi)."""

    g_theta: int
    g_phi: int

    def __post_init__(self) -> None:
        if self.g_theta < 1 or self.g_phi < 1:
            raise ValueError("grid sizes must be >= 1")

    def direction(self, i: int, j: int) -> Direction:
        return Direction(2.0 * math.pi * i / self.g_theta - math.pi,
                         math.pi * j / self.g_phi)

    def thetas(self) -> np.ndarray:
        return 2.0 * math.pi * np.arange(self.g_theta) / self.g_theta - math.pi

    def phis(self) -> np.ndarray:
        return math.pi * np.arange(self.g_phi) / self.g_phi


@dataclass(frozen=True)
class AodList:
    """Departure directions grouped by cluster (gains already stripped)."""

    clusters: tuple[tuple[Direction, ...], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "clusters", tuple(tuple(c) for c in self.clusters))

    @property
    def num_paths(self) -> int:
        return sum(len(c) for c in self.clusters)

    def all_directions(self) -> list[Direction]:
        return [d for c in self.clusters for d in c]

    @classmethod
    def from_channel(cls, ch: UeChannel) -> "AodList":
        return cls(tuple(tuple(p.direction for p in c.paths) for c in ch.clusters))


@dataclass(frozen=True)
class Beamspace:
    values: np.ndarray  # (g_theta, g_phi), nonnegative
    grid: AngleGrid

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.grid.g_theta, self.grid.g_phi):
            raise ValueError(f"values shape {v.shape} does not match grid")
        if not np.all(np.isfinite(v)):
            raise ValueError("beamspace values must be finite")
        object.__setattr__(self, "values", v)


def truncate_paths(ch: UeChannel, budget: int, per_cluster: bool = False) -> AodList:
    """Keep the strongest paths by |gain| and return their directions.

    Default is a global budget across all clusters combined (the rule used in
    the experiments); ``per_cluster=True`` keeps ``budget`` paths in every
    cluster instead.  Cluster grouping is preserved and emptied clusters are
    dropped.  Ties are resolved toward earlier (cluster, path) positions.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    if per_cluster:
        clusters = []
        for cluster in ch.clusters:
            order = sorted(range(len(cluster.paths)),
                           key=lambda i: (-abs(cluster.paths[i].gain), i))
            keep = sorted(order[:budget])
            clusters.append(tuple(cluster.paths[i].direction for i in keep))
        return AodList(tuple(c for c in clusters if c))

    indexed = [(c_i, p_i, p) for c_i, cluster in enumerate(ch.clusters)
               for p_i, p in enumerate(cluster.paths)]
    indexed.sort(key=lambda t: (-abs(t[2].gain), t[0], t[1]))
    kept = set((c_i, p_i) for c_i, p_i, _ in indexed[:budget])
    clusters = []
    for c_i, cluster in enumerate(ch.clusters):
        dirs = tuple(p.direction for p_i, p in enumerate(cluster.paths) if (c_i, p_i) in kept)
        if dirs:
            clusters.append(dirs)
    return AodList(tuple(clusters))


def _axis_correlations(grid_omegas: np.ndarray, path_omega: float, n: int) -> np.ndarray:
    # <a(g), a(d)> = (1/n) sum_m exp(j pi m (omega_g - omega_d)); Dirichlet kernel
    diff = grid_omegas - path_omega
    m = np.arange(n)
    return np.exp(1j * math.pi * np.outer(diff, m)).sum(axis=1) / n


def compute_beamspace(aods: AodList, grid: AngleGrid, arr: ArrayConfig) -> Beamspace:
    """Evaluate the beamspace of an AoD-list on the given grid.

    Each cluster's normalizer is its own (post-truncation) path count.
    An empty AoD-list yields the all-zero beamspace.
    """
    thetas = grid.thetas()[:, None]
    phis = grid.phis()[None, :]
    omega_x_grid = (np.cos(thetas) * np.sin(phis)).reshape(-1)
    omega_y_grid = (np.sin(thetas) * np.sin(phis)).reshape(-1)

    values = np.zeros(grid.g_theta * grid.g_phi)
    for cluster in aods.clusters:
        if not cluster:
            continue
        acc = np.zeros(values.shape, dtype=complex)
        for d in cluster:
            corr_x = _axis_correlations(omega_x_grid, d.omega_x, arr.n_x)
            corr_y = _axis_correlations(omega_y_grid, d.omega_y, arr.n_y)
            acc += corr_x * corr_y
        acc /= len(cluster)
        values += np.abs(acc) ** 2
    return Beamspace(values.reshape(grid.g_theta, grid.g_phi), grid)


def peak_index(values: np.ndarray, exclude: set[tuple[int, int]] | None = None) -> tuple[int, int]:
    """Index of the strictly positive maximum; ties go to smallest (i, then j).

    Raises :class:`DegenerateResidualError` when no candidate cell is
    strictly positive.
    """
    v = np.asarray(values, dtype=float)
    if exclude:
        v = v.copy()
        for i, j in exclude:
            v[i, j] = -np.inf
    flat = int(np.argmax(v))  # first occurrence == smallest (i, then j)
    i, j = divmod(flat, v.shape[1])
    if not v[i, j] > 0:
        raise DegenerateResidualError("beamspace has no strictly positive cell")
    return i, j


def peak_direction(b: Beamspace) -> Direction:
    """Grid direction of the beamspace maximum (see :func:`peak_index`)."""
    i, j = peak_index(b.values)
    return b.grid.direction(i, j)
