"""Uniform rectangular array geometry: steering vectors, array response, DFT codebooks.

The array lies in the XY-plane with broadside along +Z and half-wavelength
element spacing.  Azimuth theta is measured in [-pi, pi), elevation phi in
[0, pi].  The directional cosines are

    Omega_x = cos(theta) * sin(phi),    Omega_y = sin(theta) * sin(phi).

All angles are radians; degrees appear only at CLI / file boundaries.

Vectorization convention (important): ``vectorize`` flattens row-major, i.e.
element (i, j) of an M x N matrix maps to index i*N + j.  This differs from
the column-major vec() common in the MIMO literature; every consumer in this
package relies on the row-major rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ArrayConfig:
    """Uniform rectangular array with n_x x n_y elements."""

    n_x: int
    n_y: int

    def __post_init__(self) -> None:
        if self.n_x < 1 or self.n_y < 1:
            raise ValueError(f"array dimensions must be >= 1, got {self.n_x}x{self.n_y}")

    @property
    def size(self) -> int:
        return self.n_x * self.n_y


def wrap_azimuth(theta: float) -> float:
    """Wrap an azimuth angle into [-pi, pi)."""
    return float((theta + math.pi) % (2.0 * math.pi) - math.pi)


@dataclass(frozen=True)
class Direction:
    """A departure direction (azimuth, elevation) in radians.

    Azimuth is wrapped into [-pi, pi) at construction.  Elevation outside
    [0, pi] is rejected rather than wrapped: it has no periodic meaning for
    a planar array.
    """

    azimuth: float
    elevation: float

    def __post_init__(self) -> None:
        if not (-1e-12 <= self.elevation <= math.pi + 1e-12):
            raise ValueError(f"elevation must lie in [0, pi], got {self.elevation}")
        object.__setattr__(self, "azimuth", wrap_azimuth(self.azimuth))
        object.__setattr__(self, "elevation", float(min(max(self.elevation, 0.0), math.pi)))

    @property
    def omega_x(self) -> float:
        return math.cos(self.azimuth) * math.sin(self.elevation)

    @property
    def omega_y(self) -> float:
        return math.sin(self.azimuth) * math.sin(self.elevation)

    def unit_vector(self) -> np.ndarray:
        """3-D unit vector (cos t sin p, sin t sin p, cos p)."""
        return np.array([
            math.cos(self.azimuth) * math.sin(self.elevation),
            math.sin(self.azimuth) * math.sin(self.elevation),
            math.cos(self.elevation),
        ])

    def cosine_triplet(self) -> np.ndarray:
        """(sin theta, cos theta, sin phi) triplet used by cosine encodings."""
        return np.array([
            math.sin(self.azimuth),
            math.cos(self.azimuth),
            math.sin(self.elevation),
        ])

    @classmethod
    def from_degrees(cls, azimuth_deg: float, elevation_deg: float) -> "Direction":
        return cls(math.radians(azimuth_deg), math.radians(elevation_deg))


def _steering(omega: float, n: int) -> np.ndarray:
    # entry m = exp(-j pi m omega) / sqrt(n); first entry is the phase reference
    m = np.arange(n)
    return np.exp(-1j * math.pi * m * omega) / math.sqrt(n)


def steering_x(direction: Direction, n_x: int) -> np.ndarray:
    """X-axis Vandermonde steering vector, entries (1/sqrt(n_x)) e^{-j pi m Omega_x}."""
    return _steering(direction.omega_x, n_x)


def steering_y(direction: Direction, n_y: int) -> np.ndarray:
    """Y-axis Vandermonde steering vector, entries (1/sqrt(n_y)) e^{-j pi m Omega_y}."""
    return _steering(direction.omega_y, n_y)


def array_response(direction: Direction, cfg: ArrayConfig) -> np.ndarray:
    """Array response matrix A = a_y a_x^T, shape (n_y, n_x), unit Frobenius norm."""
    a_y = steering_y(direction, cfg.n_y)
    a_x = steering_x(direction, cfg.n_x)
    return np.outer(a_y, a_x)


def vectorize(matrix: np.ndarray) -> np.ndarray:
    """Row-major flatten: element (i, j) of an M x N matrix goes to index i*N + j."""
    return np.asarray(matrix).reshape(-1)


def unvectorize(vector: np.ndarray, n_rows: int, n_cols: int) -> np.ndarray:
    """Inverse of :func:`vectorize`."""
    return np.asarray(vector).reshape(n_rows, n_cols)


def conjugate_beamformer(direction: Direction, cfg: ArrayConfig) -> np.ndarray:
    """Constant-modulus precoder vec(conj A(direction)); unit norm, length n_x*n_y."""
    return vectorize(np.conj(array_response(direction, cfg)))


def direction_from_omegas(omega_x: float, omega_y: float) -> Direction:
    """Upper-hemisphere direction with the given directional cosines.

    Requires omega_x**2 + omega_y**2 <= 1; the elevation returned lies in
    [0, pi/2] (broadside hemisphere).
    """
    s = math.hypot(omega_x, omega_y)
    if s > 1.0 + 1e-12:
        raise ValueError(f"({omega_x}, {omega_y}) is not a realizable direction")
    phi = math.asin(min(s, 1.0))
    theta = math.atan2(omega_y, omega_x) if s > 0 else 0.0
    return Direction(theta, phi)


def dft_codebook(cfg: ArrayConfig, oversampling: int = 1) -> list[np.ndarray]:
    """Constant-modulus beamformers on a uniform (Omega_x, Omega_y) grid.

    The grid spans [-1, 1) with oversampling*n_x by oversampling*n_y points;
    points outside the visible region (Omega_x**2 + Omega_y**2 > 1) are
    dropped.  Each codeword is vec(conj A) at the grid direction: unit norm
    with all entries of magnitude 1/sqrt(n_x*n_y).
    """
    if oversampling < 1:
        raise ValueError("oversampling must be >= 1")
    gx = oversampling * cfg.n_x
    gy = oversampling * cfg.n_y
    # DFT convention: Omega = 2i/g wrapped into [-1, 1), so broadside (0) is
    # always a codeword.
    omegas_x = (2.0 * np.arange(gx) / gx + 1.0) % 2.0 - 1.0
    omegas_y = (2.0 * np.arange(gy) / gy + 1.0) % 2.0 - 1.0
    codebook = []
    for ox in omegas_x:
        for oy in omegas_y:
            if ox * ox + oy * oy > 1.0:
                continue
            codebook.append(conjugate_beamformer(direction_from_omegas(ox, oy), cfg))
    return codebook
