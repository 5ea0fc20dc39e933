"""Clustered geometric wideband channels and their OFDM frequency response.

A channel is a list of ray clusters, each a list of paths with complex gain,
delay and departure direction.  The frequency response over K subcarriers is

    H[k] = sum_d sum_c sum_l  gain * p(d*T_s - delay) * A(theta, phi)
                              * exp(-j 2 pi d k / K)

with the tap index d running over ``first_tap .. first_tap + num_taps - 1``
and p(.) a raised-cosine Nyquist pulse.  Subcarriers are indexed by the
symmetric set {-floor((K-1)/2), ..., ceil((K-1)/2)} mapped to storage index
k mod K; because the taps d are integers the phase factor is unchanged by
this mapping, so storage index i simply uses exp(-j 2 pi d i / K).

Note on ``first_tap``: the tap sum conventionally starts at d = 1, so a path
with delay exactly 0 contributes nothing under a Nyquist pulse (p(T_s) = 0).
Scenario generation therefore offsets delays by ``delay_offset_s`` (presets
set it to T_s) so path energy lands inside the tap window.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import ArrayConfig, Direction, array_response, wrap_azimuth


@dataclass(frozen=True)
class PathComponent:
    gain: complex
    delay: float  # seconds, >= 0
    direction: Direction

    def __post_init__(self) -> None:
        if self.delay < 0:
            raise ValueError(f"path delay must be >= 0, got {self.delay}")


@dataclass(frozen=True)
class RayCluster:
    paths: tuple[PathComponent, ...]

    def __post_init__(self) -> None:
        if len(self.paths) == 0:
            raise ValueError("a ray cluster needs at least one path")
        object.__setattr__(self, "paths", tuple(self.paths))


@dataclass(frozen=True)
class UeChannel:
    """All multipath clusters of one UE during one time slot."""

    clusters: tuple[RayCluster, ...]
    ue_id: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "clusters", tuple(self.clusters))
        if sum(len(c.paths) for c in self.clusters) < 1:
            raise ValueError("channel must contain at least one path")

    def all_paths(self) -> list[PathComponent]:
        return [p for c in self.clusters for p in c.paths]


@dataclass(frozen=True)
class OfdmConfig:
    num_subcarriers: int
    subcarrier_spacing_hz: float
    num_taps: int
    sample_period_s: float
    pulse_rolloff: float = 0.25
    first_tap: int = 1  # d starts here; 0 makes a delay-0 path hit p(0) = 1

    def __post_init__(self) -> None:
        if self.num_subcarriers < 1 or self.num_taps < 1:
            raise ValueError("num_subcarriers and num_taps must be >= 1")
        if self.sample_period_s <= 0:
            raise ValueError("sample_period_s must be > 0")
        if not 0.0 <= self.pulse_rolloff <= 1.0:
            raise ValueError("pulse_rolloff must lie in [0, 1]")


def pulse(t: float, ofdm: OfdmConfig) -> float:
    """Raised-cosine Nyquist pulse: pulse(0) = 1, pulse(m*T_s) = 0 for m != 0."""
    ts = ofdm.sample_period_s
    beta = ofdm.pulse_rolloff
    x = t / ts
    if beta > 0 and abs(abs(x) - 1.0 / (2.0 * beta)) < 1e-9:
        # removable singularity of the closed form
        return float(math.pi / 4.0 * np.sinc(1.0 / (2.0 * beta)))
    denom = 1.0 - (2.0 * beta * x) ** 2
    return float(np.sinc(x) * math.cos(math.pi * beta * x) / denom)


def frequency_response(ch: UeChannel, ofdm: OfdmConfig, arr: ArrayConfig) -> np.ndarray:
    """Per-subcarrier channel matrices, shape (K, n_y, n_x).

    Raises ValueError if any path delay falls outside the tap window
    [0, num_taps * T_s).
    """
    ts = ofdm.sample_period_s
    window = ofdm.num_taps * ts
    k_count = ofdm.num_subcarriers
    taps = np.arange(ofdm.first_tap, ofdm.first_tap + ofdm.num_taps)

    out = np.zeros((k_count, arr.n_y, arr.n_x), dtype=complex)
    # phase[d, k] = exp(-j 2 pi d k / K) for storage index k
    phase = np.exp(-2j * math.pi * np.outer(taps, np.arange(k_count)) / k_count)
    for cluster in ch.clusters:
        for p in cluster.paths:
            if p.delay >= window:
                raise ValueError(
                    f"path delay {p.delay:.3e}s exceeds the tap window {window:.3e}s"
                )
            weights = np.array([p.gain * pulse(d * ts - p.delay, ofdm) for d in taps])
            coeff = weights @ phase  # shape (K,)
            out += coeff[:, None, None] * array_response(p.direction, arr)[None, :, :]
    return out


@dataclass(frozen=True)
class ScenarioConfig:
    """Synthetic multi-UE scene parameters (stand-in for ray-traced data)."""

    num_ues: int
    cluster_count_range: tuple[int, int] = (1, 3)
    paths_per_cluster_range: tuple[int, int] = (1, 4)
    angle_spread_per_cluster: float = math.radians(5.0)  # radians, full width
    delay_spread_s: float = 100e-9
    shared_cluster_probability: float = 0.0
    rng_seed: int = 0
    delay_offset_s: float = 0.0  # presets set this to T_s, see module docstring
    cluster_power_decay: float = 1.0  # gain std of cluster c scales by decay**c

    def __post_init__(self) -> None:
        lo, hi = self.cluster_count_range
        plo, phi = self.paths_per_cluster_range
        if self.num_ues < 1:
            raise ValueError("num_ues must be >= 1")
        if lo < 1 or hi < lo or plo < 1 or phi < plo:
            raise ValueError("cluster/path count ranges must be nonempty and >= 1")
        if not 0.0 <= self.shared_cluster_probability <= 1.0:
            raise ValueError("shared_cluster_probability must lie in [0, 1]")


def _uniform_hemisphere(rng: np.random.Generator) -> Direction:
    # uniform over solid angle on the broadside (upper) hemisphere
    azimuth = rng.uniform(-math.pi, math.pi)
    elevation = math.acos(rng.uniform(0.0, 1.0))
    return Direction(azimuth, elevation)


def generate_scenario(cfg: ScenarioConfig) -> list[UeChannel]:
    """Draw a deterministic multi-UE scene from the config seed.

    Cluster centroids are uniform over the upper hemisphere; with probability
    ``shared_cluster_probability`` a centroid of UE u > 0 is reused from an
    earlier UE, creating the inter-user overlap the MU algorithm must resolve.
    Per-path offsets are uniform within +/- angle_spread/2 on each axis,
    gains are complex Gaussian, delays uniform in
    [delay_offset_s, delay_offset_s + delay_spread_s].
    """
    rng = np.random.default_rng(cfg.rng_seed)
    c_lo, c_hi = cfg.cluster_count_range
    p_lo, p_hi = cfg.paths_per_cluster_range
    half_spread = cfg.angle_spread_per_cluster / 2.0

    ues: list[UeChannel] = []
    earlier_centroids: list[Direction] = []  # from UEs already generated
    for ue_id in range(cfg.num_ues):
        n_clusters = int(rng.integers(c_lo, c_hi + 1))
        clusters = []
        own_centroids = []
        for c in range(n_clusters):
            if earlier_centroids and rng.uniform() < cfg.shared_cluster_probability:
                centroid = earlier_centroids[int(rng.integers(len(earlier_centroids)))]
            else:
                centroid = _uniform_hemisphere(rng)
            own_centroids.append(centroid)
            n_paths = int(rng.integers(p_lo, p_hi + 1))
            gain_scale = cfg.cluster_power_decay ** c
            paths = []
            for _ in range(n_paths):
                azimuth = wrap_azimuth(centroid.azimuth + rng.uniform(-half_spread, half_spread))
                elevation = min(max(centroid.elevation + rng.uniform(-half_spread, half_spread), 0.0), math.pi)
                gain = gain_scale * (rng.normal() + 1j * rng.normal()) / math.sqrt(2.0)
                delay = cfg.delay_offset_s + rng.uniform(0.0, cfg.delay_spread_s)
                paths.append(PathComponent(complex(gain), float(delay), Direction(azimuth, elevation)))
            clusters.append(RayCluster(tuple(paths)))
        ues.append(UeChannel(tuple(clusters), ue_id))
        earlier_centroids.extend(own_centroids)
    return ues
