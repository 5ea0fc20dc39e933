"""AoD-list encodings on a quantized angle grid, similarity, losses, metrics.

Hard encoding marks the quantizer cell of every path with 1.  Soft encoding
decays linearly away from the paths: the value of a cell is

    max(0, 1 - min_l max(d_az(cell, l), d_el(cell, l)) / (delta/2))

where d_az / d_el are the per-axis angular distances from the path to the
cell's angular interval (azimuth wraps with period 2*pi, elevation does not).
A cell whose interval contains a path is therefore exactly 1, so hard-encoded
cells always carry soft value 1.  ``delta`` is the full perturbation range in
degrees (default 10).

Channel similarity is the cosine of two flattened soft encodings, in [0, 1].
The batch losses: BCE compares predicted per-cell probabilities with the hard
encoding; the soft-contrastive loss averages (1 - 2*rho_ij) * exp(cos_ij)
over all ordered feature pairs, including i = j, so a pair with similarity
above 1/2 is rewarded for aligned features and punished otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bspace import AodList
from .geometry import Direction

BCE_EPS = 1e-12


class ZeroEncodingError(ValueError):
    """An all-zero encoding has no direction content to compare."""


@dataclass(frozen=True)
class EncodingGrid:
    """Uniform quantizer over azimuth [-pi, pi) x elevation [0, pi]."""

    theta_bins: int
    phi_bins: int

    def __post_init__(self) -> None:
        if self.theta_bins < 1 or self.phi_bins < 1:
            raise ValueError("bin counts must be >= 1")

    @property
    def theta_width(self) -> float:
        return 2.0 * math.pi / self.theta_bins

    @property
    def phi_width(self) -> float:
        return math.pi / self.phi_bins

    def quantize(self, d: Direction) -> tuple[int, int]:
        i = int((d.azimuth + math.pi) / self.theta_width)
        j = int(d.elevation / self.phi_width)
        return min(i, self.theta_bins - 1), min(j, self.phi_bins - 1)

    def theta_centers(self) -> np.ndarray:
        return -math.pi + (np.arange(self.theta_bins) + 0.5) * self.theta_width

    def phi_centers(self) -> np.ndarray:
        return (np.arange(self.phi_bins) + 0.5) * self.phi_width

    def cell_center(self, i: int, j: int) -> Direction:
        return Direction(-math.pi + (i + 0.5) * self.theta_width,
                         (j + 0.5) * self.phi_width)


@dataclass(frozen=True)
class HardEncoding:
    values: np.ndarray  # (theta_bins, phi_bins) of {0, 1}
    grid: EncodingGrid


@dataclass(frozen=True)
class SoftEncoding:
    values: np.ndarray  # (theta_bins, phi_bins) in [0, 1]
    grid: EncodingGrid
    delta_deg: float


def hard_encode(aods: AodList, grid: EncodingGrid) -> HardEncoding:
    """Binary grid with a 1 in the quantizer cell of every path."""
    values = np.zeros((grid.theta_bins, grid.phi_bins))
    for d in aods.all_directions():
        i, j = grid.quantize(d)
        values[i, j] = 1.0
    return HardEncoding(values, grid)


def _wrapped_abs(diff: np.ndarray) -> np.ndarray:
    # smallest absolute azimuth difference, period 2*pi
    return np.abs((diff + math.pi) % (2.0 * math.pi) - math.pi)


def soft_encode(aods: AodList, grid: EncodingGrid, delta_deg: float = 10.0) -> SoftEncoding:
    """Linearly decaying encoding; see module docstring for the exact rule."""
    if delta_deg <= 0:
        raise ValueError("delta_deg must be > 0")
    half = math.radians(delta_deg) / 2.0
    theta_c = grid.theta_centers()[:, None]
    phi_c = grid.phi_centers()[None, :]
    best = np.full((grid.theta_bins, grid.phi_bins), np.inf)
    for d in aods.all_directions():
        d_theta = np.maximum(_wrapped_abs(theta_c - d.azimuth) - grid.theta_width / 2.0, 0.0)
        d_phi = np.maximum(np.abs(phi_c - d.elevation) - grid.phi_width / 2.0, 0.0)
        best = np.minimum(best, np.maximum(d_theta, d_phi) / half)
    values = np.clip(1.0 - best, 0.0, 1.0)
    return SoftEncoding(values, grid, delta_deg)


@dataclass(frozen=True)
class CosineGrid:
    """Quantizer over (sin theta, cos theta, sin phi) in [-1,1] x [-1,1] x [0,1]."""

    bins: tuple[int, int, int] = (40, 40, 40)

    LOWS = (-1.0, -1.0, 0.0)
    HIGHS = (1.0, 1.0, 1.0)

    def widths(self) -> np.ndarray:
        return np.array([(h - l) / b for l, h, b in zip(self.LOWS, self.HIGHS, self.bins)])

    def quantize(self, d: Direction) -> tuple[int, int, int]:
        t = d.cosine_triplet()
        w = self.widths()
        idx = ((t - np.array(self.LOWS)) / w).astype(int)
        return tuple(int(min(i, b - 1)) for i, b in zip(idx, self.bins))

    def centers(self, axis: int) -> np.ndarray:
        w = self.widths()[axis]
        return self.LOWS[axis] + (np.arange(self.bins[axis]) + 0.5) * w


def cosine_hard_encode(aods: AodList, grid: CosineGrid) -> np.ndarray:
    """Binary grid over quantized cosine triplets."""
    values = np.zeros(grid.bins)
    for d in aods.all_directions():
        values[grid.quantize(d)] = 1.0
    return values


def cosine_soft_encode(aods: AodList, grid: CosineGrid, delta: float = 0.1) -> np.ndarray:
    """Soft cosine-triplet encoding, mirroring the angle-based linear decay.

    ``delta`` is the full per-axis range in triplet value space (no wrap).
    """
    if delta <= 0:
        raise ValueError("delta must be > 0")
    half = delta / 2.0
    w = grid.widths()
    centers = [grid.centers(a).reshape([-1 if k == a else 1 for k in range(3)])
               for a in range(3)]
    best = np.full(grid.bins, np.inf)
    for d in aods.all_directions():
        t = d.cosine_triplet()
        dist = np.zeros(grid.bins)
        for a in range(3):
            dist = np.maximum(dist, np.maximum(np.abs(centers[a] - t[a]) - w[a] / 2.0, 0.0))
        best = np.minimum(best, dist / half)
    return np.clip(1.0 - best, 0.0, 1.0)


def similarity(a: SoftEncoding | np.ndarray, b: SoftEncoding | np.ndarray) -> float:
    """Cosine similarity of two flattened soft encodings, in [0, 1]."""
    va = (a.values if isinstance(a, SoftEncoding) else np.asarray(a)).reshape(-1)
    vb = (b.values if isinstance(b, SoftEncoding) else np.asarray(b)).reshape(-1)
    na = np.linalg.norm(va)
    nb = np.linalg.norm(vb)
    if na == 0.0 or nb == 0.0:
        raise ZeroEncodingError("cannot compare an all-zero encoding")
    return float(va @ vb / (na * nb))


def bce_loss(preds: list[np.ndarray], truths: list[HardEncoding | np.ndarray]) -> float:
    """Mean over the batch of the per-cell binary cross entropy sums.

    Probabilities are clamped to [BCE_EPS, 1 - BCE_EPS] to keep the logs
    finite at hard 0/1 predictions.
    """
    if len(preds) != len(truths):
        raise ValueError(f"batch size mismatch: {len(preds)} vs {len(truths)}")
    if not preds:
        raise ValueError("empty batch")
    total = 0.0
    for p, t in zip(preds, truths):
        y = t.values if isinstance(t, HardEncoding) else np.asarray(t, dtype=float)
        p = np.clip(np.asarray(p, dtype=float), BCE_EPS, 1.0 - BCE_EPS)
        if p.shape != y.shape:
            raise ValueError(f"shape mismatch: {p.shape} vs {y.shape}")
        total += -float(np.sum(y * np.log(p) + (1.0 - y) * np.log(1.0 - p)))
    return total / len(preds)


def sscl_loss(features: list[np.ndarray], softs: list[SoftEncoding | np.ndarray]) -> float:
    """Soft-contrastive batch loss (1/B^2) sum_ij (1 - 2 rho_ij) exp(cos_ij).

    The double sum runs over all ordered pairs including i = j; each diagonal
    term contributes the constant -e.  Feature vectors must have nonzero norm.
    """
    if len(features) != len(softs):
        raise ValueError(f"batch size mismatch: {len(features)} vs {len(softs)}")
    if not features:
        raise ValueError("empty batch")
    feats = np.stack([np.asarray(f, dtype=float).reshape(-1) for f in features])
    norms = np.linalg.norm(feats, axis=1)
    if np.any(norms == 0.0):
        raise ZeroEncodingError("feature vectors must have nonzero norm")
    feats = feats / norms[:, None]
    cos = feats @ feats.T

    encs = np.stack([(s.values if isinstance(s, SoftEncoding) else np.asarray(s)).reshape(-1)
                     for s in softs])
    enc_norms = np.linalg.norm(encs, axis=1)
    if np.any(enc_norms == 0.0):
        raise ZeroEncodingError("cannot compare an all-zero encoding")
    encs = encs / enc_norms[:, None]
    rho = encs @ encs.T

    b = len(features)
    return float(np.sum((1.0 - 2.0 * rho) * np.exp(cos)) / (b * b))


def decode_predictions(pred: np.ndarray, grid: EncodingGrid) -> AodList:
    """Directions of all cells with probability strictly above 0.5.

    The result is a single cluster of cell-center directions (the predictor
    carries no cluster identity); it is empty when nothing crosses threshold.
    """
    pred = np.asarray(pred, dtype=float)
    if pred.shape != (grid.theta_bins, grid.phi_bins):
        raise ValueError(f"prediction shape {pred.shape} does not match grid")
    hits = [grid.cell_center(i, j) for i, j in zip(*np.nonzero(pred > 0.5))]
    if not hits:
        return AodList(())
    return AodList((tuple(hits),))


def _nearest_truth(pred: Direction, truths: list[Direction]) -> Direction:
    units = np.stack([t.unit_vector() for t in truths])
    dots = units @ pred.unit_vector()
    return truths[int(np.argmax(dots))]


def _angle_between(u: np.ndarray, v: np.ndarray) -> float:
    # arccos(u . v) evaluated as atan2(|u x v|, u . v): identical function,
    # but exact at coincident vectors where arccos is ill-conditioned
    return math.atan2(float(np.linalg.norm(np.cross(u, v))), float(u @ v))


def mad_metric(pred: AodList, truth: AodList) -> float:
    """Mean angular distance (degrees) from each prediction to its nearest truth."""
    preds = pred.all_directions()
    truths = truth.all_directions()
    if not preds or not truths:
        raise ValueError("MAD needs a nonempty prediction and truth")
    total = 0.0
    for p in preds:
        n = _nearest_truth(p, truths)
        total += math.degrees(_angle_between(p.unit_vector(), n.unit_vector()))
    return total / len(preds)


def mae_cosines(pred: AodList, truth: AodList) -> float:
    """Mean L1 distance between cosine triplets, paired as in :func:`mad_metric`."""
    preds = pred.all_directions()
    truths = truth.all_directions()
    if not preds or not truths:
        raise ValueError("MAE needs a nonempty prediction and truth")
    total = 0.0
    for p in preds:
        n = _nearest_truth(p, truths)
        total += float(np.sum(np.abs(p.cosine_triplet() - n.cosine_triplet())))
    return total / len(preds)
