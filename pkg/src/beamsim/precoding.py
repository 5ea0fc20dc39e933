"""Two-phase MU beamforming: residual-beamspace RF selection, then RZF.

Phase 1 walks the users in ascending order of predicted path count (the
caller sorts; ties break on UE id).  Each user's residual beamspace is its
own estimate minus the estimated beamspaces of all earlier users; the RF
column is the conjugate array response at the residual's peak.  Peak search
skips cells already claimed by earlier users, so every transmission
direction serves at most one user.  A residual with no positive cell falls
back to the user's own beamspace peak over the still-unclaimed cells.

Phase 2 estimates the effective (RF-combined) channels, optionally through
pilot noise, and solves the regularized zero-forcing system

    f_u[k] ~ (sum_u' conj(h_u'[k]) h_u'[k]^T + I)^{-1} conj(h_u[k])

with unit-norm columns.  The fully digital full-CSI baseline applies the
same solve on the raw antenna-domain channels; the beam-prediction baseline
picks each user's best DFT codeword independently (no interference
awareness) and reuses phase 2 unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bspace import AngleGrid, Beamspace, DegenerateResidualError, peak_index
from .geometry import ArrayConfig, Direction, conjugate_beamformer, vectorize


@dataclass(frozen=True)
class LinkConfig:
    tx_power_w: float
    noise_power_w: float
    num_streams: int
    num_rf: int

    def __post_init__(self) -> None:
        if self.tx_power_w <= 0 or self.noise_power_w <= 0:
            raise ValueError("powers must be > 0")
        if self.num_streams != self.num_rf:
            raise ValueError("this system serves one stream per RF chain")


@dataclass(frozen=True)
class RfPrecoder:
    """Frequency-flat analog precoder, one constant-modulus column per RF chain."""

    columns: np.ndarray  # (n_x*n_y, num_rf)
    directions: tuple[Direction, ...] = ()
    cells: tuple[tuple[int, int], ...] = ()


@dataclass(frozen=True)
class DigitalPrecoder:
    per_subcarrier: np.ndarray  # (K, n_in, num_streams), unit-norm columns


@dataclass(frozen=True)
class EffectiveChannelEstimate:
    """rows[u, k] is the estimated effective row channel h_u^T[k] F_RF."""

    rows: np.ndarray  # (U, K, num_rf)
    estimation_snr_db: float | None  # None = noiseless


def residual_beamspaces(beamspaces: list[Beamspace],
                        subtract_residuals: bool = False) -> list[np.ndarray]:
    """Residual matrices G_i - sum_{j<i} G_j for the pre-sorted user list.

    Default subtracts the *estimated* beamspaces of earlier users (the
    pseudocode rule); ``subtract_residuals=True`` subtracts their residuals
    instead.  Residual entries may be negative.
    """
    _check_common_grid(beamspaces)
    residuals: list[np.ndarray] = []
    acc = np.zeros_like(beamspaces[0].values)
    for b in beamspaces:
        res = b.values - acc
        residuals.append(res)
        acc = acc + (res if subtract_residuals else b.values)
    return residuals


def _check_common_grid(beamspaces: list[Beamspace]) -> AngleGrid:
    if not beamspaces:
        raise ValueError("need at least one beamspace")
    grid = beamspaces[0].grid
    for b in beamspaces[1:]:
        if b.grid != grid:
            raise ValueError("beamspaces must share one grid")
    return grid


def select_rf_precoders(beamspaces: list[Beamspace], arr: ArrayConfig,
                        subtract_residuals: bool = False) -> RfPrecoder:
    """Phase-1 RF precoder from the users' (estimated) beamspaces.

    The input order is the serving order: ascending predicted path count,
    ties by UE id.  Consumes only beamspaces, so any two channels with the
    same AoD-list map to bit-identical precoders.
    """
    grid = _check_common_grid(beamspaces)
    residuals = residual_beamspaces(beamspaces, subtract_residuals)
    taken: set[tuple[int, int]] = set()
    columns = []
    directions = []
    cells = []
    for b, res in zip(beamspaces, residuals):
        try:
            cell = peak_index(res, exclude=taken)
        except DegenerateResidualError:
            # nothing left above the earlier users: take the strongest
            # unclaimed cell of the user's own beamspace
            cell = peak_index(b.values, exclude=taken)
        taken.add(cell)
        d = grid.direction(*cell)
        columns.append(conjugate_beamformer(d, arr))
        directions.append(d)
        cells.append(cell)
    return RfPrecoder(np.stack(columns, axis=1), tuple(directions), tuple(cells))


def _vectorized_rows(channels: list[np.ndarray]) -> np.ndarray:
    # (U, K, n_y*n_x); row-major vectorization of each per-subcarrier matrix
    return np.stack([np.stack([vectorize(hk) for hk in h]) for h in channels])


def estimate_effective_channels(channels: list[np.ndarray], f_rf: RfPrecoder,
                                link: LinkConfig,
                                estimation_snr_db: float | None = None,
                                seed: int = 0) -> EffectiveChannelEstimate:
    """Pilot-based effective channel rows h_u^T[k] F_RF, optionally noisy.

    ``estimation_snr_db`` sets the per-entry circular complex Gaussian noise
    variance relative to the per-subcarrier received pilot power; None or
    +inf gives the exact products.
    """
    h_rows = _vectorized_rows(channels)  # (U, K, N)
    rows = h_rows @ f_rf.columns  # (U, K, num_rf)
    if estimation_snr_db is not None and not np.isinf(estimation_snr_db):
        rng = np.random.default_rng(seed)
        snr = 10.0 ** (estimation_snr_db / 10.0)
        # per-(u,k) pilot power averaged over RF chains
        power = np.mean(np.abs(rows) ** 2, axis=2, keepdims=True)
        std = np.sqrt(power / snr / 2.0)
        noise = std * (rng.standard_normal(rows.shape) + 1j * rng.standard_normal(rows.shape))
        rows = rows + noise
    return EffectiveChannelEstimate(rows, estimation_snr_db)


def _rzf_columns(h_rows: np.ndarray) -> np.ndarray:
    """Unit-norm RZF columns for one subcarrier given stacked rows (U, n)."""
    u, n = h_rows.shape
    if n <= u:
        gram = h_rows.conj().T @ h_rows + np.eye(n)  # (n, n)
        cols = np.linalg.solve(gram, h_rows.conj().T)
    else:
        # (I_n + H^H H)^{-1} H^H == H^H (I_u + H H^H)^{-1}; keeps the solve u x u
        small = h_rows @ h_rows.conj().T + np.eye(u)
        cols = h_rows.conj().T @ np.linalg.inv(small)
    if not np.all(np.isfinite(cols)):
        raise ValueError("RZF solve produced non-finite columns")
    norms = np.linalg.norm(cols, axis=0)
    if np.any(norms == 0.0):
        raise ValueError("RZF produced a zero column (all-zero effective channel)")
    return cols / norms


def rzf_precoder(est: EffectiveChannelEstimate) -> DigitalPrecoder:
    """Per-subcarrier regularized zero-forcing on the effective channels."""
    u, k_count, n_rf = est.rows.shape
    out = np.empty((k_count, n_rf, u), dtype=complex)
    for k in range(k_count):
        out[k] = _rzf_columns(est.rows[:, k, :])
    return DigitalPrecoder(out)


def full_csi_baseline(channels: list[np.ndarray], link: LinkConfig) -> DigitalPrecoder:
    """Fully digital RZF with exact channel knowledge (identity RF stage)."""
    h_rows = _vectorized_rows(channels)  # (U, K, N)
    u, k_count, n = h_rows.shape
    out = np.empty((k_count, n, u), dtype=complex)
    for k in range(k_count):
        out[k] = _rzf_columns(h_rows[:, k, :])
    return DigitalPrecoder(out)


def beam_prediction_baseline(channels: list[np.ndarray], codebook: list[np.ndarray],
                             link: LinkConfig,
                             estimation_snr_db: float | None = None,
                             seed: int = 0) -> tuple[RfPrecoder, DigitalPrecoder]:
    """Per-user best DFT codeword (ideal single-user predictor), then phase 2.

    Each user independently gets the codeword maximizing its wideband power
    sum_k |h_u^T[k] w|^2; ties break toward the lowest codebook index.
    Inter-user interference is ignored by construction.
    """
    if not codebook:
        raise ValueError("codebook must be nonempty")
    h_rows = _vectorized_rows(channels)  # (U, K, N)
    book = np.stack(codebook, axis=1)  # (N, W)
    scores = np.sum(np.abs(h_rows @ book) ** 2, axis=1)  # (U, W)
    picks = np.argmax(scores, axis=1)
    f_rf = RfPrecoder(book[:, picks])
    est = estimate_effective_channels(channels, f_rf, link, estimation_snr_db, seed)
    return f_rf, rzf_precoder(est)
