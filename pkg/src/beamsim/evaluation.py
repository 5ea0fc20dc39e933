"""Sum-SE evaluation: per-user SE, user-cluster protocol, EIRP sweeps.

The achievable SE of user u averages log2(1 + SINR) over subcarriers with

    SINR_u[k] = (P/N_S) |h_u^T[k] F_RF f_u[k]|^2
                / (sigma^2 + (P/N_S) sum_{u' != u} |h_u^T[k] F_RF f_u'[k]|^2)

and always uses the TRUE channels; estimates only shape the precoders.

A sweep evaluates, per trial and EIRP point, every size-U combination of
UEs ("user-cluster") under each strategy, keeps for each UE the cluster
where it attains its best individual SE, and aggregates median / 25th /
75th-percentile sum-SE over those selected clusters across trials.  EIRP
maps to transmit power through the coherent array gain,
P_dBm = EIRP_dBm - 10 log10(n_x * n_y); the default noise budget is thermal
(-174 dBm/Hz) over the occupied bandwidth plus a noise figure.

Trial seeds derive from the root seed via the documented splitting rule
``SeedSequence((root, namespace, *indices))`` so results are independent of
scheduling and thread count.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .bspace import AngleGrid, AodList, Beamspace, compute_beamspace, truncate_paths
from .channel import OfdmConfig, ScenarioConfig, UeChannel, frequency_response
from .geometry import ArrayConfig, Direction, dft_codebook, vectorize
from .precoding import (DigitalPrecoder, LinkConfig, RfPrecoder,
                        beam_prediction_baseline, estimate_effective_channels,
                        full_csi_baseline, rzf_precoder, select_rf_precoders)

STRATEGIES = ("algorithm1", "ground_truth_beamspace", "beam_prediction", "full_csi")

# seed-derivation namespaces (see module docstring)
_NS_SCENARIO = 1
_NS_PERTURB = 2
_NS_PILOT = 3


def _derive_seed(root: int, namespace: int, *indices: int) -> int:
    return int(np.random.SeedSequence((root, namespace) + tuple(indices)).generate_state(1)[0])


def user_se(h: np.ndarray, f_rf: RfPrecoder | None, f_bb: DigitalPrecoder,
            link: LinkConfig, u: int) -> float:
    """Achievable SE of user u in bps/Hz given its true per-subcarrier channel."""
    return per_user_se([h], f_rf, f_bb, link, users=[u])[0]


def per_user_se(channels: list[np.ndarray], f_rf: RfPrecoder | None,
                f_bb: DigitalPrecoder, link: LinkConfig,
                users: list[int] | None = None) -> list[float]:
    """SE of each listed user; ``users`` defaults to 0..len(channels)-1.

    ``channels[i]`` is the true response of the UE occupying stream
    ``users[i]``.
    """
    if users is None:
        users = list(range(len(channels)))
    p_s = link.tx_power_w / link.num_streams
    out = []
    for h, u in zip(channels, users):
        rows = np.stack([vectorize(hk) for hk in h])  # (K, N)
        eff = rows @ f_rf.columns if f_rf is not None else rows  # (K, n_in)
        if eff.shape[1] != f_bb.per_subcarrier.shape[1]:
            raise ValueError("RF output dimension does not match digital precoder")
        gains = np.abs(np.einsum("ki,kiu->ku", eff, f_bb.per_subcarrier)) ** 2
        signal = p_s * gains[:, u]
        interference = p_s * (gains.sum(axis=1) - gains[:, u])
        sinr = signal / (link.noise_power_w + interference)
        out.append(float(np.mean(np.log2(1.0 + sinr))))
    return out


def sum_se(per_user: list[float]) -> float:
    return float(sum(per_user))


@dataclass(frozen=True)
class EstimatorErrorModel:
    """Synthetic stand-in for an AoD estimator's error statistics."""

    angular_std_deg: float = 0.0
    miss_probability: float = 0.0
    false_path_rate: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.angular_std_deg < 0 or self.false_path_rate < 0:
            raise ValueError("angular_std_deg and false_path_rate must be >= 0")
        if not 0.0 <= self.miss_probability <= 1.0:
            raise ValueError("miss_probability must lie in [0, 1]")


def perturb_beamspace_estimate(truth: AodList, model: EstimatorErrorModel) -> AodList:
    """Degrade a ground-truth AoD-list per the error model, deterministically.

    Paths drop independently with ``miss_probability``; survivors get i.i.d.
    Gaussian azimuth/elevation offsets of ``angular_std_deg`` (elevation
    clamped to [0, pi]); Poisson(``false_path_rate``) spurious paths uniform
    over the hemisphere join as one extra cluster.
    """
    rng = np.random.default_rng(model.seed)
    std = math.radians(model.angular_std_deg)
    clusters: list[tuple[Direction, ...]] = []
    for cluster in truth.clusters:
        kept = []
        for d in cluster:
            if rng.uniform() < model.miss_probability:
                continue
            azimuth = d.azimuth + rng.normal(0.0, std) if std > 0 else d.azimuth
            elevation = d.elevation + rng.normal(0.0, std) if std > 0 else d.elevation
            kept.append(Direction(azimuth, min(max(elevation, 0.0), math.pi)))
        if kept:
            clusters.append(tuple(kept))
    n_false = int(rng.poisson(model.false_path_rate)) if model.false_path_rate > 0 else 0
    if n_false:
        spurious = tuple(
            Direction(rng.uniform(-math.pi, math.pi), math.acos(rng.uniform(0.0, 1.0)))
            for _ in range(n_false))
        clusters.append(spurious)
    return AodList(tuple(clusters))


def enumerate_user_clusters(ue_ids: list[int], size: int) -> list[tuple[int, ...]]:
    """All size-U combinations in lexicographic order."""
    if size > len(ue_ids):
        raise ValueError(f"cannot pick {size} users out of {len(ue_ids)}")
    return list(itertools.combinations(ue_ids, size))


def select_best_clusters(table: dict[tuple[int, ...], dict[int, float]]) -> list[tuple[int, ...]]:
    """Per-UE argmax clusters, deduplicated and sorted.

    For every UE that appears in the table, pick the cluster where it gets
    its highest individual SE (ties toward the lexicographically smallest
    cluster); return the union.
    """
    if not table:
        raise ValueError("empty cluster table")
    best: dict[int, tuple[int, ...]] = {}
    for cluster in sorted(table):
        for ue, se in table[cluster].items():
            if ue not in best or se > table[best[ue]][ue]:
                best[ue] = cluster
    return sorted(set(best.values()))


def overhead_report(n_rf: int, subcarrier_spacing_hz: float = 120e3) -> dict:
    """Beam-training overhead bookkeeping vs. a 64-SSB exhaustive sweep."""
    if n_rf < 1:
        raise ValueError("n_rf must be >= 1")
    symbol_ms = 1e3 / subcarrier_spacing_hz
    return {
        "ssb_ms": 5.0 / 64.0,
        "symbol_ms": symbol_ms,
        "preamble_ms": n_rf * symbol_ms,
        "reduction_factor": 64,
    }


@dataclass(frozen=True)
class SweepConfig:
    eirp_dbm: tuple[float, ...]
    strategies: tuple[str, ...]
    scenario: ScenarioConfig
    ofdm: OfdmConfig
    array: ArrayConfig
    users_per_cluster: int
    beamspace_grid: AngleGrid
    trials: int = 1
    truncation_budget: int = 25
    noise_power_dbm: float | None = None  # None: thermal + noise figure
    noise_figure_db: float = 7.0
    estimation_snr_offset_db: float = 10.0  # pilot SNR above per-stream data SNR
    estimator: str = "ground_truth"  # ground_truth | perturbed:<std_deg> | file:<path>
    dft_oversampling: int = 1
    subtract_residuals: bool = False

    def __post_init__(self) -> None:
        if not self.eirp_dbm or not self.strategies:
            raise ValueError("eirp grid and strategies must be nonempty")
        unknown = set(self.strategies) - set(STRATEGIES)
        if unknown:
            raise ValueError(f"unknown strategies: {sorted(unknown)}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.users_per_cluster > self.scenario.num_ues:
            raise ValueError("users_per_cluster cannot exceed num_ues")
        kind = self.estimator.split(":", 1)[0]
        if kind not in ("ground_truth", "perturbed", "file"):
            raise ValueError(f"unknown estimator {self.estimator!r}")

    def noise_w(self) -> float:
        if self.noise_power_dbm is not None:
            dbm = self.noise_power_dbm
        else:
            bandwidth = self.ofdm.num_subcarriers * self.ofdm.subcarrier_spacing_hz
            dbm = -174.0 + 10.0 * math.log10(bandwidth) + self.noise_figure_db
        return 10.0 ** ((dbm - 30.0) / 10.0)

    def tx_power_w(self, eirp_dbm: float) -> float:
        p_dbm = eirp_dbm - 10.0 * math.log10(self.array.size)
        return 10.0 ** ((p_dbm - 30.0) / 10.0)


@dataclass(frozen=True)
class SeRecord:
    strategy: str
    eirp_dbm: float
    trial: int
    cluster_id: str
    ue_id: int
    se_bps_hz: float
    sum_se_bps_hz: float


@dataclass(frozen=True)
class SummaryRow:
    strategy: str
    eirp_dbm: float
    median: float
    p25: float
    p75: float
    n_clusters: int


@dataclass(frozen=True)
class SweepReport:
    rows: tuple[SummaryRow, ...]
    records: tuple[SeRecord, ...]
    trials: int


def _cluster_id(cluster: tuple[int, ...]) -> str:
    return "-".join(str(u) for u in cluster)


def _order_by_path_count(aods: dict[int, AodList], cluster: tuple[int, ...]) -> list[int]:
    # Alg-1 serving order: ascending predicted path count, ties by UE id
    return sorted(cluster, key=lambda ue: (aods[ue].num_paths, ue))


class _FilePredictions:
    """Stage-II injections keyed by (trial, ue_id): AoD-lists or beamspaces."""

    def __init__(self, aod_lists: dict[tuple[int, int], AodList],
                 beamspaces: dict[tuple[int, int], Beamspace]):
        self.aod_lists = aod_lists
        self.beamspaces = beamspaces

    def estimate(self, trial: int, ue_id: int, grid: AngleGrid,
                 arr: ArrayConfig) -> tuple[AodList, Beamspace]:
        key = (trial, ue_id)
        if key not in self.aod_lists and key not in self.beamspaces:
            raise KeyError(f"prediction file has no entry for trial {trial}, ue {ue_id}")
        aods = self.aod_lists.get(key, AodList(()))
        if key in self.beamspaces:
            return aods, self.beamspaces[key]
        return aods, compute_beamspace(aods, grid, arr)


def _trial_records(cfg: SweepConfig, trial: int,
                   scenario: list[UeChannel],
                   predictions: _FilePredictions | None) -> list[SeRecord]:
    arr = cfg.array
    grid = cfg.beamspace_grid
    link_proto = dict(num_streams=cfg.users_per_cluster, num_rf=cfg.users_per_cluster)
    noise_w = cfg.noise_w()

    channels = {ch.ue_id: frequency_response(ch, cfg.ofdm, arr) for ch in scenario}
    truth_aods = {ch.ue_id: truncate_paths(ch, cfg.truncation_budget) for ch in scenario}

    est_kind, _, est_arg = cfg.estimator.partition(":")
    est_aods: dict[int, AodList] = {}
    est_bspaces: dict[int, Beamspace] = {}
    for ue_id, truth in truth_aods.items():
        if est_kind == "ground_truth":
            est_aods[ue_id] = truth
        elif est_kind == "perturbed":
            model = EstimatorErrorModel(
                angular_std_deg=float(est_arg),
                seed=_derive_seed(cfg.scenario.rng_seed, _NS_PERTURB, trial, ue_id))
            est_aods[ue_id] = perturb_beamspace_estimate(truth, model)
        else:  # file
            est_aods[ue_id], est_bspaces[ue_id] = predictions.estimate(trial, ue_id, grid, arr)
        if ue_id not in est_bspaces:
            est_bspaces[ue_id] = compute_beamspace(est_aods[ue_id], grid, arr)
    truth_bspaces = {ue: compute_beamspace(aods, grid, arr) for ue, aods in truth_aods.items()}

    codebook = None
    if "beam_prediction" in cfg.strategies:
        codebook = dft_codebook(arr, cfg.dft_oversampling)

    clusters = enumerate_user_clusters(sorted(channels), cfg.users_per_cluster)
    strategies = [s for s in STRATEGIES if s in cfg.strategies]

    records: list[SeRecord] = []
    for e_i, eirp in enumerate(cfg.eirp_dbm):
        link = LinkConfig(tx_power_w=cfg.tx_power_w(eirp), noise_power_w=noise_w, **link_proto)
        est_snr_db = (10.0 * math.log10(link.tx_power_w / link.num_streams / noise_w)
                      + cfg.estimation_snr_offset_db)
        for s_i, strategy in enumerate(strategies):
            table: dict[tuple[int, ...], dict[int, float]] = {}
            cluster_rates: dict[tuple[int, ...], list[float]] = {}
            for c_i, cluster in enumerate(clusters):
                pilot_seed = _derive_seed(cfg.scenario.rng_seed, _NS_PILOT,
                                          trial, e_i, s_i, c_i)
                if strategy == "full_csi":
                    order = list(cluster)
                    ch_list = [channels[ue] for ue in order]
                    f_rf = None
                    f_bb = full_csi_baseline(ch_list, link)
                elif strategy == "beam_prediction":
                    order = list(cluster)
                    ch_list = [channels[ue] for ue in order]
                    f_rf, f_bb = beam_prediction_baseline(
                        ch_list, codebook, link, est_snr_db, pilot_seed)
                else:
                    aods = est_aods if strategy == "algorithm1" else truth_aods
                    bspaces = est_bspaces if strategy == "algorithm1" else truth_bspaces
                    order = _order_by_path_count(aods, cluster)
                    ch_list = [channels[ue] for ue in order]
                    f_rf = select_rf_precoders([bspaces[ue] for ue in order], arr,
                                               cfg.subtract_residuals)
                    est = estimate_effective_channels(ch_list, f_rf, link,
                                                      est_snr_db, pilot_seed)
                    f_bb = rzf_precoder(est)
                rates = per_user_se(ch_list, f_rf, f_bb, link)
                table[cluster] = dict(zip(order, rates))
                cluster_rates[cluster] = rates
            selected = set(select_best_clusters(table))
            for cluster in clusters:
                if cluster not in selected:
                    continue
                total = sum_se(cluster_rates[cluster])
                for ue in cluster:
                    records.append(SeRecord(strategy, eirp, trial, _cluster_id(cluster),
                                            ue, table[cluster][ue], total))
    return records


def run_sweep(cfg: SweepConfig, scenarios: list[list[UeChannel]] | None = None,
              predictions: _FilePredictions | None = None,
              threads: int = 1) -> SweepReport:
    """Monte Carlo EIRP sweep; deterministic for a fixed config at any thread count.

    ``scenarios`` overrides generation (one list of UE channels per trial);
    required together with ``predictions`` for the ``file:`` estimator.
    """
    if cfg.estimator.startswith("file") and predictions is None:
        raise ValueError("file estimator needs a predictions object")
    if scenarios is None:
        scenarios = [
            generate_trial_scenario(cfg.scenario, trial) for trial in range(cfg.trials)
        ]
    trial_ids = list(range(len(scenarios)))

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            per_trial = list(pool.map(
                lambda t: _trial_records(cfg, t, scenarios[t], predictions), trial_ids))
    else:
        per_trial = [_trial_records(cfg, t, scenarios[t], predictions) for t in trial_ids]

    records = tuple(rec for trial in per_trial for rec in trial)
    rows = []
    for strategy in [s for s in STRATEGIES if s in cfg.strategies]:
        for eirp in cfg.eirp_dbm:
            sums = sorted({(r.trial, r.cluster_id): r.sum_se_bps_hz for r in records
                           if r.strategy == strategy and r.eirp_dbm == eirp}.items())
            values = np.array([v for _, v in sums])
            rows.append(SummaryRow(
                strategy, eirp,
                median=float(np.percentile(values, 50)),
                p25=float(np.percentile(values, 25)),
                p75=float(np.percentile(values, 75)),
                n_clusters=len(values)))
    return SweepReport(tuple(rows), records, trials=len(scenarios))


def generate_trial_scenario(base: ScenarioConfig, trial: int) -> list[UeChannel]:
    """Scenario of one trial under the documented seed-splitting rule."""
    from .channel import generate_scenario
    seed = _derive_seed(base.rng_seed, _NS_SCENARIO, trial)
    return generate_scenario(replace(base, rng_seed=seed))
