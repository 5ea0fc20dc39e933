"""Dataset assembly and the training loop (BCE + contrastive, equal weights).

Adam starts at the reference learning rate 1e-4; when the total training
loss has not improved for 10 consecutive epochs the rate decays by 0.99.
Training aborts with a diagnostic on a non-finite loss.  ``history["total"]``
index 0 is the pre-training loss evaluated on the full dataset, so external
loss checks can compare against epoch 0 exactly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch

from .losses import bce_sum, similarity_matrix, sscl
from .model import FusionModel
from .sensors import UeSensors, synthesize_sensors
from .targets import EncodingSpec, hard_target, soft_target, truncate_paths
from .voxel import VoxelSpec


@dataclass(frozen=True)
class Sample:
    trial: int
    ue_id: int
    voxel: np.ndarray
    image: np.ndarray
    coords: np.ndarray
    aods: tuple  # truncated clusters of (azimuth_rad, elevation_rad)
    hard: np.ndarray
    soft: np.ndarray


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 50
    batch_size: int = 32
    learning_rate: float = 1e-4
    lr_decay: float = 0.99
    plateau_epochs: int = 10
    truncation_budget: int = 25
    seed: int = 0


def build_samples(scenarios: list[dict], grid: EncodingSpec,
                  voxel_spec: VoxelSpec = VoxelSpec(),
                  truncation_budget: int = 25) -> list[Sample]:
    """Sensor/target pairs for every (trial, UE) in the scenario documents."""
    samples = []
    for trial, scenario in enumerate(scenarios):
        sensors = {s.ue_id: s for s in synthesize_sensors(scenario, voxel_spec)}
        for ue_doc in scenario["ues"]:
            ue_id = int(ue_doc["ue_id"])
            clusters = truncate_paths(ue_doc, truncation_budget)
            s: UeSensors = sensors[ue_id]
            samples.append(Sample(trial, ue_id, s.voxel, s.image, s.coords,
                                  tuple(tuple(c) for c in clusters),
                                  hard_target(clusters, grid),
                                  soft_target(clusters, grid)))
    return samples


def _tensors(samples: list[Sample], device="cpu"):
    to = lambda arrs: torch.as_tensor(np.stack(arrs), dtype=torch.float64, device=device)
    return (to([s.voxel for s in samples]), to([s.image for s in samples]),
            to([s.coords for s in samples]), to([s.hard for s in samples]),
            torch.as_tensor(similarity_matrix([s.soft for s in samples]),
                            dtype=torch.float64, device=device))


def _batch_loss(model: FusionModel, batch) -> tuple[torch.Tensor, torch.Tensor, torch.Tensor]:
    voxel, image, coords, hard, rho = batch
    probs, features = model(voxel, image, coords)
    bce = bce_sum(probs, hard)
    contrastive = sscl(features, rho)
    return bce + contrastive, bce, contrastive


def evaluate(model: FusionModel, samples: list[Sample]) -> dict[str, float]:
    """Full-dataset loss terms without gradient tracking."""
    with torch.no_grad():
        total, bce, contrastive = _batch_loss(model, _tensors(samples))
    return {"total": float(total), "bce": float(bce), "sscl": float(contrastive)}


def train(samples: list[Sample], model: FusionModel | None = None,
          cfg: TrainConfig = TrainConfig()) -> tuple[FusionModel, dict]:
    """Train on the samples; returns the model and per-epoch loss history."""
    if not samples:
        raise ValueError("empty dataset")
    torch.manual_seed(cfg.seed)
    if model is None:
        grid = EncodingSpec()
        model = FusionModel(voxel_bins=samples[0].voxel.shape,
                            image_shape=samples[0].image.shape, grid=grid)
    model = model.double()

    optimizer = torch.optim.Adam(model.parameters(), lr=cfg.learning_rate)
    rng = np.random.default_rng(cfg.seed)

    start = evaluate(model, samples)
    history = {"total": [start["total"]], "bce": [start["bce"]],
               "sscl": [start["sscl"]], "lr": [cfg.learning_rate], "steps": 0}
    best = start["total"]
    stale = 0
    lr = cfg.learning_rate

    for epoch in range(cfg.epochs):
        order = rng.permutation(len(samples))
        epoch_terms = []
        for lo in range(0, len(samples), cfg.batch_size):
            batch_samples = [samples[i] for i in order[lo:lo + cfg.batch_size]]
            total, bce, contrastive = _batch_loss(model, _tensors(batch_samples))
            loss_value = float(total.detach())
            if not math.isfinite(loss_value):
                raise RuntimeError(
                    f"training diverged at epoch {epoch}, step {history['steps']}: "
                    f"loss={loss_value!r} (bce={float(bce.detach())!r}, "
                    f"sscl={float(contrastive.detach())!r})")
            optimizer.zero_grad()
            total.backward()
            optimizer.step()
            history["steps"] += 1
            epoch_terms.append((loss_value, float(bce.detach()), float(contrastive.detach())))

        means = [float(np.mean([t[i] for t in epoch_terms])) for i in range(3)]
        history["total"].append(means[0])
        history["bce"].append(means[1])
        history["sscl"].append(means[2])

        if means[0] < best - 1e-9:
            best = means[0]
            stale = 0
        else:
            stale += 1
            if stale >= cfg.plateau_epochs:
                lr *= cfg.lr_decay
                for group in optimizer.param_groups:
                    group["lr"] = lr
                stale = 0
        history["lr"].append(lr)
    return model, history


def save_checkpoint(model: FusionModel, path: str | Path, history: dict | None = None) -> None:
    payload = {
        "state_dict": model.state_dict(),
        "voxel_bins": model.voxel_bins,
        "image_shape": model.image_shape,
        "grid": {"theta_bins": model.grid.theta_bins, "phi_bins": model.grid.phi_bins,
                 "delta_deg": model.grid.delta_deg},
        "direct_heads": model.direct_heads is not None,
    }
    torch.save(payload, path)
    if history is not None:
        Path(path).with_suffix(".history.json").write_text(
            json.dumps(history, indent=2) + "\n")


def load_checkpoint(path: str | Path) -> FusionModel:
    payload = torch.load(path, weights_only=False)
    model = FusionModel(voxel_bins=tuple(payload["voxel_bins"]),
                        image_shape=tuple(payload["image_shape"]),
                        grid=EncodingSpec(**payload["grid"]),
                        direct_heads=payload["direct_heads"])
    model = model.double()
    model.load_state_dict(payload["state_dict"])
    model.eval()
    return model
