"""Export model predictions in the simulator's exchange formats.

Two outputs: a predictions file binding a decoded AoD-list to every
(trial, ue_id) for `beamsim sweep --estimator file:`, and paired
truth / prediction-grid documents for `beamsim losses`.
"""

from __future__ import annotations

import math

import numpy as np
import torch

from .model import FusionModel
from .targets import decode_probabilities
from .train import Sample, _tensors


def predict_grids(model: FusionModel, samples: list[Sample]) -> tuple[np.ndarray, np.ndarray]:
    """(probabilities (N, theta, phi), fusion features (N, 512)) for the samples."""
    model.eval()
    with torch.no_grad():
        voxel, image, coords, _, _ = _tensors(samples)
        probs, features = model(voxel, image, coords)
    return probs.numpy(), features.numpy()


def predictions_document(samples: list[Sample], probs: np.ndarray,
                         grid) -> dict:
    """`beamsim` predictions file: decoded AoD-list per (trial, ue_id)."""
    entries = []
    for sample, p in zip(samples, probs):
        directions = decode_probabilities(p, grid)
        entries.append({
            "trial": sample.trial,
            "ue_id": sample.ue_id,
            "aod_list": {"clusters": ([[{"azimuth_deg": az, "elevation_deg": el}
                                        for az, el in directions]] if directions else [])},
        })
    return {"version": 1, "kind": "predictions", "predictions": entries}


def losses_documents(samples: list[Sample], probs: np.ndarray,
                     features: np.ndarray) -> tuple[dict, dict]:
    """(truth, prediction) documents for the `beamsim losses` command.

    The truth carries the original (truncated) path directions so the
    reference implementation re-derives the identical hard/soft encodings.
    """
    truth = {"version": 1, "kind": "aod_truth", "samples": []}
    pred = {"version": 1, "kind": "prediction_grids", "samples": []}
    for sample, p, f in zip(samples, probs, features):
        truth["samples"].append({"clusters": [
            [{"azimuth_deg": math.degrees(az), "elevation_deg": math.degrees(el)}
             for az, el in cluster]
            for cluster in sample.aods]})
        pred["samples"].append({"probabilities": p.tolist(), "features": f.tolist()})
    return truth, pred
