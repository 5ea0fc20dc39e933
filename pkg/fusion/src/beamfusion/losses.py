"""Torch losses: per-cell BCE plus the similarity-weighted contrastive term.

BCE sums over grid cells and averages over the batch, with probabilities
clamped to [1e-12, 1 - 1e-12].  The contrastive loss averages
(1 - 2*rho_ij) * exp(cos(z_i, z_j)) over all ordered feature pairs
(diagonal included), where rho is the cosine similarity of the samples'
soft encodings: pairs with rho > 1/2 are rewarded for aligned features,
pairs with rho < 1/2 are punished.
"""

from __future__ import annotations

import numpy as np
import torch

BCE_EPS = 1e-12


def bce_sum(probs: torch.Tensor, targets: torch.Tensor) -> torch.Tensor:
    """-(y log p + (1-y) log(1-p)) summed per sample, averaged over the batch."""
    if probs.shape != targets.shape:
        raise ValueError(f"shape mismatch: {tuple(probs.shape)} vs {tuple(targets.shape)}")
    p = probs.clamp(BCE_EPS, 1.0 - BCE_EPS)
    per_sample = -(targets * p.log() + (1.0 - targets) * (1.0 - p).log())
    return per_sample.reshape(per_sample.shape[0], -1).sum(dim=1).mean()


def similarity_matrix(soft_targets: np.ndarray) -> np.ndarray:
    """Pairwise cosine similarity of flattened soft encodings, shape (B, B)."""
    flat = np.asarray(soft_targets, dtype=float).reshape(len(soft_targets), -1)
    norms = np.linalg.norm(flat, axis=1)
    if np.any(norms == 0.0):
        raise ValueError("soft encodings must be nonzero")
    flat = flat / norms[:, None]
    return flat @ flat.T


def sscl(features: torch.Tensor, rho: torch.Tensor) -> torch.Tensor:
    """(1/B^2) sum_ij (1 - 2 rho_ij) exp(cos(z_i, z_j)), diagonal included."""
    if features.ndim != 2 or rho.shape != (features.shape[0], features.shape[0]):
        raise ValueError("features must be (B, D) with a matching (B, B) rho")
    norms = features.norm(dim=1, keepdim=True)
    if torch.any(norms == 0.0):
        raise ValueError("feature vectors must have nonzero norm")
    unit = features / norms
    cos = unit @ unit.T
    b = features.shape[0]
    return ((1.0 - 2.0 * rho) * cos.exp()).sum() / (b * b)
