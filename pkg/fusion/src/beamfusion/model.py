"""Two-part multimodal fusion network.

Three unimodal extractors (voxel grid, camera image, coordinates) feed a
fusion feature extractor producing a 512-dimensional fusion feature, which
the tuning head maps to per-cell probabilities over the theta x phi encoding
grid.  Each unimodal extractor can optionally carry its own direct
prediction head (``direct_heads=True``) for standalone single-modality runs;
the fusion path is the default.

Layer sizes are deliberately small: the 512-dim fusion feature and the
theta*phi sigmoid head are the contract, everything else is toy scale.
"""

from __future__ import annotations

import torch
import torch.nn as nn

from .targets import EncodingSpec

FUSION_DIM = 512


def _flat_size(module: nn.Module, shape: tuple[int, ...]) -> int:
    with torch.no_grad():
        return int(module(torch.zeros(1, 1, *shape)).reshape(1, -1).shape[1])


class FusionModel(nn.Module):
    def __init__(self, voxel_bins: tuple[int, int, int] = (20, 200, 10),
                 image_shape: tuple[int, int] = (48, 81),
                 grid: EncodingSpec = EncodingSpec(),
                 direct_heads: bool = False):
        super().__init__()
        self.voxel_bins = tuple(voxel_bins)
        self.image_shape = tuple(image_shape)
        self.grid = grid
        out_cells = grid.theta_bins * grid.phi_bins

        self.voxel_conv = nn.Sequential(
            nn.Conv3d(1, 4, 3, stride=2, padding=1), nn.ReLU(),
            nn.Conv3d(4, 8, 3, stride=2, padding=1), nn.ReLU(),
        )
        self.voxel_fc = nn.Sequential(
            nn.Linear(_flat_size(self.voxel_conv, self.voxel_bins), 128), nn.ReLU())

        self.image_conv = nn.Sequential(
            nn.Conv2d(1, 4, 3, stride=2, padding=1), nn.ReLU(),
            nn.Conv2d(4, 8, 3, stride=2, padding=1), nn.ReLU(),
        )
        self.image_fc = nn.Sequential(
            nn.Linear(_flat_size(self.image_conv, self.image_shape), 64), nn.ReLU())

        self.coord_fc = nn.Sequential(nn.Linear(2, 32), nn.ReLU(),
                                      nn.Linear(32, 32), nn.ReLU())

        self.fusion = nn.Sequential(
            nn.Linear(128 + 64 + 32, 256), nn.ReLU(),
            nn.Linear(256, FUSION_DIM), nn.ReLU(),
        )
        self.head = nn.Linear(FUSION_DIM, out_cells)

        self.direct_heads = None
        if direct_heads:
            self.direct_heads = nn.ModuleDict({
                "voxel": nn.Linear(128, out_cells),
                "image": nn.Linear(64, out_cells),
                "coords": nn.Linear(32, out_cells),
            })

    def unimodal_features(self, voxel, image, coords) -> dict[str, torch.Tensor]:
        v = self.voxel_fc(self.voxel_conv(voxel.unsqueeze(1)).flatten(1))
        i = self.image_fc(self.image_conv(image.unsqueeze(1)).flatten(1))
        c = self.coord_fc(coords)
        return {"voxel": v, "image": i, "coords": c}

    def forward(self, voxel, image, coords):
        """Returns (probabilities (B, theta, phi), fusion features (B, 512))."""
        uni = self.unimodal_features(voxel, image, coords)
        features = self.fusion(torch.cat([uni["voxel"], uni["image"], uni["coords"]], dim=1))
        logits = self.head(features)
        probs = torch.sigmoid(logits).reshape(-1, self.grid.theta_bins, self.grid.phi_bins)
        return probs, features

    def predict_direct(self, modality: str, voxel, image, coords):
        """Single-modality prediction through that extractor's own head."""
        if self.direct_heads is None:
            raise RuntimeError("model was built without direct heads")
        uni = self.unimodal_features(voxel, image, coords)
        logits = self.direct_heads[modality](uni[modality])
        return torch.sigmoid(logits).reshape(-1, self.grid.theta_bins, self.grid.phi_bins)
