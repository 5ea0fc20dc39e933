"""beamfusion: toy multimodal sensor fusion for AoD-list prediction."""

__version__ = "0.1.0"

from .losses import bce_sum, similarity_matrix, sscl
from .model import FUSION_DIM, FusionModel
from .sensors import UeSensors, synthesize_sensors
from .targets import EncodingSpec, decode_probabilities, hard_target, soft_target
from .train import Sample, TrainConfig, build_samples, evaluate, train
from .voxel import VoxelSpec, voxelize
