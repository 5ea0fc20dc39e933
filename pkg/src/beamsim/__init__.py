"""beamsim: beamspace-based multi-user mmWave beamforming and evaluation."""

__version__ = "0.1.0"

from .bspace import (AngleGrid, AodList, Beamspace, DegenerateResidualError,
                     compute_beamspace, peak_direction, peak_index, truncate_paths)
from .channel import (OfdmConfig, PathComponent, RayCluster, ScenarioConfig, UeChannel,
                      frequency_response, generate_scenario, pulse)
from .encoding import (CosineGrid, EncodingGrid, HardEncoding, SoftEncoding,
                       ZeroEncodingError, bce_loss, cosine_hard_encode,
                       cosine_soft_encode, decode_predictions, hard_encode,
                       mad_metric, mae_cosines, similarity, soft_encode, sscl_loss)
from .evaluation import (EstimatorErrorModel, SweepConfig, SweepReport,
                         enumerate_user_clusters, overhead_report,
                         perturb_beamspace_estimate, per_user_se, run_sweep,
                         select_best_clusters, sum_se, user_se)
from .geometry import (ArrayConfig, Direction, array_response, conjugate_beamformer,
                       dft_codebook, steering_x, steering_y, vectorize)
from .precoding import (DigitalPrecoder, EffectiveChannelEstimate, LinkConfig,
                        RfPrecoder, beam_prediction_baseline,
                        estimate_effective_channels, full_csi_baseline,
                        residual_beamspaces, rzf_precoder, select_rf_precoders)
