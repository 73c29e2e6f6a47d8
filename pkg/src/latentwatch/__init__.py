"""Online surprise detection over semantic latent sequences.

Subsystems: sequence I/O and pooling (``seqio``), motion cues (``motion``),
the recurrent predictor (``predictor``), trigger extraction (``extractor``),
comparison baselines (``baselines``), evaluation metrics (``metrics``),
the synthetic world generator (``scenario``), the replay/sweep harness
(``runner``), the CLI (``cli``), and the review service (``review``).
"""

from .seqio import (FeatureMap, LatentSequence, LatentState, EventLabel,
                    pool_feature_map, read_sequence, write_sequence)
from .motion import FlowField, MotionVector, make_context_vector, pool_flow
from .predictor import (GRUParams, PredictorConfig, online_step, predict,
                        pretrain, score_sequence, surprise)
from .extractor import ExtractorConfig, TriggerEvent, detect_triggers
from .metrics import (ConsensusEvent, ConsensusSet, MatchConfig,
                      TelemetryPolicy, bsr, consensus_rates, fpsr, ler,
                      match_peaks, peak_f1, telemetry_mask)
from .scenario import ScenarioConfig, Maneuver, EventSpec, generate
from .runner import RunManifest, alpha_sweep, run_replay

__version__ = "0.1.0"
