"""Joint scheduling and beamforming for multicast/unicast layered-division multiplexing."""

from .channel import ArrayGeometry, ChannelMatrix, PathParams, array_response, generate_channel, generate_channels
from .combiner import PhaseCodebook, design_combiner
from .config import ConfigError, SweepSpec, SystemConfig, parse_config, serialize_config
from .errors import InternalConsistencyError, ScenarioInfeasible, SingularConfiguration
from .evaluation import ScenarioResult, SchemeKind, evaluate_sinrs, run_scheme, spectral_efficiency
from .harness import emit_csv, run_experiment
from .metrics import MetricKind, discordance_matrix, pairwise_metric
from .precoder import BeamformingSolution, build_initial_point, effective_channels, solve_precoders
from .scheduler import ScheduleDecision, brute_force_schedule, random_schedule, solve_schedule

__version__ = "0.1.0"
