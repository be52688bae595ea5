"""Adaptive reinforcer selection for coaching human learners.

The engine keeps a probability simplex over a catalog of positive reinforcers
and shifts weight toward whichever ones get a learner's mistakes rectified.
Around it: simulated novices and a three-group experiment harness, entropy and
regret analytics, replayable event logs, a CLI, and a live trainer service.
"""

from .analysis import (
    ConvergenceError,
    EntropySeries,
    ResourceLimitError,
    TransitionMatrix,
    ValidationError,
    alpha_sweep,
    build_transition_matrix,
    detect_plateau,
    entropy_series_from_records,
    regret_mistake_correlation,
    stationary_distribution,
)
from .catalog import (
    BUILTIN_CATALOGS,
    CatalogError,
    Reinforcer,
    ReinforcerCatalog,
    builtin_catalog,
    default_engine_config,
)
from .engine import (
    ConfigurationError,
    EngineConfig,
    EngineState,
    InteractionRecord,
    Outcome,
    entropy,
    exploration_bonus,
    ewma_smooth,
    new_engine,
    preferred_reinforcer,
    raw_update,
    record_outcome,
    regret,
    select_reinforcer,
    uniform_weights,
)
from .experiment import ExperimentStats, run_group_experiment, split_mistakes
from .novice import (
    Group,
    NoviceProfile,
    Phase,
    PhaseSchedule,
    SessionLogSummary,
    derive_seed,
    four_phase_schedule,
    guided_transfer_schedule,
    profile_sampler,
    respond_to_reinforcer,
    run_session,
    sharp_preference,
    step_novice,
)
from .stats import DegenerateDataError, pearson, welch_t_test
from .store import (
    EventEnvelope,
    FileEventLog,
    MemoryEventLog,
    ProtocolError,
    ReplayMismatchError,
    StorageError,
    append_event,
    make_envelope,
    read_events,
    replay_session,
)

__version__ = "0.1.0"
