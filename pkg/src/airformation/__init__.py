"""Consensus-based formation control over a fading broadcast channel.

A seedable simulator for planar single-integrator agents that exchange
state by simultaneous broadcasts: signals superimpose with unknown positive
fading, a constant reference signal normalizes them away, and a hybrid
controller (discrete updates, exact continuous flow) steers the group into
formation.  Includes the matrix machinery (row-stochastic round operators,
irreducibility/primitivity certificates, product limits) and a
transmission-cost accountant comparing broadcast against orthogonal access.
"""

from .analysis import (
    MatrixCertificate,
    ProductConvergenceError,
    certify,
    formation_error,
    product_limit,
)
from .channel import (
    BroadcastSignals,
    IsolatedReceiverError,
    NormalizedFadingMatrix,
    broadcast_signals,
    build_h_matrix,
    normalized_receive,
    wmac_receive,
)
from .config_io import (
    PRESETS,
    config_json,
    emit_outputs,
    parse_config,
    preset,
)
from .dynamics import (
    AgentTransition,
    TransitionOperator,
    agent_transition,
    apply_update,
    build_operator,
    propagate_interval,
    step_matrix_form,
    tilde_vector,
)
from .engine import (
    CostReport,
    RoundSummary,
    SimTrace,
    TraceSample,
    account_costs,
    initial_states,
    run,
    simulate,
)
from .model import (
    AgentState,
    ConfigError,
    ControlParams,
    FixedTopology,
    FormationSpec,
    RandomStronglyConnected,
    RoundRealization,
    SimConfig,
    UniformFading,
    tilde_state,
    untilde_state,
)
from .topology import (
    Digraph,
    is_strongly_connected,
    random_strongly_connected,
    sample_round,
    substream,
)

__version__ = "0.1.0"

__all__ = [
    "AgentState",
    "AgentTransition",
    "BroadcastSignals",
    "ConfigError",
    "ControlParams",
    "CostReport",
    "Digraph",
    "FixedTopology",
    "FormationSpec",
    "IsolatedReceiverError",
    "MatrixCertificate",
    "NormalizedFadingMatrix",
    "PRESETS",
    "ProductConvergenceError",
    "RandomStronglyConnected",
    "RoundRealization",
    "RoundSummary",
    "SimConfig",
    "SimTrace",
    "TraceSample",
    "TransitionOperator",
    "UniformFading",
    "account_costs",
    "agent_transition",
    "apply_update",
    "broadcast_signals",
    "build_h_matrix",
    "build_operator",
    "certify",
    "config_json",
    "emit_outputs",
    "formation_error",
    "initial_states",
    "is_strongly_connected",
    "normalized_receive",
    "parse_config",
    "preset",
    "product_limit",
    "propagate_interval",
    "random_strongly_connected",
    "run",
    "sample_round",
    "simulate",
    "step_matrix_form",
    "substream",
    "tilde_state",
    "tilde_vector",
    "untilde_state",
    "wmac_receive",
]
