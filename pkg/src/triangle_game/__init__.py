"""Simulation and verification laboratory for the biased triangle game."""

from .errors import (
    ExhaustedError,
    GameError,
    IllegalMoveError,
    InvalidNodeError,
    InvalidParametersError,
    OutOfRegimeError,
    ReplayError,
    SingularBalanceError,
)
from .game import GameState, Owner, edge_endpoints, edge_index, num_edges
from .ledger import (
    EpisodeConstants,
    EpisodeTracker,
    TurnLedger,
    compute_c,
    decompose_turn,
    default_episode_constants,
    tech1_check,
)
from .potential import (
    NodePotentialTable,
    PotentialParams,
    balance,
    balance_interpretation,
    balanced_breaker_degree,
    check_remark_p0,
    compute_p0,
    deficit,
    diagnostic_dump,
    make_params,
    pot_edge,
    pot_node,
    total_potential,
)
from .strategies import (
    BreakerTurnPlan,
    StrategyConfig,
    StrategyKind,
    breaker_ce_turn,
    breaker_potential_turn,
    play_match,
)

__version__ = "0.1.0"

__all__ = [
    "BreakerTurnPlan",
    "EpisodeConstants",
    "EpisodeTracker",
    "ExhaustedError",
    "GameError",
    "GameState",
    "IllegalMoveError",
    "InvalidNodeError",
    "InvalidParametersError",
    "NodePotentialTable",
    "OutOfRegimeError",
    "Owner",
    "PotentialParams",
    "ReplayError",
    "SingularBalanceError",
    "StrategyConfig",
    "StrategyKind",
    "TurnLedger",
    "balance",
    "balance_interpretation",
    "balanced_breaker_degree",
    "breaker_ce_turn",
    "breaker_potential_turn",
    "check_remark_p0",
    "compute_c",
    "compute_p0",
    "decompose_turn",
    "default_episode_constants",
    "deficit",
    "diagnostic_dump",
    "edge_endpoints",
    "edge_index",
    "make_params",
    "num_edges",
    "play_match",
    "pot_edge",
    "pot_node",
    "tech1_check",
    "total_potential",
]
