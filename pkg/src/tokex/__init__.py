"""Analysis of round-based token-exchange games.

Round-indexed pairwise regressions, "give at random" null-model inference,
player-replacement influence scores, exploratory statistics and network export.
"""

__version__ = "0.1.0"

from .core import (
    AllocationLog,
    CumulativeCounts,
    GameConfig,
    PairObservation,
    ValidatedGame,
    cumulative_counts,
    pair_table,
    validate_log,
)
from .explore import (
    reciprocity_correlation,
    residual_export,
    scatter_export,
    source_proportions,
)
from .fit import FitResult, ModelSpec, Trajectory, design_matrix, fit_at_round, fit_trajectory, ols_fit
from .infer import (
    BandTrajectory,
    NullDistribution,
    bounds95,
    empirical_p,
    null_bands,
    null_distribution,
    replay_bands,
)
from .influence import InfluenceScores, flag_influential, influence_for_player, influence_table
from .netexport import GameGraph, build_graph, export, layout_fr
from .report import ReportOptions, report
from .simulate import (
    SeedSpec,
    generate_replicates,
    replay_with_null_players,
    simulate_null_game,
)

__all__ = [
    "AllocationLog", "BandTrajectory", "CumulativeCounts", "FitResult", "GameConfig", "GameGraph",
    "InfluenceScores", "ModelSpec", "NullDistribution", "PairObservation", "ReportOptions",
    "SeedSpec", "Trajectory", "ValidatedGame", "bounds95", "build_graph", "cumulative_counts",
    "design_matrix", "empirical_p", "export", "fit_at_round", "fit_trajectory",
    "flag_influential", "generate_replicates", "influence_for_player", "influence_table",
    "layout_fr", "null_bands", "null_distribution", "ols_fit", "pair_table",
    "reciprocity_correlation", "replay_bands", "replay_with_null_players", "report",
    "residual_export", "scatter_export", "simulate_null_game", "source_proportions",
    "validate_log",
]
