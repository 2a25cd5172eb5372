"""CFR+ and vanilla CFR solvers for one-card poker with exact exploitability."""

from ._backend import name as backend
from .evaluator import (ExploitabilityReport, Profile, ProfileError, best_response_value,
                        expected_value, exploitability)
from .game_tree import GameSpec, GameTree, InfosetId, build_one_card_poker, lookup_infosets
from .solver import (ConvergenceTrace, SolverConfig, SolverState, TraceRecord, Variant,
                     average_profile, current_profile, run_iteration, solve_to_target)
from .table_stats import TableStats, restore, snapshot, stats

__all__ = [
    "ConvergenceTrace", "ExploitabilityReport", "GameSpec", "GameTree", "InfosetId", "Profile",
    "ProfileError", "SolverConfig", "SolverState", "TableStats", "TraceRecord", "Variant",
    "average_profile", "backend", "best_response_value", "build_one_card_poker",
    "current_profile", "expected_value", "exploitability", "lookup_infosets", "restore",
    "run_iteration", "snapshot", "solve_to_target", "stats",
]
__version__ = "0.1.0"
