"""Distributionally robust principal-agent contracts: solvers, gap reports, certificates."""

__version__ = "0.1.0"

from .model import (Action, AffineContract, AffineFamily, AmbiguitySet, ConstantFamily,
                    GapReport, GeneralFamily, GridConfig, LinearFamily, OutputSpec,
                    ProductionCurve, Scenario, ScheduleContract, Technology, Violation,
                    production_curve, validate_scenario)
from .agent import BestResponse, best_response
from .games import (IntractableError, MinimaxResult, SolveResult, minimax_counterpart,
                    solve_game_I, solve_game_II, solve_game_III, worst_expectation)
from .geometry import SurplusCurve, concave_envelope, extremal_point, inverse_derivative
from .certification import (Certificate, adjustability_ratio_concave, affine_payoff_concave,
                            bottleneck_type, certify_affine_optimal, classify_surplus,
                            decompose_gap, quasiconcavity_scan)

__all__ = [
    "Action", "AffineContract", "AffineFamily", "AmbiguitySet", "BestResponse", "Certificate",
    "ConstantFamily", "GapReport", "GeneralFamily", "GridConfig", "IntractableError",
    "LinearFamily", "MinimaxResult", "OutputSpec", "ProductionCurve", "Scenario",
    "ScheduleContract", "SolveResult", "SurplusCurve", "Technology", "Violation",
    "adjustability_ratio_concave", "affine_payoff_concave", "best_response", "bottleneck_type",
    "certify_affine_optimal", "classify_surplus", "concave_envelope", "decompose_gap",
    "extremal_point", "inverse_derivative", "minimax_counterpart", "production_curve",
    "quasiconcavity_scan", "solve_game_I", "solve_game_II", "solve_game_III",
    "validate_scenario", "worst_expectation",
]
