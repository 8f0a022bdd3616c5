"""Minimum-cost directed feedback vertex set on surface-embedded digraphs.

The solver combines primal-dual hitting of facial dicycles, LP-guided
separators around a tight dicycle, and recursion on strong components whose
embedded genus has dropped. Exact oracles check it at desk scale.
"""

from .costs import INF
from .dfvs_lp import LpSolution, WeightedDistanceOracle, scale_and_weigh, separate, solve_lp, weighted_distance
from .embedded_digraph import (
    Arc,
    Dart,
    DiCycle,
    EmbeddedDigraph,
    Side,
    classify_sides,
    face_minimal_dicycles,
    genus,
    residual_graph,
    scc,
    trace_faces,
)
from .genus_solver import SolveCertificate, SolverConfig, check_solution, solve

__all__ = [
    "INF",
    "Arc",
    "Dart",
    "DiCycle",
    "EmbeddedDigraph",
    "LpSolution",
    "Side",
    "SolveCertificate",
    "SolverConfig",
    "WeightedDistanceOracle",
    "check_solution",
    "classify_sides",
    "face_minimal_dicycles",
    "genus",
    "residual_graph",
    "scale_and_weigh",
    "scc",
    "separate",
    "solve",
    "solve_lp",
    "trace_faces",
    "weighted_distance",
]
