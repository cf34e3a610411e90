"""Instruction set extension identification by iterative bi-partitioning."""

from .cut import (Constraints, Cut, connected_components, convex_closure,
                  critical_path_hw_latency, io_counts, is_convex, merit, software_latency)
from .dfg import (BarrierDistances, Dfg, LatencyTable, OpNode, barrier_distances,
                  make_dfg, topological_order, validate_dfg)
from .driver import Application, Ise, IseReport, block_potential, count_instances, \
    lambda_overall, overall_speedup, select_ises
from .errors import (BudgetExceeded, CycleDetected, DfgError, DuplicateEdge, DuplicateNode,
                     IsegenError, MemoryNodeInCut, MemoryNodeToggle, MissingLatency,
                     ParseError, SpeedupDivergence, UnknownNodeRef)
from .fileformat import (default_latency_table, format_block, format_blocks,
                         load_blocks, parse_latency_table, read_blocks, read_latency_table)
from .oracle import OracleBudget, enumerate_optimal_cut, iterative_exact, naive_optimal_cut
from .search import (CALIBRATED_WEIGHTS, GainWeights, SearchConfig, bipartition, gain)
from .toggle import ToggleState, apply_toggle, init_state, preview_toggle

__version__ = "0.1.0"

__all__ = [
    "Application",
    "BarrierDistances",
    "BudgetExceeded",
    "CALIBRATED_WEIGHTS",
    "Constraints",
    "Cut",
    "CycleDetected",
    "Dfg",
    "DfgError",
    "DuplicateEdge",
    "DuplicateNode",
    "GainWeights",
    "Ise",
    "IseReport",
    "IsegenError",
    "LatencyTable",
    "MemoryNodeInCut",
    "MemoryNodeToggle",
    "MissingLatency",
    "OpNode",
    "OracleBudget",
    "ParseError",
    "SearchConfig",
    "SpeedupDivergence",
    "ToggleState",
    "UnknownNodeRef",
    "apply_toggle",
    "barrier_distances",
    "bipartition",
    "block_potential",
    "connected_components",
    "convex_closure",
    "count_instances",
    "critical_path_hw_latency",
    "default_latency_table",
    "enumerate_optimal_cut",
    "format_block",
    "format_blocks",
    "gain",
    "init_state",
    "io_counts",
    "is_convex",
    "iterative_exact",
    "lambda_overall",
    "load_blocks",
    "make_dfg",
    "merit",
    "naive_optimal_cut",
    "overall_speedup",
    "parse_latency_table",
    "preview_toggle",
    "read_blocks",
    "read_latency_table",
    "select_ises",
    "software_latency",
    "topological_order",
    "validate_dfg",
]
