"""Stable assignments with mixed choice functions on capacitated bipartite graphs.

Exact rational arithmetic throughout: side-optimal stable assignments,
rotations and their poset, the closed-function lattice, and minimum-cost
stable assignments via min-cut.
"""

from .choice import ChoiceOutcome, choose, interesting_edges, prefers
from .iteration import (
    ExtendedInstance,
    IterationState,
    build_extended_instance,
    initial_state,
    ordinary_iteration_step,
    solve_quota_filling,
    solve_xmax,
    solve_xmin,
    solve_xmin_modified,
)
from .mincost import MinCostResult, assignment_cost, build_costed_poset, min_cost_stable
from .model import (
    Edge,
    Instance,
    InstanceError,
    format_rational,
    full_assignment,
    parse_assignment,
    parse_instance,
    parse_rational,
    serialize_assignment,
    serialize_instance,
    validate_assignment,
    vertex_load,
)
from .poset import (
    ClosedFunction,
    RotationPoset,
    Route,
    build_poset,
    enumerate_fully_closed,
    gamma,
    grid_sublattice,
    hull_membership,
    is_closed,
    omega,
    run_route,
    stable_join_workers,
    stable_meet_workers,
)
from .rotations import (
    ActiveStructure,
    Component,
    Rotation,
    apply_shift,
    build_active_structure,
    extract_rotation,
    max_weight,
    maximal_components,
    route_to_terminal,
)
from .stability import Comparison, StabilityReport, compare_stable, stability_report

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
