"""Exact shadowing, chain and rigidity analysis for finite dynamical systems."""

from .orbits import (
    Chain,
    LassoPseudoOrbit,
    StepGraph,
    bad_cantor_pseudo_orbit,
    block_pseudo_orbit,
    build_step_graph,
    chain_through_component,
    concatenate_chains,
    extend_to_lasso,
    reverse_chain,
    validate_chain,
)
from .recurrence import (
    chain_classes,
    chain_reach,
    classify_system,
    periodic_points,
    recurrence_report,
    rigidity_defect,
)
from .shadowing import (
    decide_cg_shadowing,
    decide_eventual_shadowing,
    decide_shadowing,
    max_delta,
    shadowability_of,
    shadowing_delta_from_convergence,
    shadowing_delta_from_rigidity,
    unshadowable_witness,
)
from .space import FiniteMetricSpace, ball, clopen_cover, distance_spectrum, h_components, validate_metric
from .system import (
    SystemMap,
    build_example,
    cantor,
    circle_grid,
    cone,
    continuity_modulus,
    interval_grid,
    iterate_semigroup,
    random_system,
    rho_distance,
    shift_to_limit,
)

__version__ = "0.1.0"
