"""Planar polygon linkages: configuration spaces, convex atlases, and
energy-flow convexification."""

from .chain_geometry import (
    PolygonChain,
    SegmentRelation,
    SideLengths,
    TurnAngles,
    canonicalize,
    circle_circle_intersection,
    normalize_angle,
    reflect_x,
    segment_intersection,
    turn_angles_from_vertices,
    vertices_from_turn_angles,
)
from .config_space import (
    ClosureError,
    ConfigClass,
    ConfigSampleSet,
    StraightLineReport,
    choose_qrs,
    classify,
    closures_for_free_angles,
    enumerate_configurations,
    is_feasible,
    is_generic,
    reconstruct_from_partial_angles,
    straight_line_sign_vectors,
)
from .convex_atlas import (
    AnglePrefix,
    AtlasRow,
    AtlasSample,
    PrefixError,
    StretchedWitness,
    contains_prefix,
    max_turn_angle,
    min_turn_angle,
    quadrilateral_expansive_step,
    sample_atlas,
)
from .energy import (
    EnergyGradient,
    ReducedCoords,
    bump,
    bump_derivative,
    elliptic_energy,
    energy_gradient,
    energy_of_free_angles,
    finite_difference_gradient,
    log_energy_gradient,
    modified_energy,
)
from .flow import (
    CONVERGED,
    MAX_ITERATIONS,
    STALLED,
    FlowParams,
    FlowTrace,
    convexify,
    project_to_closure,
    reverse_flow_step,
)

__all__ = [
    "AnglePrefix",
    "AtlasRow",
    "AtlasSample",
    "CONVERGED",
    "ClosureError",
    "ConfigClass",
    "ConfigSampleSet",
    "EnergyGradient",
    "FlowParams",
    "FlowTrace",
    "MAX_ITERATIONS",
    "PolygonChain",
    "PrefixError",
    "ReducedCoords",
    "STALLED",
    "SegmentRelation",
    "SideLengths",
    "StraightLineReport",
    "StretchedWitness",
    "TurnAngles",
    "bump",
    "bump_derivative",
    "canonicalize",
    "choose_qrs",
    "circle_circle_intersection",
    "classify",
    "closures_for_free_angles",
    "contains_prefix",
    "convexify",
    "elliptic_energy",
    "energy_gradient",
    "energy_of_free_angles",
    "enumerate_configurations",
    "finite_difference_gradient",
    "is_feasible",
    "is_generic",
    "log_energy_gradient",
    "max_turn_angle",
    "min_turn_angle",
    "modified_energy",
    "normalize_angle",
    "project_to_closure",
    "quadrilateral_expansive_step",
    "reconstruct_from_partial_angles",
    "reflect_x",
    "reverse_flow_step",
    "sample_atlas",
    "segment_intersection",
    "straight_line_sign_vectors",
    "turn_angles_from_vertices",
    "vertices_from_turn_angles",
]

__version__ = "0.1.0"
