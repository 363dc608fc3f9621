"""Epsilon-chain geometry on finite metric spaces.

Chainable components, chain-balls and chain metrics, the label-padded chain
metric, and covering profiles across scales.
"""
from .bornology import (
    BornologyReport,
    CoverResult,
    ScaleProfile,
    bornology_report,
    bourbaki_cauchy_prefix,
    chain_cover,
    components_met,
    net_cover,
    oscillation_check,
    rho_bounded_forward_bound,
    rho_bounded_reverse_cover,
    scale_profile,
)
from .chain_graph import (
    INF,
    Chain,
    ChainBall,
    ChainGraph,
    build_chain_graph,
    chain_ball,
    chain_distance,
    hop_distance,
    reduce_chain,
    shortest_chain,
)
from .exceptions import (
    CapacityError,
    CSVParseError,
    DifferentComponentsError,
    DomainError,
    MetricValidationError,
    StructuralInputError,
    UniformGeomError,
)
from .metric_builders import (
    ComponentLabeling,
    LsWitness,
    RhoMetric,
    adversarial_labeling,
    as_point_function,
    build_labeling,
    build_rho,
    check_lipschitz_small,
    check_locally_identical,
    rho_distance,
)
from .metric_core import (
    TOL,
    FiniteMetricSpace,
    MetricValidationReport,
    SubsetHandle,
    ball_inclusion_map,
    closed_ball,
    diameter,
    dist_to_set,
    validate_metric,
)
from .spaces import (
    SpaceSpec,
    generate,
    load_distance_csv,
    load_points_csv,
    save_distance_csv,
    save_report_json,
)

__version__ = "0.1.0"

__all__ = [
    "BornologyReport",
    "CSVParseError",
    "CapacityError",
    "Chain",
    "ChainBall",
    "ChainGraph",
    "ComponentLabeling",
    "CoverResult",
    "DifferentComponentsError",
    "DomainError",
    "FiniteMetricSpace",
    "INF",
    "LsWitness",
    "MetricValidationError",
    "MetricValidationReport",
    "RhoMetric",
    "ScaleProfile",
    "SpaceSpec",
    "StructuralInputError",
    "SubsetHandle",
    "TOL",
    "UniformGeomError",
    "__version__",
    "adversarial_labeling",
    "as_point_function",
    "ball_inclusion_map",
    "bornology_report",
    "bourbaki_cauchy_prefix",
    "build_chain_graph",
    "build_labeling",
    "build_rho",
    "chain_ball",
    "chain_cover",
    "chain_distance",
    "check_lipschitz_small",
    "check_locally_identical",
    "closed_ball",
    "components_met",
    "diameter",
    "dist_to_set",
    "generate",
    "hop_distance",
    "load_distance_csv",
    "load_points_csv",
    "net_cover",
    "oscillation_check",
    "reduce_chain",
    "rho_bounded_forward_bound",
    "rho_bounded_reverse_cover",
    "rho_distance",
    "save_distance_csv",
    "save_report_json",
    "scale_profile",
    "shortest_chain",
    "validate_metric",
]
