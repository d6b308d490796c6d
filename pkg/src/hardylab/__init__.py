"""Numerical laboratory for fractal codimension estimates, Frostman-type
measure constructions, and best constants in weighted Hardy inequalities
on Euclidean grid domains.
"""

from .errors import (
    BudgetExceededError,
    ConfigError,
    EmptyWindowError,
    HardylabError,
    NotACoverError,
    SubResolutionError,
    ZeroTestFunctionError,
)
from .geometry import (
    DistanceField,
    GridDomain,
    IFSSpec,
    PointSet,
    SimilarityMap,
    ball_volume,
    dedupe_points,
    distance_to_points,
    distance_transform,
    generate_prefractal,
    maximal_packing,
    unit_ball_volume,
)
from .dimension import (
    DimensionEstimate,
    ScaleWindowSample,
    aikawa_critical_exponent,
    assouad_lower,
    assouad_upper,
    codimension_estimates,
    content_density_upper,
    covering_counts,
    hausdorff_codim_estimate,
    minkowski_estimates,
)
from .frostman import (
    GrowthCheckResult,
    MeasureDistribution,
    PackingTree,
    build_packing_tree,
    content_lower_bound,
    distribute_measure,
    growth_check,
    tree_to_json,
)
from .hardy import (
    AdmissibilityMap,
    HardyProblem,
    RadialHardyProblem,
    RayleighResult,
    RefinementStudy,
    ScanEntry,
    admissibility_scan,
    hardy_problem,
    minimize_quotient,
    predict_admissibility,
    quotient,
    radial_problem,
    refinement_study,
    witness_function,
    witness_quotient,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
