"""Euclidean distance matrix toolbox.

Build, validate, complete and denoise matrices of squared pairwise
distances; recover point configurations up to rigid motion; solve
multidimensional unfolding; sort unlabeled echoes and reconstruct room
geometry; recover line point sets from unlabeled distance multisets.
"""

from .core import (
    DEFAULT_PSD_TOL,
    DistanceMatrix,
    EdmCheck,
    GramMatrix,
    ObservationMask,
    PointSet,
    ReducedGram,
    as_distance_matrix,
    as_observation_mask,
    as_point_set,
    assemble_edm,
    centering_matrix,
    cross_edm,
    edm_from_gram,
    edm_from_reduced,
    full_mask,
    gram_from_edm,
    is_edm,
    numerical_rank,
    reduced_gram,
    v_basis,
)
from .embedding import (
    AnchorSet,
    MdsDiagnostics,
    RigidTransform,
    align,
    classical_mds,
    procrustes,
)
from .completion import (
    METHODS,
    CompletionResult,
    NoisyObservation,
    OptSpaceResult,
    QuarticCoeffs,
    alternating_descent,
    complete_edm,
    eigenvalue_threshold,
    minimize_quartic,
    observe,
    optspace,
    optspace_complete_edm,
    quartic_coeffs,
    rank_complete_edm,
    sdr_complete_edm,
    stress_raw,
    stress_s,
)
from .unfolding import (
    MduSolution,
    UnfoldingInstance,
    embed_unfolding,
    mdu_mask,
    missing_fraction,
    solve_mdu,
)
from .unlabeled import (
    DistanceMultiset,
    EchoAssignment,
    EchoSet,
    EchoSimulation,
    EchoSortResult,
    RoomSpec,
    SPEED_OF_SOUND,
    WallPlane,
    echo_sort,
    enumerate_image_sources,
    image_source,
    locate_image_source,
    reconstruct_walls,
    simulate_echoes,
    sort_all_echoes,
    sstress_augmented,
    turnpike_recover,
)
from .bench import (
    DEFAULT_METHODS,
    ExperimentResult,
    ExperimentSpec,
    ResultRow,
    SCENARIOS,
    emit_csv,
    run,
    run_mdu,
    run_random_deletion,
    swiss_demo,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_PSD_TOL",
    "DistanceMatrix",
    "EdmCheck",
    "GramMatrix",
    "ObservationMask",
    "PointSet",
    "ReducedGram",
    "as_distance_matrix",
    "as_observation_mask",
    "as_point_set",
    "assemble_edm",
    "centering_matrix",
    "cross_edm",
    "edm_from_gram",
    "edm_from_reduced",
    "full_mask",
    "gram_from_edm",
    "is_edm",
    "numerical_rank",
    "reduced_gram",
    "v_basis",
    "AnchorSet",
    "MdsDiagnostics",
    "RigidTransform",
    "align",
    "classical_mds",
    "procrustes",
    "METHODS",
    "CompletionResult",
    "NoisyObservation",
    "OptSpaceResult",
    "QuarticCoeffs",
    "alternating_descent",
    "complete_edm",
    "eigenvalue_threshold",
    "minimize_quartic",
    "observe",
    "optspace",
    "optspace_complete_edm",
    "quartic_coeffs",
    "rank_complete_edm",
    "sdr_complete_edm",
    "stress_raw",
    "stress_s",
    "MduSolution",
    "UnfoldingInstance",
    "embed_unfolding",
    "mdu_mask",
    "missing_fraction",
    "solve_mdu",
    "DistanceMultiset",
    "EchoAssignment",
    "EchoSet",
    "EchoSimulation",
    "EchoSortResult",
    "RoomSpec",
    "SPEED_OF_SOUND",
    "WallPlane",
    "echo_sort",
    "enumerate_image_sources",
    "image_source",
    "locate_image_source",
    "reconstruct_walls",
    "simulate_echoes",
    "sort_all_echoes",
    "sstress_augmented",
    "turnpike_recover",
    "DEFAULT_METHODS",
    "ExperimentResult",
    "ExperimentSpec",
    "ResultRow",
    "SCENARIOS",
    "emit_csv",
    "run",
    "run_mdu",
    "run_random_deletion",
    "swiss_demo",
    "__version__",
]
