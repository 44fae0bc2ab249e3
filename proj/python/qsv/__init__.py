"""Measurement-sequence planning and quantum state verification."""

from qsv._core import (
    CompatibleSetSpec,
    ExperimentConfig,
    InfeasibleError,
    ObservableSet,
    QsvError,
    RemeasureError,
    SequencePlan,
    SolverError,
    bures_from_fidelity,
    bures_pure,
    complete_sequence,
    cross_evaluate_beta,
    distance_extrema,
    estimate_state,
    extremize_linear,
    hs_distance,
    hs_inner,
    is_information_complete,
    pauli_projector_set,
    perturb_state,
    plan_ias,
    plan_ios,
    plan_os,
    plan_random,
    random_pure_target,
    reconstruct_state,
    run_av,
    run_experiment,
    run_vm,
)

__all__ = [
    "CompatibleSetSpec",
    "ExperimentConfig",
    "InfeasibleError",
    "ObservableSet",
    "QsvError",
    "RemeasureError",
    "SequencePlan",
    "SolverError",
    "bures_from_fidelity",
    "bures_pure",
    "complete_sequence",
    "cross_evaluate_beta",
    "distance_extrema",
    "estimate_state",
    "extremize_linear",
    "hs_distance",
    "hs_inner",
    "is_information_complete",
    "pauli_projector_set",
    "perturb_state",
    "plan_ias",
    "plan_ios",
    "plan_os",
    "plan_random",
    "random_pure_target",
    "reconstruct_state",
    "run_av",
    "run_experiment",
    "run_vm",
]
