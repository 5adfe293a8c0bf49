from dlog_simulator.solver.postprocess import (
    CandidateSet,
    FailureReason,
    SolveResult,
    compute_z,
    enumerate_candidates,
    search_bound,
    solve,
)
from dlog_simulator.solver.randomization import derandomize, randomize_instance
from dlog_simulator.solver.verifier import (
    DlogVerifier,
    EqualityVerifier,
    GroupVerifier,
    VerifierFactory,
    find_group,
)

__all__ = [
    "CandidateSet",
    "DlogVerifier",
    "EqualityVerifier",
    "FailureReason",
    "GroupVerifier",
    "SolveResult",
    "VerifierFactory",
    "compute_z",
    "derandomize",
    "enumerate_candidates",
    "find_group",
    "randomize_instance",
    "search_bound",
    "solve",
]
