from dlog_simulator.kernel.density import (
    angles_of,
    arguments_of,
    decompose,
    density_of_arguments,
    heuristic_density,
    is_b_good,
    pair_from_arguments,
    phi,
)
from dlog_simulator.kernel.schemas import (
    AnglePair,
    ArgumentPair,
    FrequencyPair,
    GoodnessDecomposition,
    ProblemInstance,
    PublicInstance,
)

__all__ = [
    "AnglePair",
    "ArgumentPair",
    "FrequencyPair",
    "GoodnessDecomposition",
    "ProblemInstance",
    "PublicInstance",
    "angles_of",
    "arguments_of",
    "decompose",
    "density_of_arguments",
    "heuristic_density",
    "is_b_good",
    "pair_from_arguments",
    "phi",
]
