import numpy as np

from dlog_simulator.numtheory import reduce_mod
from dlog_simulator.rng import uniform_below


def randomize_instance(
    d_prime: int, r: int, rng: np.random.Generator
) -> tuple[int, int]:
    """
    Shift a logarithm by a uniform offset: x' = [d']g becomes x = x' + [t]g,
    so d = d' + t (mod r) is uniform whatever d' is.
    """
    if not 0 <= d_prime < r:
        raise ValueError(f"d'={d_prime} outside [0, {r})")
    t_offset = uniform_below(rng, r)
    return reduce_mod(d_prime + t_offset, r), t_offset


def derandomize(d: int, t_offset: int, r: int) -> int:
    return reduce_mod(d - t_offset, r)
