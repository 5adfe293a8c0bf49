import logging
from abc import ABC, abstractmethod

import numpy as np
from sympy import isprime, primefactors

from dlog_simulator.numtheory import mod_pow
from dlog_simulator.rng import uniform_below

logger = logging.getLogger(__name__)

GROUP_SEARCH_LIMIT = 100_000


class DlogVerifier(ABC):
    """Predicate accepting a candidate logarithm; pure and repeatable."""

    @abstractmethod
    def verify(self, candidate: int) -> bool:
        pass

    def __call__(self, candidate: int) -> bool:
        return self.verify(candidate)


class EqualityVerifier(DlogVerifier):
    """Simulation verifier: the true d is known."""

    def __init__(self, d: int):
        self.d = d

    def verify(self, candidate: int) -> bool:
        return candidate == self.d


class GroupVerifier(DlogVerifier):
    """Checks g^candidate = x in the order-r subgroup of (Z/pZ)^*."""

    def __init__(self, p: int, g: int, x: int):
        self.p = p
        self.g = g
        self.x = x

    def verify(self, candidate: int) -> bool:
        return mod_pow(self.g, candidate, self.p) == self.x

    @classmethod
    def for_logarithm(cls, p: int, g: int, d: int) -> "GroupVerifier":
        return cls(p, g, mod_pow(g, d, p))


def _has_order(g: int, r: int, p: int, factors: list[int]) -> bool:
    return mod_pow(g, r, p) == 1 and all(mod_pow(g, r // q, p) != 1 for q in factors)


def find_group(r: int, rng: np.random.Generator) -> tuple[int, int]:
    """
    A prime p = c r + 1 and an element g of order exactly r modulo p.

    The smallest cofactor c giving a prime p is used; g = h^c for random h.
    """
    if r < 2:
        raise ValueError(f"group order must be >= 2, got {r}")
    factors = [r] if isprime(r) else primefactors(r)

    for c in range(2, GROUP_SEARCH_LIMIT, 2 if r % 2 else 1):
        p = c * r + 1
        if not isprime(p):
            continue
        for _attempt in range(64):
            h = 2 + uniform_below(rng, p - 3)
            g = mod_pow(h, c, p)
            if _has_order(g, r, p, factors):
                logger.debug(f"Reference group: p={p} (c={c}), g={g}")
                return p, g
    raise ValueError(f"no prime p = c*r + 1 with c < {GROUP_SEARCH_LIMIT}")


# --- FACTORY ---
class VerifierFactory:
    @staticmethod
    def get_verifier(kind: str, **kwargs) -> DlogVerifier:
        if kind == "equality":
            return EqualityVerifier(kwargs["d"])
        elif kind == "group":
            return GroupVerifier(kwargs["p"], kwargs["g"], kwargs["x"])
        else:
            raise ValueError(f"unknown verifier: {kind}")
