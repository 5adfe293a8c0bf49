"""
Post-processing
===============
Recovers d from a pair (j, k) knowing (m, ell, r). With

    z = (r j - {r j}) / 2^(m+ell)

the logarithm satisfies d = (t - round(r k / 2^(m+ell))) z^-1 (mod r) for some
|t| <= round((B + 1/2) / 2^ell) whenever (j, k) is B-good. When z is not
invertible modulo r, d is recovered modulo r / tau for the least tau with
gcd(z, r / tau) = 1 and the tau lifts are tested.
"""

import logging
from enum import Enum
from typing import Iterator

from pydantic import BaseModel, ConfigDict, Field

from dlog_simulator.exceptions import (
    InvalidInstanceError,
    NoInverseError,
    TauTooLargeError,
)
from dlog_simulator.kernel.schemas import FrequencyPair, PublicInstance
from dlog_simulator.numtheory import (
    mod_inverse,
    nearest_int,
    reduce_mod,
    reduce_signed,
    smallest_tau,
)
from dlog_simulator.solver.verifier import DlogVerifier

logger = logging.getLogger(__name__)

DEFAULT_TAU_BOUND = 2**20


class FailureReason(str, Enum):
    Z_ZERO = "z_zero"
    EXHAUSTED = "exhausted"
    TAU_TOO_LARGE = "tau_too_large"


class CandidateSet(BaseModel):
    model_config = ConfigDict(frozen=True)

    z: int
    tau: int = Field(..., ge=1)
    rounded_k: int = Field(..., description="round(r k / 2^(m+ell))")
    search_bound: int = Field(..., ge=0, description="largest |t| searched")
    candidates: list[int]


class SolveResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    d: int | None = None
    reason: FailureReason | None = None
    candidates_tested: int = 0
    candidate_set: CandidateSet | None = None

    @property
    def success(self) -> bool:
        return self.d is not None


def search_bound(B: int, ell: int) -> int:
    """round((B + 1/2) / 2^ell) = round((2B + 1) / 2^(ell+1))."""
    if B < 0:
        raise ValueError(f"B must be non-negative, got {B}")
    return nearest_int(2 * B + 1, 1 << (ell + 1))


def t_order(bound: int) -> Iterator[int]:
    """0, 1, -1, 2, -2, ... up to |t| = bound."""
    yield 0
    for t in range(1, bound + 1):
        yield t
        yield -t


def compute_z(pub: PublicInstance, j: int) -> int:
    N = pub.modulus
    if not 0 <= j < N:
        raise InvalidInstanceError(f"j={j} outside [0, {N})")
    rj = pub.r * j
    # exact: rj - {rj} is a multiple of N; reduced into [0, r) since z = r is possible
    return reduce_mod((rj - reduce_signed(rj, N)) // N, pub.r)


def enumerate_candidates(
    pub: PublicInstance,
    pair: FrequencyPair,
    B: int,
    tau_bound: int = DEFAULT_TAU_BOUND,
) -> CandidateSet:
    """
    Raises:
        NoInverseError: z = 0; the quantum algorithm has to be re-run.
        TauTooLargeError: the tau lifts exceed `tau_bound`.
    """
    N = pub.modulus
    if pair.k >= N:
        raise InvalidInstanceError(f"k={pair.k} outside [0, {N})")
    z = compute_z(pub, pair.j)
    if z == 0:
        raise NoInverseError(z, pub.r)

    tau = smallest_tau(z, pub.r)
    if tau > tau_bound:
        raise TauTooLargeError(tau, tau_bound)
    modulus = pub.r // tau
    inverse = mod_inverse(z, modulus) if modulus > 1 else 0

    rounded_k = nearest_int(pub.r * pair.k, N)
    bound = search_bound(B, pub.ell)

    seen: set[int] = set()
    candidates = []
    for t in t_order(bound):
        base = reduce_mod((t - rounded_k) * inverse, modulus)
        for i in range(tau):
            candidate = base + i * modulus
            if candidate not in seen:
                seen.add(candidate)
                candidates.append(candidate)

    return CandidateSet(
        z=z, tau=tau, rounded_k=rounded_k, search_bound=bound, candidates=candidates
    )


def solve(
    pub: PublicInstance,
    pair: FrequencyPair,
    B: int,
    verifier: DlogVerifier,
    tau_bound: int = DEFAULT_TAU_BOUND,
) -> SolveResult:
    """First candidate accepted by `verifier` in enumeration order."""
    try:
        candidate_set = enumerate_candidates(pub, pair, B, tau_bound)
    except NoInverseError:
        return SolveResult(reason=FailureReason.Z_ZERO)
    except TauTooLargeError as e:
        logger.debug(f"Pair ({pair.j}, {pair.k}): {e}")
        return SolveResult(reason=FailureReason.TAU_TOO_LARGE)

    for tested, candidate in enumerate(candidate_set.candidates, start=1):
        if verifier(candidate):
            return SolveResult(
                d=candidate, candidates_tested=tested, candidate_set=candidate_set
            )
    return SolveResult(
        reason=FailureReason.EXHAUSTED,
        candidates_tested=len(candidate_set.candidates),
        candidate_set=candidate_set,
    )
