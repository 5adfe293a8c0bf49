"""
Heuristic probability model
===========================
Maps between frequency pairs (j, k), signed arguments (alpha_d, alpha_r) and
angles, the B-good decomposition, and the closed-form heuristic probability
P(theta_d, theta_r) of observing a pair.

Every cos(x) - 1 of the closed form is evaluated as -2 sin^2(x / 2): the
dominant angles are of size 2^-m and the cosine form cancels catastrophically.
"""

import logging
from fractions import Fraction

from mpmath import mp, mpf, pi, sin

from dlog_simulator.exceptions import InvalidInstanceError
from dlog_simulator.kernel.schemas import (
    AnglePair,
    ArgumentPair,
    FrequencyPair,
    GoodnessDecomposition,
    ProblemInstance,
)
from dlog_simulator.numtheory import mod_inverse, nearest_int, reduce_mod, reduce_signed

logger = logging.getLogger(__name__)

DEFAULT_PRECISION = 192

# Below |phi| * 2^(m+ell) < 2^-32 the phi = 0 branch is used.
PHI_THRESHOLD_EXP = -32
# Removable singularities: analytic limit within 2^-40 of the singular point.
SINGULAR_EXP = -40


def arguments_of(inst: ProblemInstance, pair: FrequencyPair) -> ArgumentPair:
    N = inst.modulus
    if pair.j >= N or pair.k >= N:
        raise InvalidInstanceError(f"pair ({pair.j}, {pair.k}) outside [0, {N})")
    return ArgumentPair(
        alpha_d=reduce_signed(inst.d * pair.j + pair.k, N),
        alpha_r=reduce_signed(inst.r * pair.j, N),
    )


def pair_from_arguments(
    inst: ProblemInstance, alpha_d: int, alpha_r: int, branch: int = 0
) -> FrequencyPair:
    """
    Solve {rj} = alpha_r for j, then {dj + k} = alpha_d for k.

    An admissible alpha_r is reached by 2^kappa_r values of j; `branch` in
    [0, 2^kappa_r) selects one of them.
    """
    N = inst.modulus
    kap = inst.kappa
    if alpha_r % (1 << kap):
        raise InvalidInstanceError(
            f"alpha_r={alpha_r} is not admissible for r={inst.r}"
        )
    if not 0 <= branch < (1 << kap):
        raise InvalidInstanceError(f"branch {branch} outside [0, 2^{kap})")

    step = N >> kap
    j0 = reduce_mod((alpha_r >> kap) * mod_inverse(inst.r >> kap, step), step)
    j = j0 + branch * step
    k = reduce_mod(alpha_d - inst.d * j, N)
    return FrequencyPair(j=j, k=k)


def decompose(inst: ProblemInstance, args: ArgumentPair) -> GoodnessDecomposition:
    rounded = nearest_int(args.alpha_r * inst.d, inst.r)
    return GoodnessDecomposition(
        Delta=args.alpha_d - rounded,
        delta_Delta=Fraction(rounded * inst.r - args.alpha_r * inst.d, inst.r),
    )


def is_b_good(inst: ProblemInstance, pair: FrequencyPair, B: int) -> bool:
    return abs(decompose(inst, arguments_of(inst, pair)).Delta) <= B


def angles_of(
    inst: ProblemInstance, args: ArgumentPair, precision_bits: int = DEFAULT_PRECISION
) -> AnglePair:
    with mp.workprec(precision_bits):
        scale = 2 * pi / inst.modulus
        return AnglePair(theta_d=scale * args.alpha_d, theta_r=scale * args.alpha_r)


def phi(
    inst: ProblemInstance, args: ArgumentPair, precision_bits: int = DEFAULT_PRECISION
) -> mpf:
    """(2 pi / 2^(m+ell)) (alpha_d - alpha_r d / r), from the exact rational."""
    numerator = args.alpha_d * inst.r - args.alpha_r * inst.d
    with mp.workprec(precision_bits):
        return 2 * pi * mpf(numerator) / (inst.r * inst.modulus)


def _sinc2(x: mpf) -> mpf:
    """sin^2(x) / x^2 with its limit 1 at x = 0."""
    if abs(x) < mpf(2) ** SINGULAR_EXP:
        return mpf(1)
    return (sin(x) / x) ** 2


def _dirichlet(phi_value: mpf, N: int) -> mpf:
    """(cos(N phi) - 1) / (cos(phi) - 1) = sin^2(N phi / 2) / sin^2(phi / 2)."""
    if abs(phi_value) * N < mpf(2) ** PHI_THRESHOLD_EXP:
        return mpf(N) ** 2
    return sin(N * phi_value / 2) ** 2 / sin(phi_value / 2) ** 2


def heuristic_density(
    inst: ProblemInstance, angles: AnglePair, precision_bits: int = DEFAULT_PRECISION
) -> mpf:
    """
    Closed-form heuristic probability P(theta_d, theta_r) of one pair (j, k).

        P = r / 2^(4(m+ell)) * 2(1 - cos(2^(m+ell) theta_r / r)) / theta_r^2
              * (cos(2^(m+ell) phi) - 1) / (cos(phi) - 1)

    with phi = theta_d - theta_r d / r; the phi = 0 form replaces the last
    factor by 2^(2(m+ell)).
    """
    N = inst.modulus
    r = inst.r
    # Arguments of the form 2^(m+ell) * phi need m + ell extra bits.
    with mp.workprec(precision_bits + inst.m + inst.ell + 64):
        theta_d = mpf(angles.theta_d)
        theta_r = mpf(angles.theta_r)
        phi_value = theta_d - theta_r * (mpf(inst.d) / r)

        # 2(1 - cos(x theta_r)) / theta_r^2 with x = N / r
        half = N * theta_r / (2 * r)
        outer = (mpf(N) / r) ** 2 * _sinc2(half)

        value = r * outer * _dirichlet(phi_value, N) / mpf(N) ** 4
    with mp.workprec(precision_bits):
        return +value


def density_of_arguments(
    inst: ProblemInstance, args: ArgumentPair, precision_bits: int = DEFAULT_PRECISION
) -> mpf:
    """
    P at the angles of an argument pair, with every periodic argument reduced
    exactly as a rational before it is converted to a real.

    Equals sinc^2(pi alpha_r / r) * D / (r 2^(2(m+ell))) where D is the
    Dirichlet factor of phi.
    """
    N = inst.modulus
    r = inst.r
    numerator = args.alpha_d * r - args.alpha_r * inst.d
    with mp.workprec(precision_bits + 64):
        if args.alpha_r == 0:
            outer = mpf(1)
        else:
            # sin^2 has period pi: reduce alpha_r modulo r first
            wrapped = sin(pi * mpf(args.alpha_r % r) / r) ** 2
            outer = wrapped / (pi * mpf(args.alpha_r) / r) ** 2

        # N phi / 2 = pi numerator / r, phi / 2 = pi numerator / (r N)
        if abs(2 * pi * mpf(numerator) / r) < mpf(2) ** PHI_THRESHOLD_EXP:
            dirichlet = mpf(N) ** 2
        else:
            top = sin(pi * mpf(numerator % r) / r) ** 2
            bottom = sin(pi * mpf(numerator) / (r * N)) ** 2
            dirichlet = top / bottom

        value = outer * dirichlet / (r * mpf(N) ** 2)
    with mp.workprec(precision_bits):
        return +value
