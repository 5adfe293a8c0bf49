"""
Number theory primitives
========================
Exact big-integer arithmetic shared by every module: both modular reduction
conventions, nearest-integer rounding of rationals, inverses, the power-of-two
valuation of the group order and the tau divisor of the post-processing.
"""

from math import gcd

from dlog_simulator.exceptions import InvalidModulusError, NoInverseError


def _check_modulus(n: int, minimum: int = 1) -> None:
    if n < minimum:
        raise InvalidModulusError(f"modulus must be >= {minimum}, got {n}")


def reduce_mod(u: int, n: int) -> int:
    """u mod n constrained to [0, n)."""
    _check_modulus(n)
    return u % n


def reduce_signed(u: int, n: int) -> int:
    """{u}_n constrained to [-n/2, n/2)."""
    v = reduce_mod(u, n)
    return v - n if 2 * v >= n else v


def nearest_int(numerator: int, denominator: int) -> int:
    """
    round(numerator / denominator), exact, ties toward minus infinity.

    With this tie rule round(x) - x always lies in [-1/2, 1/2).
    """
    if denominator <= 0:
        raise InvalidModulusError(f"denominator must be positive, got {denominator}")
    # ceil(x - 1/2) = -floor((q - 2p) / 2q)
    return -((denominator - 2 * numerator) // (2 * denominator))


def kappa(r: int) -> int:
    """Exponent of the greatest power of two dividing r."""
    if r <= 0:
        raise ValueError(f"kappa is defined for positive integers, got {r}")
    return (r & -r).bit_length() - 1


def mod_inverse(z: int, n: int) -> int:
    """Inverse of z modulo n; raises NoInverseError when gcd(z, n) != 1."""
    _check_modulus(n, minimum=2)
    try:
        return pow(z, -1, n)
    except ValueError:
        raise NoInverseError(z, n) from None


def mod_pow(g: int, e: int, n: int) -> int:
    """g^e mod n for e >= 0."""
    _check_modulus(n, minimum=2)
    if e < 0:
        raise ValueError(f"exponent must be non-negative, got {e}")
    return pow(g, e, n)


def smallest_tau(z: int, r: int) -> int:
    """
    Smallest divisor tau of r such that gcd(z, r / tau) = 1.

    The minimal tau is the r-part of every prime shared by z and r, so it is
    peeled off with repeated gcds instead of enumerating the divisors of r.
    """
    _check_modulus(r, minimum=2)
    rest = r
    while (g := gcd(z, rest)) > 1:
        rest //= g
    return r // rest
