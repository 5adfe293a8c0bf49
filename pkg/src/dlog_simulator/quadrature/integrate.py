"""
Extended-precision quadrature
=============================
Composite Simpson rule refined by interval halving, with Richardson
extrapolation across the halvings (Romberg table on Simpson estimates).
"""

import logging
from fractions import Fraction
from typing import Callable

from mpmath import mp, mpf
from pydantic import BaseModel, ConfigDict, Field, field_validator

from dlog_simulator.exceptions import ConvergenceError

logger = logging.getLogger(__name__)

Integrand = Callable[[mpf], mpf]


class QuadratureConfig(BaseModel):
    """Numerical parameters of every integral; hashable so results can be cached."""

    model_config = ConfigDict(frozen=True)

    precision_bits: int = Field(192, ge=64, description="mpmath working precision")
    base_panels: int = Field(64, ge=2, description="initial Simpson panels")
    refine_limit: int = Field(20, ge=1, description="maximum number of halvings")
    rel_tol: float = Field(1e-10, gt=0)
    abs_tol: float = Field(1e-40, ge=0)

    @field_validator("base_panels")
    @classmethod
    def _even_panels(cls, value: int) -> int:
        if value % 2:
            raise ValueError(f"base_panels must be even, got {value}")
        return value


def to_mpf(x) -> mpf:
    """Exact rationals are divided at working precision, never through float."""
    if isinstance(x, Fraction):
        return mpf(x.numerator) / x.denominator
    return mpf(x)


def simpson(
    f: Integrand, a, b, panels: int, cfg: QuadratureConfig | None = None
) -> mpf:
    """Plain composite Simpson rule with `panels` (even) subintervals."""
    if panels < 2 or panels % 2:
        raise ValueError(f"panels must be even and >= 2, got {panels}")
    cfg = cfg or QuadratureConfig()
    with mp.workprec(cfg.precision_bits):
        lo, hi = to_mpf(a), to_mpf(b)
        h = (hi - lo) / panels
        total = f(lo) + f(hi)
        for i in range(1, panels):
            total += (4 if i % 2 else 2) * f(lo + i * h)
        return total * h / 3


def integrate(f: Integrand, a, b, cfg: QuadratureConfig | None = None) -> mpf:
    """
    Integral of f over [a, b].

    Each halving only evaluates f at the new midpoints. The diagonal of the
    extrapolation table is accepted once two successive diagonal entries agree
    to max(rel_tol * |value|, abs_tol).

    Raises:
        ConvergenceError: after `refine_limit` halvings without agreement.
    """
    cfg = cfg or QuadratureConfig()
    with mp.workprec(cfg.precision_bits):
        lo, hi = to_mpf(a), to_mpf(b)
        if lo == hi:
            return mpf(0)

        n = cfg.base_panels
        h = (hi - lo) / n
        ends = f(lo) + f(hi)
        odd = sum((f(lo + i * h) for i in range(1, n, 2)), mpf(0))
        even = sum((f(lo + i * h) for i in range(2, n, 2)), mpf(0))

        table = [[(ends + 4 * odd + 2 * even) * h / 3]]
        for level in range(1, cfg.refine_limit + 1):
            n *= 2
            h /= 2
            even += odd
            odd = sum((f(lo + i * h) for i in range(1, n, 2)), mpf(0))

            row = [(ends + 4 * odd + 2 * even) * h / 3]
            for k in range(1, level + 1):
                factor = mpf(4) ** (k + 1) - 1
                row.append(row[k - 1] + (row[k - 1] - table[-1][k - 1]) / factor)
            table.append(row)

            previous, last = table[-2][-1], row[-1]
            if abs(last - previous) <= max(cfg.rel_tol * abs(last), cfg.abs_tol):
                return last

        logger.debug(f"No convergence on [{a}, {b}] after {cfg.refine_limit} halvings")
        raise ConvergenceError(
            f"Simpson/Richardson did not converge on [{a}, {b}]", previous, last
        )
