"""
Histogram construction
======================
Piecewise integration of the capture probability over small intervals of
u = alpha_r / r for each fixed Delta with |Delta| <= B_max.

Cell geometry (positive side, mirrored for u < 0):
  - [0, 1] is cut into 16 * cells_per_unit cells, the first one refined
    geometrically toward u = 0 down to width 2^-20;
  - beyond 1 there are cells_per_unit cells per unit, the last one truncated
    at the end of the admissible range.
Cells holding no admissible alpha_r are merged into a neighbour. The outer
integral of a cell does not depend on Delta, so it is computed once per cell.
"""

import logging
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from functools import cached_property
from math import ceil

import numpy as np
from mpmath import mp, nstr

from dlog_simulator.exceptions import EmptyCellError
from dlog_simulator.kernel.schemas import ProblemInstance
from dlog_simulator.quadrature.capture import (
    half_range,
    normalized_delta_integral,
    outer_integral,
)
from dlog_simulator.quadrature.integrate import QuadratureConfig

logger = logging.getLogger(__name__)

FINE_CELLS_PER_UNIT = 16
FINEST_WIDTH = Fraction(1, 2**20)
MASS_DIGITS = 40
# Cells are narrow: fewer initial panels than a whole unit interval needs.
CELL_PANELS = 8


@dataclass(frozen=True, slots=True)
class HistogramCell:
    Delta: int
    u_lo: Fraction
    u_hi: Fraction
    mass: Decimal

    def alpha_r_bounds(self, r: int) -> tuple[int, int]:
        """Integer alpha_r in [u_lo r, u_hi r) as the closed range [first, last]."""
        return ceil(self.u_lo * r), ceil(self.u_hi * r) - 1


@dataclass(frozen=True)
class Histogram:
    """
    Immutable (Delta, u-interval) histogram of one instance.

    Cells are ordered by Delta, then by u. Sampling goes through the cumulative
    float64 index; masses themselves are exact 40-digit decimals.
    """

    m: int
    ell: int
    r: int
    d: int
    B_max: int
    precision_bits: int
    cells: tuple[HistogramCell, ...] = field(repr=False)

    @property
    def instance(self) -> ProblemInstance:
        return ProblemInstance(m=self.m, ell=self.ell, r=self.r, d=self.d)

    @cached_property
    def total_mass(self) -> Decimal:
        return sum((cell.mass for cell in self.cells), Decimal(0))

    @cached_property
    def cumulative(self) -> np.ndarray:
        return np.cumsum(np.array([float(cell.mass) for cell in self.cells]))

    def delta_masses(self) -> dict[int, Decimal]:
        """Mass per Delta value."""
        masses: dict[int, Decimal] = {}
        for cell in self.cells:
            masses[cell.Delta] = masses.get(cell.Delta, Decimal(0)) + cell.mass
        return masses

    def __len__(self) -> int:
        return len(self.cells)


# --- CELL GEOMETRY ---


def _positive_edges(upper: Fraction, cells_per_unit: int) -> list[Fraction]:
    fine = Fraction(1, FINE_CELLS_PER_UNIT * cells_per_unit)

    refined = []
    width = fine / 2
    while width >= FINEST_WIDTH:
        refined.append(width)
        width /= 2
    edges = [Fraction(0), *reversed(refined)]

    edges += [fine * i for i in range(1, FINE_CELLS_PER_UNIT * cells_per_unit + 1)]
    coarse = Fraction(1, cells_per_unit)
    edges += [1 + coarse * i for i in range(1, ceil((upper - 1) / coarse) + 1)]

    edges = [e for e in edges if e < upper]
    edges.append(upper)
    return edges


def admissible_count(lo: Fraction, hi: Fraction, r: int, step: int) -> int:
    """Number of multiples of `step` in [lo r, hi r)."""
    first = ceil(lo * r)
    last = ceil(hi * r) - 1
    if last < first:
        return 0
    return last // step - (-(-first // step)) + 1


def _merge_empty(edges: list[Fraction], r: int, step: int) -> list[Fraction]:
    merged = [edges[0]]
    for edge in edges[1:]:
        if admissible_count(merged[-1], edge, r, step) > 0:
            merged.append(edge)
    if merged[-1] != edges[-1]:
        if len(merged) == 1:
            raise EmptyCellError(f"no admissible alpha_r in [{edges[0]}, {edges[-1]})")
        merged[-1] = edges[-1]
    return merged


def cell_edges(inst: ProblemInstance, cells_per_unit: int) -> list[Fraction]:
    """Sorted u edges over the admissible range, every cell non-empty."""
    upper = half_range(inst)
    positive = _positive_edges(upper, cells_per_unit)
    edges = [-e for e in reversed(positive[1:])] + positive
    return _merge_empty(edges, inst.r, 1 << inst.kappa)


def quantize_mass(value) -> Decimal:
    return Decimal(nstr(value, MASS_DIGITS, strip_zeros=False))


# --- BUILD ---


def build(
    inst: ProblemInstance,
    B_max: int,
    cells_per_unit: int,
    cfg: QuadratureConfig,
) -> Histogram:
    """
    Integrate every (Delta, cell) mass.

    mass = 2^kappa_r * int_cell sin^2(pi u) / (pi u)^2 du * I(Delta) / 2^(2(m+ell))
    """
    if B_max < 0:
        raise ValueError(f"B_max must be non-negative, got {B_max}")
    if cells_per_unit < 2:
        raise ValueError(f"cells_per_unit must be >= 2, got {cells_per_unit}")

    edges = cell_edges(inst, cells_per_unit)
    bits = inst.m + inst.ell
    multiplicity = 1 << inst.kappa
    cell_cfg = cfg.model_copy(update={"base_panels": CELL_PANELS})
    logger.info(
        f"🔄 Building histogram: {len(edges) - 1} u-cells "
        f"x {2 * B_max + 1} Delta values"
    )

    with mp.workprec(cfg.precision_bits):
        outer = [
            multiplicity * outer_integral(lo, hi, cell_cfg)
            for lo, hi in zip(edges, edges[1:])
        ]
        cells = []
        for Delta in range(-B_max, B_max + 1):
            inner = normalized_delta_integral(bits, Delta, cfg)
            for (lo, hi), weight in zip(zip(edges, edges[1:]), outer):
                mass = quantize_mass(weight * inner)
                cells.append(HistogramCell(Delta=Delta, u_lo=lo, u_hi=hi, mass=mass))
            logger.debug(f"Delta={Delta}: inner={nstr(inner, 12)}")

    hist = Histogram(
        m=inst.m,
        ell=inst.ell,
        r=inst.r,
        d=inst.d,
        B_max=B_max,
        precision_bits=cfg.precision_bits,
        cells=tuple(cells),
    )
    logger.info(
        f"✅ Histogram built: {len(hist)} cells, total mass {hist.total_mass:.6f}"
    )
    return hist
