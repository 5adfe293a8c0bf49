"""
Histogram sampling
==================
Inverse-transform sampling of (Delta, u-cell) from a built histogram, and
conversion of a sampled cell into a simulated quantum output (j, k).
"""

import logging
from dataclasses import dataclass

import numpy as np

from dlog_simulator.exceptions import EmptyCellError
from dlog_simulator.histogram.builder import Histogram, HistogramCell
from dlog_simulator.kernel.density import pair_from_arguments
from dlog_simulator.kernel.schemas import ProblemInstance
from dlog_simulator.numtheory import nearest_int
from dlog_simulator.rng import uniform_below, uniform_unit

logger = logging.getLogger(__name__)

OUTSIDE = -1


@dataclass(frozen=True)
class SampledPair:
    j: int
    k: int
    Delta: int
    alpha_r: int
    alpha_d: int


@dataclass(frozen=True)
class OutsideCaptureOutcome:
    """Residual mass 1 - total_mass not covered by the histogram."""

    def __repr__(self) -> str:
        return "OutsideCapture"


OutsideCapture = OutsideCaptureOutcome()

SampledOutcome = SampledPair | OutsideCaptureOutcome


def _locate(hist: Histogram, draws: np.ndarray) -> np.ndarray:
    idx = np.searchsorted(hist.cumulative, draws, side="right")
    return np.where(idx >= len(hist), OUTSIDE, idx)


def sample_cell(
    hist: Histogram, rng: np.random.Generator
) -> HistogramCell | OutsideCaptureOutcome:
    """A cell with probability cell.mass, OutsideCapture with 1 - total_mass."""
    idx = int(_locate(hist, np.array([uniform_unit(rng)]))[0])
    if idx == OUTSIDE:
        return OutsideCapture
    return hist.cells[idx]


def sample_cells(hist: Histogram, rng: np.random.Generator, count: int) -> np.ndarray:
    """Vectorised sample_cell: cell indices, OUTSIDE (-1) for the residual mass."""
    return _locate(hist, rng.random(count))


def _first_reaching(key, target: int, lo: int, hi: int) -> int:
    """Smallest i in [lo, hi) with key(i) >= target, hi if none; key nondecreasing."""
    while lo < hi:
        mid = (lo + hi) // 2
        if key(mid) < target:
            lo = mid + 1
        else:
            hi = mid
    return lo


def realizable_alpha_r(inst: ProblemInstance, cell: HistogramCell) -> tuple[int, int]:
    """
    Admissible alpha_r of the cell whose alpha_d = round(alpha_r d / r) + Delta
    stays inside [-N/2, N/2), as a closed range [first, last] of multiples of
    2^kappa_r. Near the register edge adding Delta can leave the range; those
    alpha_r have no pair (j, k) with this Delta and are excluded.
    """
    step = 1 << inst.kappa
    half = inst.modulus // 2
    first, last = cell.alpha_r_bounds(inst.r)
    lowest = -(-first // step)
    count = last // step - lowest + 1
    if count <= 0:
        raise EmptyCellError(f"no admissible alpha_r in [{cell.u_lo}, {cell.u_hi}) * r")

    # nondecreasing in i since d >= 0
    def alpha_d(i: int) -> int:
        return nearest_int((lowest + i) * step * inst.d, inst.r) + cell.Delta

    lo = _first_reaching(alpha_d, -half, 0, count)
    hi = _first_reaching(alpha_d, half, lo, count)
    if lo >= hi:
        raise EmptyCellError(
            f"every alpha_r in [{cell.u_lo}, {cell.u_hi}) * r puts alpha_d "
            f"outside [-{half}, {half}) for Delta={cell.Delta}"
        )
    return (lowest + lo) * step, (lowest + hi - 1) * step


def cell_to_pair(
    inst: ProblemInstance, cell: HistogramCell, rng: np.random.Generator
) -> SampledPair:
    """
    Draw a realizable alpha_r uniformly inside the cell, set
    alpha_d = round(alpha_r d / r) + Delta, and solve for (j, k). When
    2^kappa_r > 1 one of the 2^kappa_r solutions j is chosen uniformly.

    Raises EmptyCellError when no alpha_r of the cell is realizable.
    """
    step = 1 << inst.kappa
    first, last = realizable_alpha_r(inst, cell)
    alpha_r = first + uniform_below(rng, (last - first) // step + 1) * step
    alpha_d = nearest_int(alpha_r * inst.d, inst.r) + cell.Delta
    branch = uniform_below(rng, step) if step > 1 else 0
    pair = pair_from_arguments(inst, alpha_d, alpha_r, branch)
    return SampledPair(
        j=pair.j, k=pair.k, Delta=cell.Delta, alpha_r=alpha_r, alpha_d=alpha_d
    )


def sample(
    inst: ProblemInstance, hist: Histogram, rng: np.random.Generator, count: int
) -> list[SampledOutcome]:
    """
    `count` independent outcomes; fixed seed gives an identical list.

    A draw landing in a cell with no realizable alpha_r counts as outside.
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    outcomes: list[SampledOutcome] = []
    for idx in sample_cells(hist, rng, count):
        if idx == OUTSIDE:
            outcomes.append(OutsideCapture)
            continue
        try:
            outcomes.append(cell_to_pair(inst, hist.cells[int(idx)], rng))
        except EmptyCellError as e:
            logger.debug(f"Cell {int(idx)} unrealizable: {e}")
            outcomes.append(OutsideCapture)
    outside = sum(1 for o in outcomes if o is OutsideCapture)
    logger.debug(f"Sampled {count} outcomes, {outside} outside the histogram")
    return outcomes
