"""
Exact output distribution
=========================
Brute-force probability of every pair (j, k) for tiny instances:

    P(j, k) = sum_e | sum_{a - b d = e (mod r)} exp(2 pi i (a j + b k) / N) |^2 / N^4

with N = 2^(m+ell) and a, b in [0, N). Every phase is an exact integer
reduced modulo N (or 2N) before it indexes a table of roots of unity.

Methods:
  - closed_form: per (j, residue c) geometric sum over a = c + n r, then a
    transform along b for each e;
  - fft: per e, 2-D transform of the residue-class indicator;
  - direct: per e, explicit DFT matrix products; tiny instances only.

All three paths run in float64 (complex128). Phases stay exact integers, so
each root of unity carries one rounding, and the sums over at most N^2 terms
keep the total normalized to 1e-12 up to m + ell = 12; nothing here needs
extended precision at those sizes. `pair_probability` evaluates one pair in
mpmath at a chosen precision to cross-check the float64 grid.
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np
import pandas as pd
from mpmath import fsum, mp, mpc, mpf

from dlog_simulator.exceptions import ResourceGuardError
from dlog_simulator.kernel.schemas import FrequencyPair, ProblemInstance
from dlog_simulator.outputs import atomic_write

logger = logging.getLogger(__name__)

DEFAULT_MAX_BITS = 12
DIRECT_MAX_BITS = 8
METHODS = ("closed_form", "fft", "direct")
# Rows of j transformed together by the closed-form path.
ROW_BLOCK = 256


@dataclass(frozen=True, eq=False)
class ExactDistribution:
    inst: ProblemInstance
    method: str
    probabilities: np.ndarray = field(repr=False)

    @property
    def total(self) -> float:
        return float(self.probabilities.sum())

    @cached_property
    def delta_grid(self) -> np.ndarray:
        """Delta of every pair, indexed [j, k]."""
        return delta_grid(self.inst)

    def fingerprint(self) -> dict:
        return self.inst.fingerprint()


# --- VECTORISED KERNEL MAPS ---


def _signed(values: np.ndarray, N: int) -> np.ndarray:
    v = np.mod(values, N)
    return np.where(2 * v >= N, v - N, v)


def argument_grid(inst: ProblemInstance) -> tuple[np.ndarray, np.ndarray]:
    """(alpha_d[j, k], alpha_r[j]) for every pair."""
    N = inst.modulus
    j = np.arange(N, dtype=np.int64)
    k = np.arange(N, dtype=np.int64)
    alpha_r = _signed(j * inst.r, N)
    alpha_d = _signed(np.mod(j * inst.d, N)[:, None] + k[None, :], N)
    return alpha_d, alpha_r


def delta_grid(inst: ProblemInstance) -> np.ndarray:
    alpha_d, alpha_r = argument_grid(inst)
    r = inst.r
    # nearest integer to alpha_r d / r, ties toward minus infinity
    rounded = -((r - 2 * alpha_r * inst.d) // (2 * r))
    return alpha_d - rounded[:, None]


# --- EXACT PATHS ---


def _roots(N: int) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(N) / N)


def _closed_form(inst: ProblemInstance) -> np.ndarray:
    N, r, d = inst.modulus, inst.r, inst.d
    omega = _roots(N)
    half = np.exp(1j * np.pi * np.arange(2 * N) / N)

    j = np.arange(N, dtype=np.int64)
    c = np.arange(r, dtype=np.int64)
    counts = (N - c + r - 1) // r
    x = np.mod(j * r, N)[:, None]

    # sum_{n < cnt} w^(x n) = e^(i pi x (cnt - 1) / N) sin(pi x cnt / N) / sin(pi x / N)
    with np.errstate(divide="ignore", invalid="ignore"):
        geom = (
            half[np.mod(x * (counts[None, :] - 1), 2 * N)]
            * np.sin(np.pi * np.mod(x * counts[None, :], 2 * N) / N)
            / np.sin(np.pi * x / N)
        )
    geom = np.where(x == 0, counts[None, :].astype(complex), geom)
    table = omega[np.mod(j[:, None] * c[None, :], N)] * geom

    b = np.arange(N, dtype=np.int64)
    probabilities = np.zeros((N, N))
    for start in range(0, N, ROW_BLOCK):
        rows = table[start : start + ROW_BLOCK]
        for e in range(r):
            amplitude = N * np.fft.ifft(rows[:, np.mod(e + b * d, r)], axis=1)
            probabilities[start : start + ROW_BLOCK] += np.abs(amplitude) ** 2
        logger.debug(f"closed form: rows {start}..{start + len(rows) - 1} done")
    return probabilities


def _fft(inst: ProblemInstance) -> np.ndarray:
    N, r, d = inst.modulus, inst.r, inst.d
    a = np.arange(N, dtype=np.int64)
    residues = np.mod(a[:, None] - a[None, :] * d, r)
    probabilities = np.zeros((N, N))
    for e in range(r):
        amplitude = N * N * np.fft.ifft2(residues == e)
        probabilities += np.abs(amplitude) ** 2
    return probabilities


def _direct(inst: ProblemInstance) -> np.ndarray:
    N, r, d = inst.modulus, inst.r, inst.d
    a = np.arange(N, dtype=np.int64)
    dft = _roots(N)[np.mod(a[:, None] * a[None, :], N)]
    residues = np.mod(a[:, None] - a[None, :] * d, r)
    probabilities = np.zeros((N, N))
    for e in range(r):
        # sum_{a, b} [a - b d = e] w^(a j) w^(b k)
        amplitude = dft @ (residues == e).astype(complex) @ dft
        probabilities += np.abs(amplitude) ** 2
    return probabilities


_PATHS = {"closed_form": _closed_form, "fft": _fft, "direct": _direct}


def exact_distribution(
    inst: ProblemInstance,
    method: str = "closed_form",
    max_bits: int = DEFAULT_MAX_BITS,
) -> ExactDistribution:
    """
    Raises:
        ResourceGuardError: m + ell above `max_bits` (or above 8 for `direct`).
    """
    if method not in _PATHS:
        raise ValueError(f"unknown method {method!r}, expected one of {METHODS}")
    bits = inst.m + inst.ell
    limit = min(max_bits, DIRECT_MAX_BITS) if method == "direct" else max_bits
    if bits > limit:
        raise ResourceGuardError(f"m + ell = {bits} exceeds the oracle limit {limit}")

    logger.info(f"🔄 Exact distribution ({method}) for {inst.fingerprint()}")
    probabilities = _PATHS[method](inst) / float(inst.modulus) ** 4
    dist = ExactDistribution(inst=inst, method=method, probabilities=probabilities)
    logger.info(f"✅ Exact distribution total = {dist.total:.15f}")
    return dist


def pair_probability(
    inst: ProblemInstance, pair: FrequencyPair, precision_bits: int = 128
) -> mpf:
    """
    P(j, k) of one pair by the defining double sum, in extended precision.

    Raises:
        ResourceGuardError: m + ell above 8.
    """
    bits = inst.m + inst.ell
    if bits > DIRECT_MAX_BITS:
        raise ResourceGuardError(
            f"m + ell = {bits} exceeds the single-pair limit {DIRECT_MAX_BITS}"
        )
    N, r, d = inst.modulus, inst.r, inst.d
    with mp.workprec(precision_bits):
        roots = [mp.expjpi(mpf(2 * t) / N) for t in range(N)]
        sums = [mpc(0)] * r
        for a in range(N):
            for b in range(N):
                sums[(a - b * d) % r] += roots[(a * pair.j + b * pair.k) % N]
        return fsum(abs(s) ** 2 for s in sums) / mpf(N) ** 4


def exact_capture(dist: ExactDistribution, B: int) -> float:
    """Exact mass of the B-good pairs."""
    if B < 0:
        raise ValueError(f"B must be non-negative, got {B}")
    return float(dist.probabilities[np.abs(dist.delta_grid) <= B].sum())


def exact_delta_masses(dist: ExactDistribution, B_max: int) -> dict[int, float]:
    grid = dist.delta_grid
    return {
        Delta: float(dist.probabilities[grid == Delta].sum())
        for Delta in range(-B_max, B_max + 1)
    }


def write_distribution(
    dist: ExactDistribution, path: str | Path, extra_header: list[str] | None = None
) -> Path:
    """Tab-separated j, k, probability with an instance header line."""
    inst = dist.inst
    N = inst.modulus
    j, k = np.divmod(np.arange(N * N), N)
    frame = pd.DataFrame({"j": j, "k": k, "probability": dist.probabilities.ravel()})
    header = [
        f"# m={inst.m} ell={inst.ell} r={hex(inst.r)} d={hex(inst.d)} "
        f"method={dist.method}",
        *(extra_header or []),
    ]
    body = frame.to_csv(sep="\t", index=False, float_format="%.17g")
    return atomic_write(path, "\n".join(header) + "\n" + body)
