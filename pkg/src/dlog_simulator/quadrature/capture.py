"""
Capture probability
===================
Probability mass on B-good pairs,

    2^kappa_r r / 2^(2(m+ell))
        * int (1 - cos(2 pi alpha_r / r)) / (2 pi^2 alpha_r^2) d alpha_r
        * sum_{|Delta| <= B} int_{-1/2}^{1/2} (cos(2 pi delta) - 1)
            / (cos(2 pi (Delta + delta) / 2^(m+ell)) - 1) d delta

with alpha_r over [-2^(m+ell-kappa_r-1), 2^(m+ell-kappa_r-1)].

The outer integral is taken in u = alpha_r / r, where the integrand
sin^2(pi u) / (pi u)^2 oscillates with period one; it is split at every
integer u and at u = +-1/2. The inner integrals are kept normalised by
2^(2(m+ell)) and cached per (m + ell, Delta).
"""

import io
import logging
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import ceil, floor

import numpy as np
import pandas as pd
from mpmath import mp, mpf, pi, sin

from dlog_simulator.exceptions import InvalidInstanceError, ReportFormatError
from dlog_simulator.kernel.schemas import PublicInstance
from dlog_simulator.quadrature.contracts import validate_capture_table
from dlog_simulator.quadrature.integrate import QuadratureConfig, integrate

logger = logging.getLogger(__name__)

SINGULAR_EXP = -40

HEADER_PATTERN = re.compile(r"^# m=(\d+) r=(0x[0-9a-f]+) precision=(\d+)$")


# --- INTEGRANDS ---


def sinc2(u: mpf) -> mpf:
    """sin^2(pi u) / (pi u)^2, equal to 1 at u = 0."""
    if abs(u) < mpf(2) ** SINGULAR_EXP:
        return mpf(1)
    return (sin(pi * u) / (pi * u)) ** 2


def _delta_integrand(bits: int, Delta: int):
    N = mpf(2) ** bits

    def f(delta: mpf) -> mpf:
        x = Delta + delta
        if abs(x) < mpf(2) ** SINGULAR_EXP:
            return mpf(1)
        # (cos(2 pi delta) - 1) / (cos(2 pi x / N) - 1) / N^2, as sin^2 ratios
        return (sin(pi * delta) / (N * sin(pi * x / N))) ** 2

    return f


def half_range(pub: PublicInstance) -> Fraction:
    """Upper limit of the outer integral in u = alpha_r / r."""
    return Fraction(pub.modulus >> (pub.kappa + 1), pub.r)


def _breakpoints(lo: Fraction, hi: Fraction) -> list[Fraction]:
    points = {lo, hi}
    points.update(Fraction(n) for n in range(floor(lo) + 1, ceil(hi)))
    points.update(p for p in (Fraction(-1, 2), Fraction(1, 2)) if lo < p < hi)
    return sorted(points)


def outer_integral(lo, hi, cfg: QuadratureConfig) -> mpf:
    """Integral of sin^2(pi u) / (pi u)^2 over [lo, hi] in u units."""
    lo, hi = Fraction(lo), Fraction(hi)
    if lo >= hi:
        raise ValueError(f"empty interval [{lo}, {hi}]")
    points = _breakpoints(lo, hi)
    with mp.workprec(cfg.precision_bits):
        total = mpf(0)
        for a, b in zip(points, points[1:]):
            total += integrate(sinc2, a, b, cfg)
        return total


# --- PUBLIC INTEGRALS ---


@lru_cache(maxsize=None)
def normalized_delta_integral(bits: int, Delta: int, cfg: QuadratureConfig) -> mpf:
    """Inner integral for fixed Delta divided by 2^(2 bits); bits = m + ell."""
    if abs(Delta) > 1 << (bits - 1):
        raise InvalidInstanceError(f"|Delta|={abs(Delta)} exceeds 2^{bits - 1}")
    f = _delta_integrand(bits, Delta)
    with mp.workprec(cfg.precision_bits):
        left = integrate(f, Fraction(-1, 2), 0, cfg)
        return left + integrate(f, 0, Fraction(1, 2), cfg)


def delta_integral(m: int, ell: int, Delta: int, cfg: QuadratureConfig) -> mpf:
    """
    int_{-1/2}^{1/2} (cos(2 pi delta) - 1)
        / (cos(2 pi (Delta + delta) / 2^(m+ell)) - 1) d delta

    The removable singularity at Delta + delta = 0 takes its limit 2^(2(m+ell)).
    """
    bits = m + ell
    with mp.workprec(cfg.precision_bits):
        return normalized_delta_integral(bits, Delta, cfg) * mpf(2) ** (2 * bits)


def alpha_r_integral(pub: PublicInstance, lo, hi, cfg: QuadratureConfig) -> mpf:
    """
    int_lo^hi (1 - cos(2 pi alpha_r / r)) / (2 pi^2 alpha_r^2) d alpha_r.

    The integrand tends to 1 / r^2 at alpha_r = 0 and the integral over the
    whole line is 1 / r.
    """
    lo, hi = Fraction(lo), Fraction(hi)
    limit = pub.modulus >> (pub.kappa + 1)
    if not -limit <= lo < hi <= limit:
        raise InvalidInstanceError(f"[{lo}, {hi}] is not inside [-{limit}, {limit}]")
    with mp.workprec(cfg.precision_bits):
        return outer_integral(lo / pub.r, hi / pub.r, cfg) / pub.r


def outer_mass(pub: PublicInstance, cfg: QuadratureConfig) -> mpf:
    """2^kappa_r times the outer integral over the whole admissible u range."""
    with mp.workprec(cfg.precision_bits):
        # even integrand
        return 2 * (1 << pub.kappa) * outer_integral(0, half_range(pub), cfg)


def delta_order(B: int):
    """0, 1, -1, 2, -2, ..., B, -B: terms decay in |Delta|."""
    yield 0
    for step in range(1, B + 1):
        yield step
        yield -step


def capture_probability(pub: PublicInstance, B: int, cfg: QuadratureConfig) -> mpf:
    if B < 0:
        raise ValueError(f"B must be non-negative, got {B}")
    bits = pub.m + pub.ell
    with mp.workprec(cfg.precision_bits):
        inner = mpf(0)
        for Delta in delta_order(B):
            inner += normalized_delta_integral(bits, Delta, cfg)
        return outer_mass(pub, cfg) * inner


# --- TABLE ---


def _capture_row(m: int, r: int, ell: int, B_list: tuple[int, ...], cfg) -> list[float]:
    """One row of the table; the Delta sum is shared by every B of the row."""
    pub = PublicInstance(m=m, ell=ell, r=r)
    bits = m + ell
    targets = sorted(set(B_list))
    logger.info(f"🔄 Row ell={ell}: {len(targets)} values of B up to {targets[-1]}")

    with mp.workprec(cfg.precision_bits):
        outer = outer_mass(pub, cfg)
        inner = normalized_delta_integral(bits, 0, cfg)
        sums = {}
        step = 0
        for B in targets:
            while step < B:
                step += 1
                inner += normalized_delta_integral(bits, step, cfg)
                inner += normalized_delta_integral(bits, -step, cfg)
            sums[B] = float(outer * inner)
    return [sums[B] for B in B_list]


@dataclass(frozen=True, eq=False)
class CaptureTable:
    """Capture probability indexed by ell (rows) and B (columns)."""

    m: int
    r: int
    precision_bits: int
    frame: pd.DataFrame

    def to_long(self) -> pd.DataFrame:
        long = self.frame.stack().rename("capture").reset_index()
        long.columns = ["ell", "B", "capture"]
        return long

    def validate(self) -> "CaptureTable":
        validate_capture_table(self.to_long())
        return self

    def is_monotone(self) -> bool:
        values = self.frame.to_numpy()
        along_ell = np.all(np.diff(values, axis=0) >= 0)
        along_b = np.all(np.diff(values, axis=1) >= 0)
        return bool(along_ell and along_b)

    def value(self, ell: int, B: int) -> float:
        return float(self.frame.loc[ell, B])

    def to_text(self, extra_header: list[str] | None = None) -> str:
        lines = [f"# m={self.m} r={hex(self.r)} precision={self.precision_bits}"]
        lines += extra_header or []
        lines.append("\t".join(["ell", *map(str, self.frame.columns)]))
        for ell, row in self.frame.iterrows():
            lines.append("\t".join([str(ell), *(f"{v:.4f}" for v in row)]))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "CaptureTable":
        lines = text.splitlines()
        match = HEADER_PATTERN.match(lines[0]) if lines else None
        if match is None:
            raise ReportFormatError("missing '# m=<m> r=<hex> precision=<bits>' header")
        body = "\n".join(line for line in lines if not line.startswith("#"))
        try:
            frame = pd.read_csv(io.StringIO(body), sep="\t", index_col="ell")
            frame.columns = [int(c) for c in frame.columns]
            frame.index = frame.index.astype(int)
            frame = frame.astype(float)
        except (ValueError, KeyError, pd.errors.ParserError) as e:
            raise ReportFormatError(f"malformed capture table: {e}") from e
        return cls(
            m=int(match.group(1)),
            r=int(match.group(2), 16),
            precision_bits=int(match.group(3)),
            frame=frame,
        )


def capture_table(
    m: int,
    r: int,
    ell_range,
    B_list,
    cfg: QuadratureConfig,
    workers: int | None = None,
) -> CaptureTable:
    """
    Capture probability over the (ell, B) grid.

    Rows are independent; with `workers` > 1 they are computed in separate
    processes and collected in ell order.
    """
    ells = sorted(set(ell_range))
    B_list = tuple(sorted(set(B_list)))
    if not ells or not B_list:
        raise ValueError("ell_range and B_list must be non-empty")
    if any(B < 0 for B in B_list):
        raise ValueError(f"B values must be non-negative, got {B_list}")

    args = [(m, r, ell, B_list, cfg) for ell in ells]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_capture_row, *zip(*args)))
    else:
        rows = [_capture_row(*a) for a in args]

    frame = pd.DataFrame(rows, index=pd.Index(ells, name="ell"), columns=list(B_list))
    table = CaptureTable(m=m, r=r, precision_bits=cfg.precision_bits, frame=frame)
    logger.info(f"✅ Capture table {len(ells)}x{len(B_list)} computed")
    return table.validate()


__all__ = [
    "CaptureTable",
    "alpha_r_integral",
    "capture_probability",
    "capture_table",
    "delta_integral",
    "delta_order",
    "half_range",
    "normalized_delta_integral",
    "outer_integral",
    "outer_mass",
    "sinc2",
]
