"""
Oracle comparison report
========================
Exact versus heuristic capture per B, exact versus heuristic mass per Delta,
and relative errors of the heuristic density on pairs with small |Delta|.

Text format:

    # oracle-report m=<m> ell=<ell> r=<hex> d=<hex>
    # <key>=<value>             (one summary statistic per line)
    [capture]
    B  exact  heuristic  difference       (tab-separated)
    [delta]
    Delta  exact  heuristic
"""

import io
import logging
import re
from dataclasses import dataclass, field

import numpy as np
import pandas as pd
from mpmath import mp

from dlog_simulator.exceptions import ReportFormatError
from dlog_simulator.kernel.density import density_of_arguments
from dlog_simulator.kernel.schemas import ArgumentPair, ProblemInstance
from dlog_simulator.oracle.exact import (
    ExactDistribution,
    argument_grid,
    exact_capture,
    exact_delta_masses,
)
from dlog_simulator.quadrature.capture import normalized_delta_integral, outer_mass
from dlog_simulator.quadrature.contracts import (
    validate_capture_report,
    validate_delta_masses,
)
from dlog_simulator.quadrature.integrate import QuadratureConfig

logger = logging.getLogger(__name__)

AGREEMENT_BOUND = 0.03
ASYMMETRY_THRESHOLD = 0.10
DENSITY_DELTA = 2

TITLE_PATTERN = re.compile(
    r"^# oracle-report m=(\d+) ell=(\d+) r=(0x[0-9a-f]+) d=(0x[0-9a-f]+)$"
)


@dataclass(eq=False)
class CompareReport:
    inst: ProblemInstance
    capture: pd.DataFrame
    deltas: pd.DataFrame
    stats: dict = field(default_factory=dict)

    @property
    def max_difference(self) -> float:
        return float(self.capture["difference"].abs().max())

    def passes(self, bound: float = AGREEMENT_BOUND) -> bool:
        return self.max_difference <= bound

    @property
    def asymmetric_deltas(self) -> list[int]:
        value = self.stats.get("asymmetric_deltas", "none")
        return [] if value == "none" else [int(v) for v in value.split(",")]

    def to_text(self, extra_header: list[str] | None = None) -> str:
        inst = self.inst
        lines = [
            f"# oracle-report m={inst.m} ell={inst.ell} r={hex(inst.r)} d={hex(inst.d)}"
        ]
        lines += [f"# {key}={value}" for key, value in self.stats.items()]
        lines += extra_header or []
        lines.append("[capture]")
        lines.append(self.capture.to_csv(sep="\t", index=False, float_format="%.17g"))
        lines.append("[delta]")
        lines.append(self.deltas.to_csv(sep="\t", index=False, float_format="%.17g"))
        return "\n".join(line.rstrip("\n") for line in lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "CompareReport":
        lines = text.splitlines()
        match = TITLE_PATTERN.match(lines[0]) if lines else None
        if match is None:
            raise ReportFormatError("missing '# oracle-report ...' title line")
        m, ell, r, d = match.groups()
        inst = ProblemInstance(m=int(m), ell=int(ell), r=int(r, 16), d=int(d, 16))

        stats = {}
        sections: dict[str, list[str]] = {}
        current = None
        for line in lines[1:]:
            if line.startswith("#"):
                key, sep, value = line[1:].strip().partition("=")
                if sep and current is None and " " not in key:
                    stats[key] = value
            elif line.startswith("[") and line.endswith("]"):
                current = line[1:-1]
                sections[current] = []
            elif current is not None and line:
                sections[current].append(line)

        try:
            capture = pd.read_csv(io.StringIO("\n".join(sections["capture"])), sep="\t")
            deltas = pd.read_csv(io.StringIO("\n".join(sections["delta"])), sep="\t")
            validate_capture_report(capture)
            validate_delta_masses(deltas)
        except KeyError as e:
            raise ReportFormatError(f"missing section {e}") from e
        except Exception as e:
            raise ReportFormatError(f"malformed report: {e}") from e
        return cls(inst=inst, capture=capture, deltas=deltas, stats=stats)


def _density_errors(
    inst: ProblemInstance, dist: ExactDistribution, precision_bits: int
) -> np.ndarray:
    alpha_d, alpha_r = argument_grid(inst)
    js, ks = np.nonzero(np.abs(dist.delta_grid) <= DENSITY_DELTA)
    errors = []
    for j, k in zip(js, ks):
        exact = dist.probabilities[j, k]
        if exact <= 0:
            continue
        args = ArgumentPair(alpha_d=int(alpha_d[j, k]), alpha_r=int(alpha_r[j]))
        heuristic = float(density_of_arguments(inst, args, precision_bits))
        errors.append(abs(heuristic - exact) / exact)
    return np.array(errors)


def _asymmetric(masses: dict[int, float], B_max: int) -> list[int]:
    flagged = []
    for Delta in range(1, B_max + 1):
        hi, lo = masses[Delta], masses[-Delta]
        scale = max(hi, lo)
        if scale > 0 and abs(hi - lo) / scale > ASYMMETRY_THRESHOLD:
            flagged.append(Delta)
    return flagged


def compare_report(
    dist: ExactDistribution, B_list, cfg: QuadratureConfig
) -> CompareReport:
    """Exact versus heuristic capture for every B in `B_list`."""
    inst = dist.inst
    B_list = sorted(set(B_list))
    B_max = B_list[-1]
    bits = inst.m + inst.ell

    with mp.workprec(cfg.precision_bits):
        outer = outer_mass(inst.public, cfg)
        heuristic_delta = {
            Delta: float(outer * normalized_delta_integral(bits, Delta, cfg))
            for Delta in range(-B_max, B_max + 1)
        }
    exact_delta = exact_delta_masses(dist, B_max)

    rows = []
    for B in B_list:
        exact = exact_capture(dist, B)
        heuristic = sum(v for Delta, v in heuristic_delta.items() if abs(Delta) <= B)
        rows.append({"B": B, "exact": exact, "heuristic": heuristic})
    capture = pd.DataFrame(rows)
    capture["difference"] = capture["exact"] - capture["heuristic"]

    deltas = pd.DataFrame(
        {
            "Delta": list(exact_delta),
            "exact": list(exact_delta.values()),
            "heuristic": [heuristic_delta[Delta] for Delta in exact_delta],
        }
    )

    errors = _density_errors(inst, dist, cfg.precision_bits)
    flagged = _asymmetric(exact_delta, B_max)
    stats = {
        "total": f"{dist.total:.17g}",
        "density_pairs": str(len(errors)),
        "max_relative_error": f"{errors.max():.6g}" if len(errors) else "nan",
        "mean_relative_error": f"{errors.mean():.6g}" if len(errors) else "nan",
        "asymmetric_deltas": ",".join(map(str, flagged)) or "none",
    }
    if flagged:
        logger.warning(f"⚠️ Delta masses asymmetric (>10%) at |Delta| = {flagged}")

    report = CompareReport(
        inst=inst,
        capture=validate_capture_report(capture),
        deltas=validate_delta_masses(deltas),
        stats=stats,
    )
    logger.info(f"📊 Oracle comparison: max difference {report.max_difference:.4f}")
    return report
