from dlog_simulator.oracle.exact import (
    ExactDistribution,
    exact_capture,
    exact_delta_masses,
    exact_distribution,
    pair_probability,
    write_distribution,
)
from dlog_simulator.oracle.report import CompareReport, compare_report

__all__ = [
    "CompareReport",
    "ExactDistribution",
    "compare_report",
    "exact_capture",
    "exact_delta_masses",
    "exact_distribution",
    "pair_probability",
    "write_distribution",
]
