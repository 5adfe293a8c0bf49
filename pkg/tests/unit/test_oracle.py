"""
Unit tests for the exact oracle and the exact-versus-heuristic report.
"""

import logging

import numpy as np
import pandas as pd
import pytest

from dlog_simulator.exceptions import ReportFormatError, ResourceGuardError
from dlog_simulator.kernel import (
    ArgumentPair,
    FrequencyPair,
    ProblemInstance,
    arguments_of,
    decompose,
    density_of_arguments,
)
from dlog_simulator.oracle import (
    CompareReport,
    compare_report,
    exact_capture,
    exact_delta_masses,
    exact_distribution,
    pair_probability,
    write_distribution,
)
from dlog_simulator.oracle.exact import argument_grid
from dlog_simulator.quadrature import QuadratureConfig, capture_probability
from dlog_simulator.rng import make_rng

logger = logging.getLogger(__name__)

# =============================================================================
# FIXTURES
# =============================================================================


@pytest.fixture(scope="module")
def distribution():
    return exact_distribution(ProblemInstance(m=6, ell=0, r=61, d=17))


# =============================================================================
# EXACT DISTRIBUTION
# =============================================================================


class TestExactDistribution:
    @pytest.mark.parametrize("method", ["closed_form", "fft", "direct"])
    def test_normalized(self, small_instance, method):
        dist = exact_distribution(small_instance, method=method)
        assert dist.total == pytest.approx(1.0, abs=1e-12)
        assert np.all(dist.probabilities >= -1e-15)

    @pytest.mark.parametrize(
        "m, ell, r, d",
        [(2, 0, 3, 1), (4, 2, 13, 5), (5, 1, 24, 7), (4, 4, 15, 11)],
    )
    def test_paths_agree(self, m, ell, r, d):
        inst = ProblemInstance(m=m, ell=ell, r=r, d=d)
        reference = exact_distribution(inst, method="direct").probabilities
        for method in ("closed_form", "fft"):
            other = exact_distribution(inst, method=method).probabilities
            assert np.max(np.abs(other - reference)) < 1e-12, method

    def test_float64_grid_matches_extended_precision(self, small_instance):
        dist = exact_distribution(small_instance)
        rng = make_rng(7)
        pairs = [(5, 39), (0, 0)]
        pairs += [tuple(int(v) for v in rng.integers(0, 64, size=2)) for _ in range(6)]
        for j, k in pairs:
            exact = pair_probability(small_instance, FrequencyPair(j=j, k=k), 160)
            assert float(exact) == pytest.approx(dist.probabilities[j, k], abs=1e-14)

    def test_single_pair_guard(self):
        inst = ProblemInstance(m=8, ell=1, r=251, d=1)
        with pytest.raises(ResourceGuardError):
            pair_probability(inst, FrequencyPair(j=0, k=0))

    def test_odd_r_alpha_r_is_a_bijection(self, small_instance):
        _, alpha_r = argument_grid(small_instance)
        assert sorted(alpha_r.tolist()) == list(range(-32, 32))

    def test_delta_grid_matches_kernel(self, small_instance):
        dist = exact_distribution(small_instance)
        rng = make_rng(0)
        for _ in range(200):
            j, k = (int(v) for v in rng.integers(0, 64, size=2))
            args = arguments_of(small_instance, FrequencyPair(j=j, k=k))
            assert dist.delta_grid[j, k] == decompose(small_instance, args).Delta

    def test_resource_guard(self):
        with pytest.raises(ResourceGuardError):
            exact_distribution(ProblemInstance(m=13, ell=0, r=8191, d=1))
        with pytest.raises(ResourceGuardError):
            exact_distribution(ProblemInstance(m=8, ell=1, r=251, d=1), method="direct")
        with pytest.raises(ResourceGuardError):
            exact_distribution(ProblemInstance(m=6, ell=0, r=61, d=1), max_bits=5)

    def test_unknown_method(self, small_instance):
        with pytest.raises(ValueError):
            exact_distribution(small_instance, method="montecarlo")

    def test_write_distribution(self, small_instance, tmp_path):
        dist = exact_distribution(small_instance)
        path = write_distribution(dist, tmp_path / "exact.tsv", ["# flags test"])
        lines = path.read_text().splitlines()
        assert lines[0] == "# m=4 ell=2 r=0xd d=0x5 method=closed_form"
        frame = pd.read_csv(path, sep="\t", comment="#")
        assert len(frame) == 64 * 64
        assert frame["probability"].sum() == pytest.approx(1.0, abs=1e-12)


class TestExactCapture:
    def test_full_range_is_everything(self, distribution):
        assert exact_capture(distribution, 2 * 64) == pytest.approx(1.0, abs=1e-12)

    def test_monotone_in_b(self, distribution):
        values = [exact_capture(distribution, B) for B in range(12)]
        assert values == sorted(values)

    def test_delta_masses_sum_to_capture(self, distribution):
        masses = exact_delta_masses(distribution, 2)
        assert sum(masses.values()) == pytest.approx(exact_capture(distribution, 2))

    def test_rejects_negative_bound(self, distribution):
        with pytest.raises(ValueError):
            exact_capture(distribution, -1)

    def test_density_close_to_exact_near_the_peak(self, distribution):
        """Pair (j=1, k=15) sits at Delta=-31, far from the peak: reported only."""
        inst = distribution.inst
        alpha_d, alpha_r = argument_grid(inst)
        args = ArgumentPair(alpha_d=int(alpha_d[1, 15]), alpha_r=int(alpha_r[1]))
        heuristic = float(density_of_arguments(inst, args))
        exact = distribution.probabilities[1, 15]
        logger.info(f"(1, 15): heuristic={heuristic:.6g} exact={exact:.6g}")
        assert heuristic > 0 and np.isfinite(exact)

        peak = np.unravel_index(np.argmax(distribution.probabilities), (64, 64))
        args = ArgumentPair(alpha_d=int(alpha_d[peak]), alpha_r=int(alpha_r[peak[0]]))
        heuristic = float(density_of_arguments(inst, args))
        assert heuristic == pytest.approx(distribution.probabilities[peak], rel=0.15)


# =============================================================================
# COMPARISON REPORT
# =============================================================================


class TestCompareReport:
    @pytest.fixture(scope="class")
    def report(self, distribution) -> CompareReport:
        cfg = QuadratureConfig(precision_bits=128)
        return compare_report(distribution, [0, 1, 2, 10], cfg)

    def test_columns_are_consistent(self, report, distribution, cfg):
        row = report.capture.set_index("B").loc[2]
        assert row["exact"] == pytest.approx(exact_capture(distribution, 2))
        heuristic = float(capture_probability(distribution.inst.public, 2, cfg))
        assert row["heuristic"] == pytest.approx(heuristic, abs=1e-12)
        assert row["difference"] == pytest.approx(row["exact"] - row["heuristic"])

    def test_statistics(self, report):
        assert float(report.stats["total"]) == pytest.approx(1.0, abs=1e-12)
        assert int(report.stats["density_pairs"]) > 0
        assert float(report.stats["max_relative_error"]) >= 0

    def test_text_round_trip(self, report):
        text = report.to_text(["# flags m=6"])
        parsed = CompareReport.from_text(text)
        assert parsed.inst == report.inst
        assert parsed.stats == report.stats
        assert parsed.asymmetric_deltas == report.asymmetric_deltas
        pd.testing.assert_frame_equal(parsed.capture, report.capture, check_dtype=False)
        pd.testing.assert_frame_equal(parsed.deltas, report.deltas, check_dtype=False)

    def test_rejects_malformed_text(self):
        with pytest.raises(ReportFormatError):
            CompareReport.from_text("# not a report\n")
        with pytest.raises(ReportFormatError):
            CompareReport.from_text(
                "# oracle-report m=6 ell=0 r=0x3d d=0x11\n[capture]\n"
            )

    @pytest.mark.parametrize("ell", [0, 1, 2])
    def test_heuristic_agreement_small_registers(self, ell, cfg):
        inst = ProblemInstance(m=6, ell=ell, r=61, d=17)
        report = compare_report(exact_distribution(inst), [0, 1, 2, 10], cfg)
        assert report.max_difference <= 0.03, report.capture
