"""
Capture Table Reproduction
==========================
Reference grid of the capture probability for m = 128, r = 2^128 - 1,
and its behaviour for larger m and smaller r. Minutes at 192 bits.
"""

import io

import pandas as pd
import pytest

from dlog_simulator.kernel.schemas import PublicInstance
from dlog_simulator.quadrature import (
    CaptureTable,
    QuadratureConfig,
    capture_probability,
    capture_table,
)

pytestmark = pytest.mark.slow

REFERENCE = """\
ell\t0\t1\t2\t10\t20\t50\t100\t200\t500
0\t0.5986\t0.7204\t0.7421\t0.7662\t0.7699\t0.7721\t0.7729\t0.7733\t0.7735
1\t0.6985\t0.8406\t0.8659\t0.8941\t0.8984\t0.9010\t0.9019\t0.9024\t0.9026
2\t0.7350\t0.8845\t0.9111\t0.9408\t0.9452\t0.9480\t0.9490\t0.9495\t0.9497
3\t0.7542\t0.9076\t0.9349\t0.9653\t0.9699\t0.9728\t0.9738\t0.9743\t0.9746
4\t0.7639\t0.9193\t0.9470\t0.9778\t0.9825\t0.9854\t0.9863\t0.9868\t0.9871
5\t0.7688\t0.9252\t0.9531\t0.9841\t0.9888\t0.9917\t0.9927\t0.9932\t0.9935
6\t0.7712\t0.9281\t0.9561\t0.9872\t0.9919\t0.9948\t0.9958\t0.9963\t0.9966
7\t0.7725\t0.9296\t0.9576\t0.9888\t0.9935\t0.9964\t0.9974\t0.9979\t0.9982
8\t0.7731\t0.9304\t0.9584\t0.9896\t0.9943\t0.9972\t0.9982\t0.9987\t0.9990
"""

B_GRID = [0, 1, 2, 10, 20, 50, 100, 200, 500]

# =============================================================================
# FIXTURES
# =============================================================================


@pytest.fixture(scope="module")
def reference() -> pd.DataFrame:
    frame = pd.read_csv(io.StringIO(REFERENCE), sep="\t", index_col="ell")
    frame.columns = [int(c) for c in frame.columns]
    return frame


@pytest.fixture(scope="module")
def table_128() -> CaptureTable:
    return capture_table(128, 2**128 - 1, range(9), B_GRID, QuadratureConfig())


# =============================================================================
# TESTS
# =============================================================================


class TestReferenceTable:
    """Every cell of the m = 128 grid to 2e-4."""

    def test_every_cell(self, table_128, reference):
        difference = (table_128.frame - reference).abs()
        worst = difference.stack().idxmax()
        assert difference.to_numpy().max() <= 2e-4, worst

    def test_monotone_in_both_directions(self, table_128):
        assert table_128.is_monotone()

    def test_passes_schema(self, table_128):
        table_128.validate()

    def test_text_output_rounds_to_reference_digits(self, table_128, reference):
        parsed = CaptureTable.from_text(table_128.to_text())
        assert ((parsed.frame - reference).abs() <= 2e-4).all().all()


class TestLargerRegisters:
    def test_m256_matches_m128(self, table_128):
        table_256 = capture_table(256, 2**256 - 1, range(9), B_GRID, QuadratureConfig())
        difference = (table_256.frame - table_128.frame).abs()
        assert difference.to_numpy().max() <= 1e-4


class TestSmallerOrder:
    def test_r_at_lower_end_shifts_one_row(self):
        """Halving r is worth one padding bit."""
        pub = PublicInstance(m=128, ell=0, r=2**127 + 1)
        value = float(capture_probability(pub, 0, QuadratureConfig()))
        assert value == pytest.approx(0.6985, abs=1e-2)

    def test_precision_invariance_on_a_row(self):
        low = capture_table(
            128, 2**128 - 1, [5], [0, 20], QuadratureConfig(precision_bits=192)
        )
        high = capture_table(
            128, 2**128 - 1, [5], [0, 20], QuadratureConfig(precision_bits=256)
        )
        difference = (low.frame - high.frame).abs()
        assert difference.to_numpy().max() < 1e-9
