"""
Unit tests for histogram construction, sampling and the binary file format.
"""

import struct
import zlib
from collections import Counter
from dataclasses import replace
from decimal import Decimal
from fractions import Fraction

import numpy as np
import pytest
from scipy.stats import chisquare

from dlog_simulator.exceptions import (
    EmptyCellError,
    HistogramChecksumError,
    HistogramVersionError,
    MalformedHistogramError,
)
from dlog_simulator.histogram import (
    OUTSIDE,
    Histogram,
    HistogramCell,
    OutsideCapture,
    build,
    cell_edges,
    cell_to_pair,
    deserialize,
    realizable_alpha_r,
    sample,
    sample_cell,
    sample_cells,
    serialize,
)
from dlog_simulator.kernel import (
    FrequencyPair,
    ProblemInstance,
    arguments_of,
    decompose,
)
from dlog_simulator.quadrature import QuadratureConfig, capture_probability, half_range
from dlog_simulator.rng import make_rng

# =============================================================================
# FIXTURES
# =============================================================================


@pytest.fixture(scope="module")
def histogram() -> Histogram:
    inst = ProblemInstance(m=8, ell=2, r=251, d=101)
    cfg = QuadratureConfig(precision_bits=128)
    return build(inst, B_max=2, cells_per_unit=2, cfg=cfg)


def reseal(body: bytes) -> bytes:
    return body + struct.pack(">I", zlib.crc32(body))


class FixedDraw:
    """Stands in for a Generator whose uniform draws are all `value`."""

    def __init__(self, value: float):
        self.value = value

    def random(self, size=None):
        if size is None:
            return self.value
        return np.full(size, self.value)


# =============================================================================
# GEOMETRY
# =============================================================================


class TestCellEdges:
    def test_cover_the_admissible_range(self, oracle_instance):
        edges = cell_edges(oracle_instance, 2)
        upper = half_range(oracle_instance)
        assert edges[0] == -upper
        assert edges[-1] == upper
        assert all(a < b for a, b in zip(edges, edges[1:]))

    def test_every_cell_holds_an_alpha_r(self, oracle_instance):
        edges = cell_edges(oracle_instance, 4)
        r = oracle_instance.r
        for lo, hi in zip(edges, edges[1:]):
            cell = HistogramCell(Delta=0, u_lo=lo, u_hi=hi, mass=Decimal(0))
            first, last = cell.alpha_r_bounds(r)
            assert first <= last

    def test_even_r_cells_hold_admissible_alpha_r(self):
        inst = ProblemInstance(m=6, ell=2, r=60, d=7)
        edges = cell_edges(inst, 2)
        for lo, hi in zip(edges, edges[1:]):
            cell = HistogramCell(Delta=0, u_lo=lo, u_hi=hi, mass=Decimal(0))
            first, last = cell.alpha_r_bounds(inst.r)
            assert any(a % 4 == 0 for a in range(first, last + 1))


# =============================================================================
# BUILD
# =============================================================================


class TestBuild:
    def test_total_mass_matches_capture_probability(self, histogram):
        expected = capture_probability(
            histogram.instance.public, 2, QuadratureConfig(precision_bits=128)
        )
        assert abs(float(histogram.total_mass) - float(expected)) < 1e-9

    def test_masses_non_negative_with_forty_digits(self, histogram):
        for cell in histogram.cells:
            assert cell.mass >= 0
            assert len(cell.mass.as_tuple().digits) <= 40

    def test_cells_ordered_by_delta_then_u(self, histogram):
        keys = [(cell.Delta, cell.u_lo) for cell in histogram.cells]
        assert keys == sorted(keys)

    def test_each_delta_tiles_the_range(self, histogram):
        upper = half_range(histogram.instance)
        for Delta in range(-2, 3):
            cells = [c for c in histogram.cells if c.Delta == Delta]
            assert cells[0].u_lo == -upper
            assert cells[-1].u_hi == upper
            assert all(a.u_hi == b.u_lo for a, b in zip(cells, cells[1:]))

    def test_delta_masses_peak_at_zero(self, histogram):
        masses = histogram.delta_masses()
        assert set(masses) == {-2, -1, 0, 1, 2}
        assert masses[0] > masses[1] > masses[2]

    def test_cumulative_index_increasing(self, histogram):
        assert np.all(np.diff(histogram.cumulative) >= 0)
        assert histogram.cumulative[-1] == pytest.approx(float(histogram.total_mass))

    def test_rejects_bad_arguments(self, small_instance, cfg):
        with pytest.raises(ValueError):
            build(small_instance, -1, 4, cfg)
        with pytest.raises(ValueError):
            build(small_instance, 0, 1, cfg)


# =============================================================================
# SAMPLING
# =============================================================================


class TestCellToPair:
    """Converting a sampled cell into a pair (j, k)."""

    def test_single_alpha_r_cell(self, small_instance, rng):
        cell = HistogramCell(
            Delta=0, u_lo=Fraction(1, 13), u_hi=Fraction(2, 13), mass=Decimal("0.1")
        )
        drawn = cell_to_pair(small_instance, cell, rng)
        assert (drawn.j, drawn.k, drawn.alpha_r, drawn.alpha_d) == (5, 39, 1, 0)

    def test_origin_cell(self, small_instance, rng):
        cell = HistogramCell(
            Delta=0, u_lo=Fraction(0), u_hi=Fraction(1, 13), mass=Decimal(0)
        )
        drawn = cell_to_pair(small_instance, cell, rng)
        assert (drawn.j, drawn.k) == (0, 0)

    def test_pairs_land_in_the_cell_with_the_right_delta(self, small_instance, rng):
        cell = HistogramCell(
            Delta=-2, u_lo=Fraction(-1), u_hi=Fraction(1, 2), mass=Decimal("0.1")
        )
        for _ in range(200):
            drawn = cell_to_pair(small_instance, cell, rng)
            args = arguments_of(small_instance, FrequencyPair(j=drawn.j, k=drawn.k))
            assert args.alpha_r == drawn.alpha_r
            assert -13 <= args.alpha_r < 13 / 2
            assert decompose(small_instance, args).Delta == -2

    def test_even_r_spreads_over_every_branch(self, rng):
        inst = ProblemInstance(m=4, ell=2, r=12, d=7)
        cell = HistogramCell(
            Delta=1, u_lo=Fraction(4, 12), u_hi=Fraction(5, 12), mass=Decimal("0.1")
        )
        js = set()
        for _ in range(200):
            drawn = cell_to_pair(inst, cell, rng)
            args = arguments_of(inst, FrequencyPair(j=drawn.j, k=drawn.k))
            assert args.alpha_r == 4
            assert decompose(inst, args).Delta == 1
            js.add(drawn.j)
        assert js == {11, 27, 43, 59}


class TestRegisterEdge:
    """Delta pushing alpha_d past +-N/2 at m=4, ell=0, r=13, d=12 (N=16)."""

    @pytest.fixture
    def edge_instance(self) -> ProblemInstance:
        return ProblemInstance(m=4, ell=0, r=13, d=12)

    def test_cell_without_realizable_alpha_r(self, edge_instance, rng):
        # alpha_r = 7: round(84/13) + 2 = 8
        cell = HistogramCell(
            Delta=2, u_lo=Fraction(1, 2), u_hi=Fraction(8, 13), mass=Decimal("0.01")
        )
        with pytest.raises(EmptyCellError):
            cell_to_pair(edge_instance, cell, rng)

    @pytest.mark.parametrize(
        "Delta, u_lo, u_hi, expected",
        [
            (2, Fraction(5, 13), Fraction(8, 13), (5, 5)),
            (-2, Fraction(-8, 13), Fraction(-5, 13), (-7, -6)),
            (0, Fraction(-8, 13), Fraction(8, 13), (-8, 7)),
        ],
    )
    def test_realizable_range(self, edge_instance, Delta, u_lo, u_hi, expected):
        cell = HistogramCell(Delta=Delta, u_lo=u_lo, u_hi=u_hi, mass=Decimal(0))
        assert realizable_alpha_r(edge_instance, cell) == expected

    def test_sampled_pairs_keep_their_delta(self, edge_instance, cfg):
        hist = build(edge_instance, B_max=2, cells_per_unit=2, cfg=cfg)
        outcomes = sample(edge_instance, hist, make_rng(5), 5000)
        drawn = [o for o in outcomes if o is not OutsideCapture]
        assert drawn
        for outcome in drawn:
            assert -8 <= outcome.alpha_d < 8
            pair = FrequencyPair(j=outcome.j, k=outcome.k)
            args = arguments_of(edge_instance, pair)
            assert (args.alpha_r, args.alpha_d) == (outcome.alpha_r, outcome.alpha_d)
            assert decompose(edge_instance, args).Delta == outcome.Delta


class TestSampling:
    def test_zero_draw_selects_the_first_cell(self, histogram):
        assert sample_cell(histogram, FixedDraw(0.0)) == histogram.cells[0]

    def test_draw_beyond_total_mass_is_outside(self, histogram):
        assert sample_cell(histogram, FixedDraw(0.999999)) is OutsideCapture
        assert sample_cells(histogram, FixedDraw(0.999999), 3).tolist() == [OUTSIDE] * 3

    def test_fixed_seed_is_reproducible(self, histogram):
        inst = histogram.instance
        first = sample(inst, histogram, make_rng(11), 500)
        second = sample(inst, histogram, make_rng(11), 500)
        assert first == second

    def test_sampled_pairs_are_b_good(self, histogram):
        inst = histogram.instance
        for outcome in sample(inst, histogram, make_rng(2), 2000):
            if outcome is OutsideCapture:
                continue
            args = arguments_of(inst, FrequencyPair(j=outcome.j, k=outcome.k))
            assert decompose(inst, args).Delta == outcome.Delta
            assert abs(outcome.Delta) <= 2

    def test_outside_rate_matches_residual_mass(self, histogram):
        count = 100_000
        indices = sample_cells(histogram, make_rng(3), count)
        p = 1 - float(histogram.total_mass)
        sigma = (count * p * (1 - p)) ** 0.5
        assert abs(int(np.sum(indices == OUTSIDE)) - count * p) < 4 * sigma

    def test_cell_frequencies_match_masses(self, histogram):
        """Chi-square over (Delta, sign of u) groups plus the residual bucket."""
        count = 200_000
        indices = sample_cells(histogram, make_rng(4), count)

        def group(idx: int):
            if idx == OUTSIDE:
                return "outside"
            cell = histogram.cells[idx]
            return (cell.Delta, cell.u_lo >= 0)

        expected = Counter()
        for i, cell in enumerate(histogram.cells):
            expected[group(i)] += float(cell.mass)
        expected["outside"] = 1 - float(histogram.total_mass)
        observed = Counter(group(int(i)) for i in indices)

        keys = sorted(expected, key=str)
        _, p_value = chisquare(
            [observed[k] for k in keys], [expected[k] * count for k in keys]
        )
        assert p_value > 1e-3

    def test_rejects_empty_request(self, histogram):
        with pytest.raises(ValueError):
            sample(histogram.instance, histogram, make_rng(0), 0)


# =============================================================================
# FILE FORMAT
# =============================================================================


class TestCodec:
    def test_round_trip_is_field_exact(self, histogram):
        restored = deserialize(serialize(histogram))
        assert restored == histogram
        assert restored.total_mass == histogram.total_mass

    def test_big_instance_fields(self):
        cell = HistogramCell(
            Delta=-3,
            u_lo=Fraction(-(2**70) - 1, 2**65 + 3),
            u_hi=Fraction(5, 7),
            mass=Decimal("1.234567890123456789012345678901234567890E-25"),
        )
        hist = Histogram(
            m=200,
            ell=9,
            r=2**199 + 7,
            d=2**150,
            B_max=3,
            precision_bits=256,
            cells=(cell,),
        )
        assert deserialize(serialize(hist)) == hist

    def test_truncated_frame(self, histogram):
        with pytest.raises(MalformedHistogramError, match="truncated"):
            deserialize(serialize(histogram)[:30])

    def test_truncated_cells_fail_the_checksum(self, histogram):
        with pytest.raises(HistogramChecksumError):
            deserialize(serialize(histogram)[:-10])

    def test_bad_magic(self, histogram):
        with pytest.raises(MalformedHistogramError):
            deserialize(b"XXXX" + serialize(histogram)[4:])

    def test_unknown_version(self, histogram):
        data = bytearray(serialize(histogram))
        data[4] = 2
        with pytest.raises(HistogramVersionError):
            deserialize(bytes(data))

    def test_checksum_mismatch(self, histogram):
        data = bytearray(serialize(histogram))
        data[-1] ^= 0xFF
        with pytest.raises(HistogramChecksumError):
            deserialize(bytes(data))

    def test_corrupted_length_prefix_is_a_checksum_error(self, histogram):
        """Byte 13 is the high byte of the length of r."""
        data = bytearray(serialize(histogram))
        data[13] ^= 0x40
        with pytest.raises(HistogramChecksumError):
            deserialize(bytes(data))

    def test_appended_bytes_fail_the_checksum(self, histogram):
        with pytest.raises(HistogramChecksumError):
            deserialize(serialize(histogram) + b"\x00")

    def test_trailing_bytes_under_a_valid_checksum(self, histogram):
        body = serialize(histogram)[:-4] + b"\x00"
        with pytest.raises(MalformedHistogramError, match="trailing"):
            deserialize(reseal(body))

    def test_invalid_field_under_a_valid_checksum(self, histogram):
        cell = replace(histogram.cells[0], mass=Decimal("-1"))
        corrupt = replace(histogram, cells=(cell, *histogram.cells[1:]))
        with pytest.raises(MalformedHistogramError, match="invalid cell"):
            deserialize(serialize(corrupt))
