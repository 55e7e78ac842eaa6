"""Tests for space-time beam patterns, coverage sets, and adaptive coverage."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from codedbeam.codes import conv_encode, hamming_encode
from codedbeam.patterns import (
    CoverageSet,
    adaptive_coverage,
    bintodec,
    conv_pattern,
    coverage_set,
    hamming_pattern,
    index_bits,
    survivor_directions,
)


class TestBintodec:
    def test_examples(self):
        assert bintodec([0, 0, 1, 0]) == 2
        assert bintodec([1, 0, 1, 0]) == 10
        assert bintodec([0]) == 0

    @given(st.integers(0, 1023))
    def test_roundtrip(self, value):
        assert bintodec(index_bits(value, 10)) == value


class TestHammingPattern:
    def test_worked_entry(self):
        """Segment 2 encodes to [0,0,1,0,1,0,1]; layer 3 slot 1 is covered."""
        pattern = hamming_pattern()
        assert pattern.value(3, 1, 2) == 1
        np.testing.assert_array_equal(pattern.column(2), [0, 0, 1, 0, 1, 0, 1])

    def test_slots_complementary(self):
        pattern = hamming_pattern()
        assert ((pattern.masks[:, 0, :] ^ pattern.masks[:, 1, :]) == 1).all()

    def test_zero_codeword_column(self):
        pattern = hamming_pattern()
        np.testing.assert_array_equal(pattern.column(0), np.zeros(7))

    def test_columns_match_encoder(self):
        pattern = hamming_pattern()
        for i in range(16):
            np.testing.assert_array_equal(
                pattern.column(i), hamming_encode(index_bits(i, 4))
            )

    def test_to_text_grid(self):
        text = hamming_pattern().to_text()
        lines = text.strip().split("\n")
        assert len(lines) == 14  # 7 layers x 2 slots
        assert all(len(line) == 16 and set(line) <= {"0", "1"} for line in lines)


class TestConvPattern:
    def test_zero_column(self):
        pattern = conv_pattern(4)
        np.testing.assert_array_equal(pattern.column(0), np.zeros(8))

    def test_worked_column(self):
        """L = 3, segment bits [1,0,0] yields the coded column [1,1,1,0,1,1]."""
        pattern = conv_pattern(3)
        np.testing.assert_array_equal(pattern.column(bintodec([1, 0, 0])), [1, 1, 1, 0, 1, 1])

    @pytest.mark.parametrize("levels", range(1, 11))
    def test_columns_match_encoder_and_distinct(self, levels):
        pattern = conv_pattern(levels)
        seen = set()
        for i in range(2**levels):
            column = pattern.column(i)
            np.testing.assert_array_equal(column, conv_encode(index_bits(i, levels)))
            seen.add(tuple(column))
        assert len(seen) == 2**levels

    def test_pairwise_distance_structure(self):
        """Unterminated-code distances: trailing-bit pairs sit at 2, earlier
        differences at the free distance 5 (verified exhaustively for L <= 8)."""
        for levels in range(3, 9):
            cols = conv_pattern(levels).masks[:, 0, :].astype(int).T
            n = 2**levels
            overall = 4 * levels
            early = 4 * levels
            for i in range(n):
                for j in range(i + 1, n):
                    d = int(np.abs(cols[i] - cols[j]).sum())
                    overall = min(overall, d)
                    # difference pattern ends >= 2 steps before the message end
                    if (i ^ j) % 4 == 0:
                        early = min(early, d)
            assert overall == 2  # adjacent indices differ only in the tail block
            assert early == 5  # the code's free distance protects interior bits

    def test_level_validation(self):
        with pytest.raises(ValueError):
            conv_pattern(0)


class TestCoverageSet:
    def test_full_and_empty_measures(self):
        pattern = conv_pattern(3)
        full = CoverageSet.full(8)
        empty = CoverageSet(8, frozenset())
        assert full.measure == 2.0
        assert empty.measure == 0.0
        assert coverage_set(pattern, 1).n_segments == 8

    def test_mask_example(self):
        """L = 3 mask 10110010 covers 4 segments, measure 1."""
        cov = CoverageSet.from_mask([1, 0, 1, 1, 0, 0, 1, 0])
        assert len(cov.segments) == 4
        assert cov.measure == pytest.approx(1.0)

    def test_refine_preserves_measure(self):
        cov = CoverageSet(4, frozenset((1, 3)))
        fine = cov.refine(16)
        assert fine.measure == pytest.approx(cov.measure)
        assert fine.segments == frozenset((4, 5, 6, 7, 12, 13, 14, 15))

    def test_refine_requires_multiple(self):
        with pytest.raises(ValueError):
            CoverageSet(4, frozenset((0,))).refine(6)

    def test_contains_and_membership(self):
        cov = CoverageSet(4, frozenset((0, 3)))
        assert cov.contains(-0.9)
        assert not cov.contains(-0.1)
        assert cov.contains(1.0)  # right edge folds into the last segment
        np.testing.assert_array_equal(
            cov.membership(np.array([-0.9, -0.1, 0.6, 0.99])),
            [True, False, True, True],
        )

    def test_intervals_merge_adjacent(self):
        cov = CoverageSet(8, frozenset((2, 3, 6)))
        assert cov.intervals() == [(-0.5, 0.0), (0.5, 0.75)]

    def test_slot_coverage_from_pattern(self):
        pattern = hamming_pattern()
        slot1 = coverage_set(pattern, 5, 1)
        slot2 = coverage_set(pattern, 5, 2)
        assert slot1.segments | slot2.segments == set(range(16))
        assert not slot1.segments & slot2.segments
        assert slot1.measure == pytest.approx(1.0)  # parity rows are balanced

    def test_layer_bounds_validated(self):
        with pytest.raises(ValueError):
            coverage_set(conv_pattern(3), 7)
        with pytest.raises(ValueError):
            coverage_set(conv_pattern(3), 1, slot=2)


class TestSurvivorDirections:
    def test_all_quarters_cover_everything(self):
        cov = survivor_directions([(0, 0), (0, 1), (1, 0), (1, 1)])
        assert cov.measure == pytest.approx(2.0)

    def test_repeated_path_single_interval(self):
        cov = survivor_directions([(0, 0)] * 4)
        assert cov.intervals() == [(-1.0, -0.5)]

    def test_four_distinct_eighths(self):
        paths = [(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)]
        cov = survivor_directions(paths)
        assert cov.segments == frozenset((0, 3, 5, 6))
        assert cov.measure == pytest.approx(1.0)
        # segments 5 and 6 touch, so the merged view has three intervals
        assert cov.intervals() == [(-1.0, -0.75), (-0.25, 0.0), (0.25, 0.75)]

    def test_requires_common_positive_length(self):
        with pytest.raises(ValueError):
            survivor_directions([(0, 1), (1,)])
        with pytest.raises(ValueError):
            survivor_directions([(), (), (), ()])


class TestAdaptiveCoverage:
    def test_full_survivors_leave_base(self):
        base = CoverageSet(8, frozenset((0, 2, 5)))
        assert adaptive_coverage(base, CoverageSet.full(2)).segments == base.segments

    def test_disjoint_sets_empty(self):
        base = CoverageSet(8, frozenset((0, 1)))
        survivors = CoverageSet(4, frozenset((2, 3)))
        assert adaptive_coverage(base, survivors).measure == 0.0

    def test_half_overlap_measure(self):
        """|B| = 1 and |S| = 1 overlapping on half gives measure 0.5."""
        base = CoverageSet(8, frozenset((0, 1, 2, 3)))
        survivors = CoverageSet(4, frozenset((1, 2)))
        out = adaptive_coverage(base, survivors)
        assert out.measure == pytest.approx(0.5)
        assert out.intervals() == [(-0.5, 0.0)]

    @given(
        st.sets(st.integers(0, 15), min_size=0, max_size=16),
        st.sets(st.integers(0, 3), min_size=1, max_size=4),
    )
    @settings(max_examples=60)
    def test_monotone_intersection(self, base_segments, survivor_segments):
        base = CoverageSet(16, frozenset(base_segments))
        survivors = CoverageSet(4, frozenset(survivor_segments))
        out = adaptive_coverage(base, survivors)
        assert out.segments <= base.refine(16).segments
        assert out.segments <= survivors.refine(16).segments
        assert out.measure <= min(base.measure, survivors.measure) + 1e-12
