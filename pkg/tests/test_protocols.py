"""Tests for the four beam-training procedures and overhead accounting."""

import math

import numpy as np
import pytest

from codedbeam.channel import LinkBudget, los_channel
from codedbeam.patterns import bintodec
from codedbeam.protocols import (
    HammingCodebook,
    binary_hierarchical,
    build_conv_codebook,
    build_hamming_codebook,
    build_hierarchical_codebook,
    coded_training,
    exhaustive_sweep,
    format_trace_csv,
    hamming_training,
    layer_amplitude,
    overhead,
    true_segment,
)
from codedbeam.synthesis import dft_directions

QUIET = LinkBudget(transmit_power=1.0, noise_power=1e-12)


def quiet_channel(phi, n):
    return los_channel(1.0, phi, n)


class TestOverhead:
    def test_table_n16(self):
        assert overhead("exhaustive", 16) == (16, 1)
        assert overhead("hierarchical", 16) == (8, 4)
        assert overhead("coded-fixed", 16) == (8, 2)
        assert overhead("coded-adaptive", 16) == (8, 4)

    def test_table_n1024(self):
        """The four schemes at N = 1024: {(20,10), (20,2), (1024,1), (20,10)}."""
        tuples = [
            overhead(s, 1024)
            for s in ("coded-adaptive", "coded-fixed", "exhaustive", "hierarchical")
        ]
        assert tuples == [(20, 10), (20, 2), (1024, 1), (20, 10)]

    def test_two_antenna_degenerate(self):
        """Single-layer case: every hierarchical-style scheme needs (2, 1)."""
        assert overhead("hierarchical", 2) == (2, 1)
        assert overhead("coded-adaptive", 2) == (2, 1)
        assert overhead("coded-fixed", 2) == (2, 1)

    def test_validation(self):
        with pytest.raises(ValueError):
            overhead("exhaustive", 48)
        with pytest.raises(ValueError):
            overhead("psychic", 16)


class TestTrueSegment:
    def test_grid_centers(self):
        for n in (4, 16, 64):
            for i, phi in enumerate(dft_directions(n)):
                assert true_segment(phi, n) == i

    def test_right_edge(self):
        assert true_segment(1.0, 8) == 7
        assert true_segment(-1.0, 8) == 0


class TestExhaustive:
    def test_noiseless_grid(self):
        n = 16
        rng = np.random.default_rng(0)
        for i, phi in enumerate(dft_directions(n)):
            outcome = exhaustive_sweep(quiet_channel(phi, n), QUIET, rng)
            assert outcome.selected_index == i + 1
            assert outcome.success
            assert (outcome.slots_used, outcome.feedback_slots) == overhead("exhaustive", n)

    def test_high_noise_limit_is_uniform(self):
        """With sigma^2 overwhelming the signal the argmax is near-uniform."""
        n = 16
        budget = LinkBudget(transmit_power=1e-12, noise_power=1.0)
        rng = np.random.default_rng(7)
        hits = 0
        trials = 2000
        for _ in range(trials):
            phi = rng.uniform(-1, 1)
            outcome = exhaustive_sweep(quiet_channel(phi, n), budget, rng)
            hits += outcome.success
        rate = hits / trials
        assert abs(rate - 1 / n) < 3 * math.sqrt((1 / n) * (1 - 1 / n) / trials) + 0.01


class TestBinaryHierarchical:
    def test_noiseless_grid(self):
        n = 16
        codebook = build_hierarchical_codebook(n)
        rng = np.random.default_rng(0)
        for i, phi in enumerate(dft_directions(n)):
            outcome = binary_hierarchical(quiet_channel(phi, n), QUIET, codebook, rng)
            assert outcome.selected_index == i + 1
            assert (outcome.slots_used, outcome.feedback_slots) == (8, 4)

    def test_worked_bit_sequence(self):
        """Segment 2 descends with bits [0,0,1,0]: index 3, beam at -11/16."""
        n = 16
        codebook = build_hierarchical_codebook(n)
        phi = dft_directions(n)[2]
        assert phi == pytest.approx(-11 / 16)
        outcome = binary_hierarchical(quiet_channel(phi, n), QUIET, codebook, np.random.default_rng(0))
        assert outcome.decoded_bits == (0, 0, 1, 0)
        assert outcome.selected_index == bintodec([0, 0, 1, 0]) + 1 == 3

    def test_flipped_first_bit_indexes_opposite_half(self):
        """An early wrong decision relocates the index by the subtree size."""
        assert bintodec([1, 0, 1, 0]) + 1 == 11  # the error-propagation example

    def test_antenna_mismatch(self):
        codebook = build_hierarchical_codebook(16)
        with pytest.raises(ValueError):
            binary_hierarchical(quiet_channel(0.0, 32), QUIET, codebook, np.random.default_rng(0))


class _SlotSwappedCodebook:
    """Fault injection: swaps the two complementary beams on chosen layers."""

    def __init__(self, inner: HammingCodebook, flipped_layers):
        self._inner = inner
        self._flipped = set(flipped_layers)
        self.N_ANTENNAS = inner.N_ANTENNAS
        self.pattern = inner.pattern

    def beam(self, layer, slot):
        if layer in self._flipped:
            slot = 3 - slot
        return self._inner.beam(layer, slot)

    def bottom_codeword(self, index):
        return self._inner.bottom_codeword(index)


class TestHammingTraining:
    def test_noiseless_feedback_sequence(self):
        """Segment 2 produces the feedback [0,0,1,0,1,0,1] and index 3."""
        codebook = build_hamming_codebook()
        phi = dft_directions(16)[2]
        outcome = hamming_training(quiet_channel(phi, 16), QUIET, codebook, np.random.default_rng(0))
        assert outcome.decoded_bits == (0, 0, 1, 0, 1, 0, 1)
        assert outcome.selected_index == 3
        assert (outcome.slots_used, outcome.feedback_slots) == (14, 7)

    def test_noiseless_all_segments(self):
        codebook = build_hamming_codebook()
        rng = np.random.default_rng(1)
        for i, phi in enumerate(dft_directions(16)):
            outcome = hamming_training(quiet_channel(phi, 16), QUIET, codebook, rng)
            assert outcome.selected_index == i + 1
            assert outcome.success

    def test_single_layer_fault_corrected(self):
        """Swapping layer 1's beams forces one bit error; the syndrome fixes it."""
        codebook = _SlotSwappedCodebook(build_hamming_codebook(), {1})
        phi = dft_directions(16)[2]
        outcome = hamming_training(quiet_channel(phi, 16), QUIET, codebook, np.random.default_rng(0))
        assert outcome.selected_index == 3
        assert outcome.decoded_bits == (0, 0, 1, 0, 1, 0, 1)

    def test_double_fault_miscorrects(self):
        """Two wrong layers exceed the single-error capability deterministically."""
        codebook = _SlotSwappedCodebook(build_hamming_codebook(), {1, 2})
        phi = dft_directions(16)[2]
        outcome = hamming_training(quiet_channel(phi, 16), QUIET, codebook, np.random.default_rng(0))
        # received [1,1,1,0,1,0,1] -> syndrome 001 -> flips bit 7 -> index 15
        assert outcome.selected_index == 15
        assert not outcome.success


class TestCodedTraining:
    @pytest.mark.parametrize("mode", ["fixed", "adaptive"])
    def test_noiseless_grid_n32(self, mode):
        n = 32
        codebook = build_conv_codebook(n)
        rng = np.random.default_rng(0)
        for i, phi in enumerate(dft_directions(n)):
            outcome = coded_training(quiet_channel(phi, n), QUIET, codebook, rng, mode=mode)
            assert outcome.selected_index == i + 1
            assert outcome.success
            expected = overhead("coded-fixed" if mode == "fixed" else "coded-adaptive", n)
            assert (outcome.slots_used, outcome.feedback_slots) == expected

    def test_decoded_bits_match_segment(self):
        n = 32
        codebook = build_conv_codebook(n)
        phi = dft_directions(n)[13]
        outcome = coded_training(quiet_channel(phi, n), QUIET, codebook, np.random.default_rng(0))
        assert bintodec(outcome.decoded_bits) == 13 // 2

    def test_adaptive_beats_fixed_at_matched_snr(self):
        """Survivor-pruned beams raise the gain: paired success never worse."""
        n = 64
        codebook = build_conv_codebook(n)
        budget = LinkBudget.from_snr_db(0.0)
        wins = {"fixed": 0, "adaptive": 0}
        trials = 500
        master = np.random.default_rng(42)
        for t in range(trials):
            phi = master.uniform(-1, 1)
            beta = np.exp(1j * master.uniform(0, 2 * math.pi))
            channel = los_channel(beta, phi, n)
            seeds = master.integers(2**63, size=2)
            for mode, seed in zip(("fixed", "adaptive"), seeds):
                outcome = coded_training(
                    channel, budget, codebook, np.random.default_rng(seed), mode=mode
                )
                wins[mode] += outcome.success
        assert wins["adaptive"] > wins["fixed"]

    def test_llr_kind_and_mode_validated(self):
        codebook = build_conv_codebook(16)
        rng = np.random.default_rng(0)
        with pytest.raises(ValueError):
            coded_training(quiet_channel(0.0, 16), QUIET, codebook, rng, mode="psychic")
        with pytest.raises(ValueError):
            coded_training(quiet_channel(0.0, 16), QUIET, codebook, rng, llr_kind="cauchy")

    def test_antenna_mismatch(self):
        codebook = build_conv_codebook(16)
        with pytest.raises(ValueError):
            coded_training(quiet_channel(0.0, 8), QUIET, codebook, np.random.default_rng(0))

    def test_layer_amplitude_scaling(self):
        """A_l = sqrt(P) * gamma * sqrt(2/|B|): quartering |B| doubles A_l."""
        from codedbeam.patterns import CoverageSet

        budget = LinkBudget(transmit_power=4.0, noise_power=1.0, pathloss_gain=0.5)
        wide = layer_amplitude(budget, CoverageSet(16, frozenset(range(8))))
        narrow = layer_amplitude(budget, CoverageSet(16, frozenset(range(2))))
        assert wide == pytest.approx(2.0 * 0.5 * math.sqrt(2.0))
        assert narrow == pytest.approx(2.0 * wide)


class TestSchemeOrderingHighSnr:
    def test_stochastic_dominance(self):
        """exhaustive >= adaptive coded >= hierarchical on common channels."""
        n = 32
        budget = LinkBudget.from_snr_db(3.0)
        conv = build_conv_codebook(n)
        hier = build_hierarchical_codebook(n)
        wins = {"exhaustive": 0, "adaptive": 0, "hierarchical": 0}
        master = np.random.default_rng(11)
        trials = 700
        for _ in range(trials):
            phi = master.uniform(-1, 1)
            channel = los_channel(np.exp(1j * master.uniform(0, 2 * math.pi)), phi, n)
            seeds = master.integers(2**63, size=3)
            wins["exhaustive"] += exhaustive_sweep(
                channel, budget, np.random.default_rng(seeds[0])
            ).success
            wins["adaptive"] += coded_training(
                channel, budget, conv, np.random.default_rng(seeds[1]), mode="adaptive"
            ).success
            wins["hierarchical"] += binary_hierarchical(
                channel, budget, hier, np.random.default_rng(seeds[2])
            ).success
        slack = 2 * math.sqrt(0.25 / trials) * trials  # two-sigma binomial slack
        assert wins["exhaustive"] >= wins["adaptive"] - slack
        assert wins["adaptive"] >= wins["hierarchical"] - slack


class TestTrace:
    def test_trace_rows_and_csv(self):
        n = 16
        codebook = build_conv_codebook(n)
        trace = []
        coded_training(
            quiet_channel(dft_directions(n)[5], n),
            QUIET,
            codebook,
            np.random.default_rng(0),
            mode="adaptive",
            trace=trace,
        )
        assert len(trace) >= 2 * int(math.log2(n))
        text = format_trace_csv(trace)
        lines = text.strip().split("\n")
        assert lines[0] == "slot,phase,codeword_id,received_power,feedback_bits"
        assert len(lines) == len(trace) + 1
