"""End-to-end beam-training procedures over a simulated link.

Four schemes share a common outcome shape: exhaustive DFT sweeping, binary
hierarchical search, Hamming(7,4)-coded training with hard decisions, and
convolutional-coded training with soft chi-squared (or Gaussian) Viterbi
decoding, in fixed or adaptive beam-encoding mode.

Success for every scheme means the selected DFT codeword's 2/N-wide angular
segment contains the true LoS direction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .channel import ChannelRealization, LinkBudget, draw_noise, received_power, received_sample
from .codes import TrellisState, chi2_llr, gaussian_llr, hamming_correct, viterbi_step
from .patterns import (
    CoverageSet,
    SpaceTimeBeamPattern,
    adaptive_coverage,
    bintodec,
    conv_pattern,
    coverage_set,
    hamming_pattern,
    survivor_directions,
)
from .synthesis import BeamLibrary, dft_codebook

SCHEMES = ("exhaustive", "hierarchical", "coded-fixed", "coded-adaptive", "hamming")


def overhead(scheme: str, n_antennas: int) -> tuple[int, int]:
    """(training slots, feedback slots) per scheme for an N-antenna sweep.

    Follows the overhead table: exhaustive (N, 1), hierarchical
    (2 log2 N, log2 N), fixed coded (2 log2 N, 2), adaptive coded
    (2 log2 N, log2 N).  N must be a power of two.
    """
    log2n = int(math.log2(n_antennas))
    if 2**log2n != n_antennas or n_antennas < 2:
        raise ValueError(f"n_antennas must be a power of two >= 2, got {n_antennas}")
    if scheme == "exhaustive":
        return n_antennas, 1
    if scheme == "hierarchical":
        return 2 * log2n, log2n
    if scheme == "coded-fixed":
        # Degenerate N=2 has no coded layers, only the bottom-layer choice.
        return 2 * log2n, 2 if n_antennas > 2 else 1
    if scheme == "coded-adaptive":
        return 2 * log2n, log2n
    raise ValueError(f"unknown scheme {scheme!r}")


def true_segment(phi: float, n_antennas: int) -> int:
    """0-based index of the DFT segment containing the direction phi."""
    return min(int((phi + 1.0) / 2.0 * n_antennas), n_antennas - 1)


def layer_amplitude(budget: LinkBudget, coverage: CoverageSet, beta_magnitude: float = 1.0) -> float:
    """Genie-aided received amplitude sqrt(P) * gamma * |beta| * sqrt(2/|B|)."""
    return (
        math.sqrt(budget.transmit_power)
        * budget.pathloss_gain
        * beta_magnitude
        * math.sqrt(2.0 / coverage.measure)
    )


@dataclass(frozen=True)
class TrainingOutcome:
    selected_index: int  # 1-based index into the DFT codebook
    slots_used: int
    feedback_slots: int
    decoded_bits: tuple
    success: bool
    beamformer: np.ndarray | None = field(repr=False, compare=False, default=None)


def format_trace_csv(trace) -> str:
    """Render a signaling trace as CSV (slot, phase, codeword, power, feedback)."""
    lines = ["slot,phase,codeword_id,received_power,feedback_bits"]
    for slot, phase, codeword_id, power, feedback in trace:
        power_txt = "" if power is None else repr(float(power))
        lines.append(f"{slot},{phase},{codeword_id},{power_txt},{feedback}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Codebooks
# ---------------------------------------------------------------------------


class HierarchicalCodebook:
    """Dyadic binary-search codebook; upper layers GS beams, bottom layer DFT."""

    def __init__(self, n_antennas: int, library: BeamLibrary):
        self.n_antennas = n_antennas
        self.n_layers = int(math.log2(n_antennas))
        self.library = library
        self._dft = dft_codebook(n_antennas)

    def codeword(self, layer: int, node: int) -> np.ndarray:
        """Beam of the node-th dyadic interval at the given layer (1-based)."""
        if layer == self.n_layers:
            return self._dft[node]
        return self.library.codeword_for(CoverageSet(2**layer, frozenset((node,))))


class ConvCodebook:
    """Convolutional space-time pattern with GS beams per coverage set."""

    def __init__(self, n_antennas: int, library: BeamLibrary):
        self.n_antennas = n_antennas
        self.n_levels = int(math.log2(n_antennas)) - 1
        if self.n_levels < 1:
            raise ValueError("convolutional training needs at least 4 antennas")
        self.pattern = conv_pattern(self.n_levels)
        self.base_coverages = [
            coverage_set(self.pattern, layer)
            for layer in range(1, self.pattern.n_layers + 1)
        ]
        self.library = library
        self._dft = dft_codebook(n_antennas)

    def beam(self, coverage: CoverageSet) -> np.ndarray:
        return self.library.codeword_for(coverage)

    def bottom_codeword(self, index: int) -> np.ndarray:
        return self._dft[index]


class HammingCodebook:
    """Two complementary GS beams per layer of the 7-layer Hamming pattern."""

    N_ANTENNAS = 16

    def __init__(self, library: BeamLibrary):
        if library.n_antennas != self.N_ANTENNAS:
            raise ValueError("the Hamming scheme is defined for 16 antennas")
        self.n_antennas = self.N_ANTENNAS
        self.pattern = hamming_pattern()
        self.coverages = [
            [coverage_set(self.pattern, layer, slot) for slot in (1, 2)]
            for layer in range(1, 8)
        ]
        self.library = library
        self._dft = dft_codebook(self.N_ANTENNAS)

    def beam(self, layer: int, slot: int) -> np.ndarray:
        return self.library.codeword_for(self.coverages[layer - 1][slot - 1])

    def bottom_codeword(self, index: int) -> np.ndarray:
        return self._dft[index]


@lru_cache(maxsize=None)
def build_library(
    n_antennas: int, oversample: int = 4, max_iters: int = 100, seed: int = 7
) -> BeamLibrary:
    return BeamLibrary(n_antennas, oversample, max_iters, seed)


@lru_cache(maxsize=None)
def build_hierarchical_codebook(n_antennas: int, seed: int = 7) -> HierarchicalCodebook:
    return HierarchicalCodebook(n_antennas, build_library(n_antennas, seed=seed))


@lru_cache(maxsize=None)
def build_conv_codebook(n_antennas: int, seed: int = 7) -> ConvCodebook:
    return ConvCodebook(n_antennas, build_library(n_antennas, seed=seed))


@lru_cache(maxsize=None)
def build_hamming_codebook(seed: int = 7) -> HammingCodebook:
    return HammingCodebook(build_library(HammingCodebook.N_ANTENNAS, seed=seed))


# ---------------------------------------------------------------------------
# Training procedures
# ---------------------------------------------------------------------------


def _measure(channel, beamformer, budget, rng) -> float:
    noise = draw_noise(rng, budget.noise_power)
    return received_power(received_sample(channel, beamformer, budget, noise))


def _check_antennas(channel: ChannelRealization, n_antennas: int):
    if channel.n_antennas != n_antennas:
        raise ValueError(
            f"channel has {channel.n_antennas} antennas but the codebook expects {n_antennas}"
        )


def exhaustive_sweep(
    channel: ChannelRealization,
    budget: LinkBudget,
    rng: np.random.Generator,
    codebook: np.ndarray | None = None,
    trace: list | None = None,
) -> TrainingOutcome:
    """Sweep all N DFT codewords and pick the highest received power."""
    n = channel.n_antennas
    if codebook is None:
        codebook = dft_codebook(n)
    amp = math.sqrt(budget.transmit_power) * budget.pathloss_gain
    signals = amp * (codebook @ channel.row_vector) + draw_noise(
        rng, budget.noise_power, size=n
    )
    powers = np.abs(signals) ** 2
    best = int(np.argmax(powers))
    if trace is not None:
        for i, p in enumerate(powers):
            trace.append((i + 1, "sweep", f"dft[{i + 1}]", float(p), ""))
        trace.append((n, "feedback", f"dft[{best + 1}]", None, str(best + 1)))
    return TrainingOutcome(
        selected_index=best + 1,
        slots_used=n,
        feedback_slots=1,
        decoded_bits=(),
        success=true_segment(channel.los_direction, n) == best,
        beamformer=codebook[best],
    )


def binary_hierarchical(
    channel: ChannelRealization,
    budget: LinkBudget,
    codebook: HierarchicalCodebook,
    rng: np.random.Generator,
    trace: list | None = None,
) -> TrainingOutcome:
    """Layer-by-layer binary search over the dyadic codebook."""
    _check_antennas(channel, codebook.n_antennas)
    node = 0
    bits = []
    slot = 0
    for layer in range(1, codebook.n_layers + 1):
        powers = []
        for child in (2 * node, 2 * node + 1):
            w = codebook.codeword(layer, child)
            p = _measure(channel, w, budget, rng)
            powers.append(p)
            slot += 1
            if trace is not None:
                trace.append((slot, f"layer{layer}", f"hier[{layer},{child}]", p, ""))
        bit = 1 if powers[1] > powers[0] else 0
        bits.append(bit)
        node = 2 * node + bit
        if trace is not None:
            trace.append((slot, f"layer{layer}", "", None, str(bit)))
    selected = node + 1
    return TrainingOutcome(
        selected_index=selected,
        slots_used=2 * codebook.n_layers,
        feedback_slots=codebook.n_layers,
        decoded_bits=tuple(bits),
        success=true_segment(channel.los_direction, codebook.n_antennas) == node,
        beamformer=codebook.codeword(codebook.n_layers, node),
    )


def hamming_training(
    channel: ChannelRealization,
    budget: LinkBudget,
    codebook: HammingCodebook,
    rng: np.random.Generator,
    trace: list | None = None,
) -> TrainingOutcome:
    """Hamming(7,4)-coded training: 14 slots, hard bits, syndrome correction.

    The per-layer bit is 1 when the slot-1 (pattern-bit-1) beam is stronger,
    so the clean feedback sequence equals the segment's codeword; a single
    wrong layer decision is repaired by the syndrome lookup.
    """
    _check_antennas(channel, codebook.N_ANTENNAS)
    received_bits = []
    slot = 0
    for layer in range(1, 8):
        powers = []
        for slot_id in (1, 2):
            w = codebook.beam(layer, slot_id)
            p = _measure(channel, w, budget, rng)
            powers.append(p)
            slot += 1
            if trace is not None:
                trace.append((slot, f"layer{layer}", f"ham[{layer},{slot_id}]", p, ""))
        bit = 1 if powers[0] > powers[1] else 0
        received_bits.append(bit)
        if trace is not None:
            trace.append((slot, f"layer{layer}", "", None, str(bit)))
    corrected, _ = hamming_correct(received_bits)
    segment = bintodec(corrected[:4])
    return TrainingOutcome(
        selected_index=segment + 1,
        slots_used=14,
        feedback_slots=7,
        decoded_bits=tuple(int(b) for b in corrected),
        success=true_segment(channel.los_direction, 16) == segment,
        beamformer=codebook.bottom_codeword(segment),
    )


def coded_training(
    channel: ChannelRealization,
    budget: LinkBudget,
    codebook: ConvCodebook,
    rng: np.random.Generator,
    mode: str = "fixed",
    llr_kind: str = "chi-squared",
    trace: list | None = None,
) -> TrainingOutcome:
    """Convolutional-coded training with soft Viterbi decoding.

    Each trellis level measures the two coded-layer powers and advances the
    survivor paths.  In adaptive mode the layer coverages are first
    intersected with the directions of the current survivor paths, which
    raises the per-layer gain; an empty intersection becomes a silent slot
    with LLR 0.  After the last level the two DFT codewords under the winning
    survivor index are compared directly.
    """
    if mode not in ("fixed", "adaptive"):
        raise ValueError(f"unknown coded-training mode {mode!r}")
    llr_fn = {"chi-squared": chi2_llr, "gaussian": gaussian_llr}.get(llr_kind)
    if llr_fn is None:
        raise ValueError(f"unknown LLR kind {llr_kind!r}")
    _check_antennas(channel, codebook.n_antennas)

    n = codebook.n_antennas
    sigma2 = budget.noise_power
    state = TrellisState.initial()
    slot = 0
    for level in range(1, codebook.n_levels + 1):
        if mode == "adaptive" and level > 1:
            survivors = survivor_directions(state.paths)
        else:
            survivors = None
        llrs = []
        for layer in (2 * level - 1, 2 * level):
            coverage = codebook.base_coverages[layer - 1]
            if survivors is not None:
                coverage = adaptive_coverage(coverage, survivors)
            slot += 1
            if coverage.measure == 0.0:
                # No direction is consistent with both the pattern and the
                # survivors: silent slot, no evidence either way.
                llrs.append(0.0)
                if trace is not None:
                    trace.append((slot, f"level{level}", "silent", None, ""))
                continue
            w = codebook.beam(coverage)
            power = _measure(channel, w, budget, rng)
            amplitude = layer_amplitude(budget, coverage)
            llrs.append(llr_fn(power, amplitude, sigma2))
            if trace is not None:
                trace.append(
                    (slot, f"level{level}", f"conv[{layer}]{coverage.key()}", power, "")
                )
        state = viterbi_step(state, (llrs[0], llrs[1]))
        if trace is not None and mode == "adaptive":
            best_so_far = min(range(4), key=lambda s: (state.losses[s], s))
            trace.append(
                (slot, f"level{level}", "", None,
                 "".join(str(b) for b in state.paths[best_so_far]))
            )

    best = min(range(4), key=lambda s: (state.losses[s], s))
    path = state.paths[best]
    t_index = bintodec(path)

    bottom = (2 * t_index, 2 * t_index + 1)
    powers = []
    for idx in bottom:
        w = codebook.bottom_codeword(idx)
        p = _measure(channel, w, budget, rng)
        powers.append(p)
        slot += 1
        if trace is not None:
            trace.append((slot, "bottom", f"dft[{idx + 1}]", p, ""))
    chosen = bottom[1] if powers[1] > powers[0] else bottom[0]
    if trace is not None:
        trace.append((slot, "bottom", f"dft[{chosen + 1}]", None, str(chosen + 1)))

    log2n = codebook.n_levels + 1
    return TrainingOutcome(
        selected_index=chosen + 1,
        slots_used=2 * log2n,
        feedback_slots=2 if mode == "fixed" else log2n,
        decoded_bits=tuple(path),
        success=true_segment(channel.los_direction, n) == chosen,
        beamformer=codebook.bottom_codeword(chosen),
    )
