"""Space-time 0/1 beam patterns, angular coverage sets, and adaptive coverage.

The spatial region [-1, 1] is split into 2^k uniform segments; a mask value of
1 means the beam is meant to cover that segment (signal present).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .codes import conv_encode, hamming_encode


def bintodec(bits) -> int:
    """MSB-first binary to decimal, e.g. bintodec([0,0,1,0]) == 2."""
    value = 0
    for b in bits:
        value = (value << 1) | int(b)
    return value


def index_bits(value: int, width: int) -> tuple:
    """MSB-first fixed-width bit tuple of an integer."""
    return tuple((value >> (width - 1 - i)) & 1 for i in range(width))


@dataclass(frozen=True)
class CoverageSet:
    """Union of uniform angular segments of [-1, 1] at a given resolution."""

    n_segments: int
    segments: frozenset

    def __post_init__(self):
        if self.n_segments < 1:
            raise ValueError("n_segments must be >= 1")
        if any(s < 0 or s >= self.n_segments for s in self.segments):
            raise ValueError("segment index out of range")

    @classmethod
    def full(cls, n_segments: int) -> "CoverageSet":
        return cls(n_segments, frozenset(range(n_segments)))

    @classmethod
    def from_mask(cls, mask) -> "CoverageSet":
        mask = np.asarray(mask)
        return cls(mask.size, frozenset(np.flatnonzero(mask).tolist()))

    @property
    def measure(self) -> float:
        """Total covered length; between 0 and 2."""
        return len(self.segments) * 2.0 / self.n_segments

    @property
    def width(self) -> float:
        return 2.0 / self.n_segments

    def mask(self) -> np.ndarray:
        out = np.zeros(self.n_segments, dtype=np.uint8)
        out[sorted(self.segments)] = 1
        return out

    def key(self) -> tuple:
        """Hashable cache key: (resolution, segment bitmask)."""
        bits = 0
        for s in self.segments:
            bits |= 1 << s
        return (self.n_segments, bits)

    def refine(self, n_target: int) -> "CoverageSet":
        """Re-express the set on a finer grid; n_target must be a multiple."""
        if n_target % self.n_segments != 0:
            raise ValueError(
                f"cannot refine {self.n_segments} segments onto {n_target}"
            )
        factor = n_target // self.n_segments
        segs = frozenset(
            s * factor + i for s in self.segments for i in range(factor)
        )
        return CoverageSet(n_target, segs)

    def contains(self, phi: float) -> bool:
        """Membership of a spatial direction, right-edge inclusive at +1."""
        idx = min(int((phi + 1.0) / 2.0 * self.n_segments), self.n_segments - 1)
        return idx in self.segments

    def membership(self, angles: np.ndarray) -> np.ndarray:
        idx = np.minimum(
            ((np.asarray(angles) + 1.0) / 2.0 * self.n_segments).astype(int),
            self.n_segments - 1,
        )
        lut = np.zeros(self.n_segments, dtype=bool)
        lut[sorted(self.segments)] = True
        return lut[idx]

    def intervals(self) -> list:
        """Covered region as merged (lo, hi) interval tuples."""
        out = []
        for s in sorted(self.segments):
            lo = -1.0 + s * self.width
            hi = lo + self.width
            if out and math.isclose(out[-1][1], lo):
                out[-1] = (out[-1][0], hi)
            else:
                out.append((lo, hi))
        return out


@dataclass(frozen=True)
class SpaceTimeBeamPattern:
    """Binary masks per (layer, codeword slot, angular segment).

    Two complementary slots per layer for hard-decision schemes, a single
    slot per layer for soft-decision schemes.  Layers and slots are 1-based
    to match the usual trellis/layer numbering; segments are 0-based.
    """

    masks: np.ndarray  # (n_layers, n_slots, n_segments), uint8

    @property
    def n_layers(self) -> int:
        return self.masks.shape[0]

    @property
    def n_slots(self) -> int:
        return self.masks.shape[1]

    @property
    def n_segments(self) -> int:
        return self.masks.shape[2]

    def value(self, layer: int, slot: int, segment: int) -> int:
        return int(self.masks[layer - 1, slot - 1, segment])

    def column(self, segment: int, slot: int = 1) -> np.ndarray:
        """Coded bit sequence seen by a user sitting in one segment."""
        return self.masks[:, slot - 1, segment].copy()

    def to_text(self) -> str:
        """Plain 0/1 grid, one line per (layer, slot), segments left to right."""
        lines = []
        for l in range(self.n_layers):
            for b in range(self.n_slots):
                lines.append("".join(str(int(v)) for v in self.masks[l, b]))
        return "\n".join(lines) + "\n"


def hamming_pattern() -> SpaceTimeBeamPattern:
    """7-layer, two-slot pattern over 16 segments from the (7,4) Hamming code.

    Slot 1 of layer l covers the segments whose codeword bit l is 1; slot 2
    is the bitwise complement.
    """
    masks = np.zeros((7, 2, 16), dtype=np.uint8)
    for i in range(16):
        x = hamming_encode(index_bits(i, 4))
        masks[:, 0, i] = x
        masks[:, 1, i] = 1 - x
    return SpaceTimeBeamPattern(masks)


def conv_pattern(n_levels: int) -> SpaceTimeBeamPattern:
    """Single-slot pattern with 2L layers over 2^L segments, L = n_levels.

    Column i is the convolutional encoding of the MSB-first bits of i.
    """
    if n_levels < 1:
        raise ValueError("need at least one trellis level")
    n_seg = 2**n_levels
    masks = np.zeros((2 * n_levels, 1, n_seg), dtype=np.uint8)
    for i in range(n_seg):
        masks[:, 0, i] = conv_encode(index_bits(i, n_levels))
    return SpaceTimeBeamPattern(masks)


def coverage_set(pattern: SpaceTimeBeamPattern, layer: int, slot: int = 1) -> CoverageSet:
    """Segments a layer's slot is meant to cover (mask value 1)."""
    if not 1 <= layer <= pattern.n_layers:
        raise ValueError(f"layer {layer} outside 1..{pattern.n_layers}")
    if not 1 <= slot <= pattern.n_slots:
        raise ValueError(f"slot {slot} outside 1..{pattern.n_slots}")
    return CoverageSet.from_mask(pattern.masks[layer - 1, slot - 1])


def survivor_directions(paths) -> CoverageSet:
    """Union of the direction intervals consistent with the survivor paths.

    Each of the four bit histories of length l selects one interval of the
    2^l-way uniform partition of [-1, 1]; duplicates collapse.
    """
    paths = list(paths)
    lengths = {len(p) for p in paths}
    if len(lengths) != 1 or lengths == {0}:
        raise ValueError("survivor paths must share a common positive length")
    depth = lengths.pop()
    return CoverageSet(2**depth, frozenset(bintodec(p) for p in paths))


def adaptive_coverage(base: CoverageSet, survivors: CoverageSet) -> CoverageSet:
    """Intersection of a layer's coverage with the survivor directions.

    The coarser operand is refined onto the finer grid first; the result can
    be empty, in which case the layer carries no beam energy.
    """
    n = max(base.n_segments, survivors.n_segments)
    a = base.refine(n) if base.n_segments != n else base
    b = survivors.refine(n) if survivors.n_segments != n else survivors
    return CoverageSet(n, a.segments & b.segments)
