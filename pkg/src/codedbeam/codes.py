"""Channel-code machinery for coded beam training.

Hamming(7,4) encode/syndrome-correct, the rate-1/2 constraint-length-3
convolutional encoder, received-power log-likelihood ratios under the
noncentral-chi-squared and Gaussian power models, Viterbi decoding over the
4-state trellis, and the exhaustive ML decoding bound.

Bit convention: mask/branch bit 1 means "beam covers the user" (signal
present); an LLR is log p(power | covered) - log p(power | not covered).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Systematic generator and parity-check matrices of the (7,4) Hamming code.
HAMMING_G = np.array(
    [
        [1, 0, 0, 0, 1, 1, 1],
        [0, 1, 0, 0, 1, 1, 0],
        [0, 0, 1, 0, 1, 0, 1],
        [0, 0, 0, 1, 0, 1, 1],
    ],
    dtype=np.uint8,
)
HAMMING_H = np.array(
    [
        [1, 1, 1, 0, 1, 0, 0],
        [1, 1, 0, 1, 0, 1, 0],
        [1, 0, 1, 1, 0, 0, 1],
    ],
    dtype=np.uint8,
)

# Syndrome -> 1-based error position (0 = no error); the columns of H.
HAMMING_SYNDROMES = {
    (1, 1, 1): 1,
    (1, 1, 0): 2,
    (1, 0, 1): 3,
    (0, 1, 1): 4,
    (1, 0, 0): 5,
    (0, 1, 0): 6,
    (0, 0, 1): 7,
    (0, 0, 0): 0,
}


def _as_bits(seq, length: int | None = None) -> np.ndarray:
    bits = np.asarray(seq, dtype=np.uint8)
    if bits.ndim != 1 or not np.all((bits == 0) | (bits == 1)):
        raise ValueError("expected a 1-D sequence of 0/1 bits")
    if length is not None and bits.size != length:
        raise ValueError(f"expected {length} bits, got {bits.size}")
    return bits


def hamming_encode(message) -> np.ndarray:
    """Encode 4 message bits into the systematic 7-bit Hamming codeword u @ G."""
    u = _as_bits(message, 4)
    return (u @ HAMMING_G) % 2


def hamming_correct(received) -> tuple[np.ndarray, int]:
    """Syndrome-correct a 7-bit word; returns (corrected word, error position 0..7).

    Position 0 means the syndrome was 000 (no correction applied).  Every
    single-bit error pattern maps to a distinct syndrome, so all such errors
    are repaired exactly.
    """
    x = _as_bits(received, 7)
    syndrome = tuple(int(b) for b in (x @ HAMMING_H.T) % 2)
    position = HAMMING_SYNDROMES[syndrome]
    corrected = x.copy()
    if position:
        corrected[position - 1] ^= 1
    return corrected, position


def conv_encode(message) -> np.ndarray:
    """Rate-1/2 convolutional encoding with generators 111/101 (octal 7/5).

    Output block i is (u_i ^ u_{i-1} ^ u_{i-2}, u_i ^ u_{i-2}) with the shift
    register starting from 00 and no termination tail appended.
    """
    u = _as_bits(message)
    if u.size < 1:
        raise ValueError("message must contain at least one bit")
    out = np.empty(2 * u.size, dtype=np.uint8)
    m1 = m2 = 0
    for i, bit in enumerate(u):
        out[2 * i] = bit ^ m1 ^ m2
        out[2 * i + 1] = bit ^ m2
        m1, m2 = int(bit), m1
    return out


# ---------------------------------------------------------------------------
# Power-domain LLRs
# ---------------------------------------------------------------------------

# Coefficients 1/(m!)^2 of the I0 power series in q = z^2/4.  47 terms keep
# the truncation below 1e-19 relative for z <= 20.
_I0_SERIES_COEFFS = [1.0 / math.factorial(m) ** 2 for m in range(48)]


def _asymptotic_coeffs(count: int = 8) -> list:
    # prod_{j<=k}(2j-1)^2 / k! for I0(z) ~ e^z/sqrt(2 pi z) * (1 + sum c_k/(8z)^k)
    out = []
    prod = 1.0
    for k in range(1, count + 1):
        prod *= (2 * k - 1) ** 2
        out.append(prod / math.factorial(k))
    return out


_I0_ASYMPTOTIC_COEFFS = _asymptotic_coeffs()


def log_bessel_i0(z):
    """log I0(z) for z >= 0, scalar or ndarray.

    Power series below z = 20 (relative error < 1e-9), asymptotic expansion
    z - log(2 pi z)/2 + log(1 + 1/(8z) + ...) above (relative error < 1e-6).
    """
    arr = np.asarray(z, dtype=float)
    if np.any(arr < 0):
        raise ValueError("log_bessel_i0 requires z >= 0")
    out = np.empty_like(arr)
    small = arr <= 20.0
    if np.any(small):
        q = arr[small] ** 2 / 4.0
        acc = np.zeros_like(q)
        for c in reversed(_I0_SERIES_COEFFS):
            acc = acc * q + c
        out[small] = np.log(acc)
    if not np.all(small):
        big = arr[~small]
        inv = 1.0 / (8.0 * big)
        corr = np.zeros_like(big)
        for c in reversed(_I0_ASYMPTOTIC_COEFFS):
            corr = (corr + c) * inv
        out[~small] = big - 0.5 * np.log(2.0 * math.pi * big) + np.log1p(corr)
    return float(out) if np.isscalar(z) or arr.ndim == 0 else out


def _check_llr_args(power, amplitude: float, noise_power: float):
    if noise_power <= 0.0:
        raise ValueError("noise power must be strictly positive")
    if amplitude < 0.0:
        raise ValueError("signal amplitude must be nonnegative")
    arr = np.asarray(power, dtype=float)
    if np.any(arr < 0):
        raise ValueError("received power cannot be negative")
    return arr


def chi2_llr(power, amplitude: float, noise_power: float):
    """Noncentral-chi-squared power LLR: -A^2/s2 + log I0(2 A sqrt(x) / s2).

    Strictly increasing in the power x whenever A > 0.
    """
    x = _check_llr_args(power, amplitude, noise_power)
    val = -(amplitude**2) / noise_power + log_bessel_i0(
        2.0 * amplitude * np.sqrt(x) / noise_power
    )
    return float(val) if np.isscalar(power) else val


def gaussian_llr(power, amplitude: float, noise_power: float):
    """Baseline Gaussian power LLR with means s2 and s2 + A^2, variance s2^2.

    Reduces to (x - s2 - A^2/2) * A^2 / s2^2, affine in the power.
    """
    x = _check_llr_args(power, amplitude, noise_power)
    val = (x - noise_power - amplitude**2 / 2.0) * amplitude**2 / noise_power**2
    return float(val) if np.isscalar(power) else val


@dataclass(frozen=True)
class LlrModel:
    """Per-layer LLR calculator: kind is 'chi-squared' or 'gaussian'."""

    kind: str
    signal_amplitude: float
    noise_power: float

    def __post_init__(self):
        if self.kind not in ("chi-squared", "gaussian"):
            raise ValueError(f"unknown LLR kind {self.kind!r}")
        if self.signal_amplitude < 0.0 or self.noise_power <= 0.0:
            raise ValueError("require amplitude >= 0 and noise power > 0")

    def __call__(self, power):
        fn = chi2_llr if self.kind == "chi-squared" else gaussian_llr
        return fn(power, self.signal_amplitude, self.noise_power)


# ---------------------------------------------------------------------------
# Viterbi decoding over the 4-state trellis
# ---------------------------------------------------------------------------

def _incoming_branches() -> tuple:
    # State index 2*m1 + m2 for register contents (m1, m2).  Branches into
    # state (a, b) come from states (b, 0) and (b, 1) on input a, in that
    # tie-break order, with output (a ^ b ^ m2, a ^ m2) from predecessor (b, m2).
    table = []
    for s in range(4):
        a, b = s >> 1, s & 1
        branches = []
        for m2 in (0, 1):
            branches.append(((b << 1) | m2, a, (a ^ b ^ m2, a ^ m2)))
        table.append(tuple(branches))
    return tuple(table)


_TRELLIS_IN = _incoming_branches()

# Finite penalty pinning the decoder start to state 00; paths rooted in other
# states can never undercut a real path but every loss stays finite.
START_PENALTY = 1e300


@dataclass(frozen=True)
class TrellisState:
    """Survivor losses and bit histories for the 4 encoder states."""

    losses: tuple
    paths: tuple
    level: int = 0

    @classmethod
    def initial(cls, losses=(0.0, START_PENALTY, START_PENALTY, START_PENALTY)):
        return cls(tuple(float(v) for v in losses), ((), (), (), ()), 0)


def _branch_cost(bits, llr1: float, llr2: float) -> float:
    # Subtract the LLR when the branch bit is 1 (signal present), add when 0.
    c = -llr1 if bits[0] else llr1
    c += -llr2 if bits[1] else llr2
    return c


def viterbi_step(state: TrellisState, llr_pair) -> TrellisState:
    """Advance the trellis one level using the two coded-layer LLRs.

    Keeps the minimum-loss incoming branch per state; ties resolve to the
    lower-indexed predecessor.
    """
    llr1, llr2 = float(llr_pair[0]), float(llr_pair[1])
    losses = []
    paths = []
    for branches in _TRELLIS_IN:
        t1, bit, bits1 = branches[0]
        t2, _, bits2 = branches[1]
        l1 = state.losses[t1] + _branch_cost(bits1, llr1, llr2)
        l2 = state.losses[t2] + _branch_cost(bits2, llr1, llr2)
        if l1 <= l2:
            losses.append(l1)
            paths.append(state.paths[t1] + (bit,))
        else:
            losses.append(l2)
            paths.append(state.paths[t2] + (bit,))
    return TrellisState(tuple(losses), tuple(paths), state.level + 1)


def viterbi_decode(llrs) -> np.ndarray:
    """Decode 2L layer LLRs into the L message bits of the best survivor path."""
    seq = np.asarray(llrs, dtype=float).ravel()
    if seq.size % 2 != 0:
        raise ValueError(f"LLR sequence length must be even, got {seq.size}")
    state = TrellisState.initial()
    for i in range(0, seq.size, 2):
        state = viterbi_step(state, (seq[i], seq[i + 1]))
    best = min(range(4), key=lambda s: (state.losses[s], s))
    return np.asarray(state.paths[best], dtype=np.uint8)


def ml_decode(powers, patterns, amplitudes, noise_power: float) -> int:
    """Exhaustive ML index decision from per-layer received powers.

    patterns is an (n_layers, n_indices) 0/1 array whose column i is the
    coded coverage sequence of candidate index i; the score of index i is the
    chi-squared LLR summed over its signal-present layers.  Ties break toward
    the lowest index.
    """
    x = np.asarray(powers, dtype=float).ravel()
    masks = np.asarray(patterns)
    amps = np.asarray(amplitudes, dtype=float).ravel()
    if masks.ndim != 2 or masks.shape[0] != x.size or amps.size != x.size:
        raise ValueError(
            "powers, pattern rows and amplitudes must agree in layer count"
        )
    layer_llrs = np.array(
        [chi2_llr(x[l], amps[l], noise_power) for l in range(x.size)]
    )
    scores = layer_llrs @ masks
    return int(np.argmax(scores))
