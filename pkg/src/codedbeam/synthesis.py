"""Beamforming codeword synthesis: DFT codebook, gain targets, GS design.

The beam gain of a unit-norm codeword v at direction phi is
g(phi) = sqrt(N) * alpha(phi) @ v, so a matched DFT beam peaks at sqrt(N) and
any codeword satisfies the energy identity integral |g|^2 dphi = 2.  The flat
in-coverage target sqrt(2/|B|) follows from that identity.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass

import numpy as np

from .channel import steering_entries
from .patterns import CoverageSet

CODEBOOK_MAGIC = b"CBTC"
CODEBOOK_VERSION = 1


def dft_directions(n_antennas: int) -> np.ndarray:
    """Spatial directions -1 + (2n-1)/N of the exhaustive codebook, n = 1..N."""
    n = np.arange(1, n_antennas + 1)
    return -1.0 + (2.0 * n - 1.0) / n_antennas


def dft_codebook(n_antennas: int) -> np.ndarray:
    """(N, N) array whose row n is the matched beamformer alpha(phi_n)^H."""
    if n_antennas < 1:
        raise ValueError("n_antennas must be >= 1")
    rows = [
        steering_entries(phi, n_antennas).conj() for phi in dft_directions(n_antennas)
    ]
    return np.vstack(rows)


def beam_gain_profile(codeword: np.ndarray, angles) -> np.ndarray:
    """Complex beam gains sqrt(N) * alpha(phi) @ v at the given directions."""
    v = np.asarray(codeword)
    n = v.shape[0]
    angles = np.atleast_1d(np.asarray(angles, dtype=float))
    k = np.arange(n)
    phases = np.exp(-1j * math.pi * np.outer(angles, k))  # rows sqrt(N)*alpha(phi)
    return phases @ v


@dataclass(frozen=True)
class GainSpec:
    """Target gain magnitudes over a uniform angle grid for one coverage set."""

    sample_angles: np.ndarray
    target_magnitudes: np.ndarray
    coverage: CoverageSet


def desired_gain(coverage: CoverageSet, n_samples: int) -> GainSpec:
    """Flat sqrt(2/|B|) target inside the coverage, zero outside."""
    if coverage.measure <= 0.0:
        raise ValueError("coverage must have positive measure")
    angles = -1.0 + 2.0 * np.arange(n_samples) / n_samples
    level = math.sqrt(2.0 / coverage.measure)
    targets = np.where(coverage.membership(angles), level, 0.0)
    return GainSpec(angles, targets, coverage)


class ManifoldMatrix:
    """Sampled array manifold A with (A^H v)_n equal to the beam gain at phi_n.

    Column n of A is sqrt(N) * alpha(phi_n)^H over a uniform K-point grid on
    [-1, 1); K >= N keeps A A^H invertible, and the least-squares operator
    (A A^H)^{-1} A is precomputed once.
    """

    def __init__(self, n_antennas: int, n_samples: int):
        if n_samples < n_antennas:
            raise ValueError(
                f"need at least {n_antennas} angle samples, got {n_samples}"
            )
        self.n_antennas = n_antennas
        self.n_samples = n_samples
        self.angles = -1.0 + 2.0 * np.arange(n_samples) / n_samples
        k = np.arange(n_antennas)
        # Rows of A^H are sqrt(N) * alpha(phi_n).
        self._adjoint = np.exp(-1j * math.pi * np.outer(self.angles, k))
        self.matrix = self._adjoint.conj().T
        gram = self.matrix @ self._adjoint
        try:
            self._ls_operator = np.linalg.solve(gram, self.matrix)
        except np.linalg.LinAlgError as err:
            raise ValueError(
                "manifold Gram matrix is singular; increase the sample count"
            ) from err

    def gains(self, codeword: np.ndarray) -> np.ndarray:
        return self._adjoint @ codeword

    def least_squares(self, gain_vector: np.ndarray) -> np.ndarray:
        return self._ls_operator @ gain_vector


def gs_design(
    spec: GainSpec,
    manifold: ManifoldMatrix,
    max_iters: int = 100,
    seed: int = 0,
) -> np.ndarray:
    """Gerchberg-Saxton codeword design against a target gain magnitude.

    Starting from seeded random phases, alternates the least-squares solve
    v = (A A^H)^{-1} A g with re-imposing the target magnitudes on A^H v, then
    normalizes the final solve to unit norm.  Deterministic for a fixed seed.
    """
    if max_iters < 1:
        raise ValueError("max_iters must be >= 1")
    if spec.sample_angles.size != manifold.n_samples:
        raise ValueError("gain spec and manifold sample grids differ")
    rng = np.random.default_rng(seed)
    phases = rng.uniform(0.0, 2.0 * math.pi, size=spec.target_magnitudes.size)
    g = spec.target_magnitudes * np.exp(1j * phases)
    for _ in range(max_iters):
        v = manifold.least_squares(g)
        attained = manifold.gains(v)
        g = spec.target_magnitudes * np.exp(1j * np.angle(attained))
    v = manifold.least_squares(g)
    norm = np.linalg.norm(v)
    if norm == 0.0:
        raise ValueError("GS design collapsed to the zero vector")
    return v / norm


def coverage_contrast_db(codeword: np.ndarray, coverage: CoverageSet, n_samples: int = 0) -> float:
    """Mean in-coverage over mean out-of-coverage gain power, in dB."""
    n = codeword.shape[0]
    if n_samples <= 0:
        n_samples = 8 * n
    angles = -1.0 + 2.0 * np.arange(n_samples) / n_samples
    power = np.abs(beam_gain_profile(codeword, angles)) ** 2
    inside = coverage.membership(angles)
    if not inside.any() or inside.all():
        raise ValueError("contrast needs both covered and uncovered directions")
    return 10.0 * math.log10(power[inside].mean() / power[~inside].mean())


class BeamLibrary:
    """Coverage-keyed cache of GS-designed codewords for one array size.

    Synthesis is deterministic given (coverage, seed), so repeated survivor
    configurations across Monte Carlo trials reuse the cached beam.
    """

    def __init__(
        self,
        n_antennas: int,
        oversample: int = 4,
        max_iters: int = 100,
        seed: int = 0,
    ):
        self.n_antennas = n_antennas
        self.max_iters = max_iters
        self.seed = seed
        self.manifold = ManifoldMatrix(n_antennas, oversample * n_antennas)
        self._cache: dict = {}

    def codeword_for(self, coverage: CoverageSet) -> np.ndarray:
        key = coverage.key()
        hit = self._cache.get(key)
        if hit is None:
            spec = desired_gain(coverage, self.manifold.n_samples)
            hit = gs_design(spec, self.manifold, self.max_iters, self.seed)
            self._cache[key] = hit
        return hit

    def __len__(self) -> int:
        return len(self._cache)


# ---------------------------------------------------------------------------
# Codebook file format: little-endian header
#   magic 'CBTC' | u32 version | u32 n_antennas | u32 n_layers
#   | u32 codewords_per_layer | u32 n_samples | u64 seed
# followed by the codewords in layer-major order, each as n_antennas pairs of
# float64 (real, imag).
# ---------------------------------------------------------------------------

_HEADER = struct.Struct("<4sIIIIIQ")


def save_codebook(
    path,
    codewords: np.ndarray,
    codewords_per_layer: int,
    n_samples: int,
    seed: int,
) -> None:
    """Serialize a (n_codewords, n_antennas) complex codeword stack."""
    cw = np.asarray(codewords, dtype=np.complex128)
    if cw.ndim != 2 or cw.shape[0] % codewords_per_layer != 0:
        raise ValueError("codeword stack shape does not match the layer layout")
    n_layers = cw.shape[0] // codewords_per_layer
    header = _HEADER.pack(
        CODEBOOK_MAGIC,
        CODEBOOK_VERSION,
        cw.shape[1],
        n_layers,
        codewords_per_layer,
        n_samples,
        seed,
    )
    interleaved = np.empty((cw.shape[0], 2 * cw.shape[1]), dtype="<f8")
    interleaved[:, 0::2] = cw.real
    interleaved[:, 1::2] = cw.imag
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(interleaved.tobytes())


def load_codebook(path) -> dict:
    """Read a codebook file back into a dict with metadata and codewords."""
    with open(path, "rb") as fh:
        raw = fh.read(_HEADER.size)
        magic, version, n_ant, n_layers, per_layer, n_samples, seed = _HEADER.unpack(raw)
        if magic != CODEBOOK_MAGIC:
            raise ValueError(f"not a codebook file (magic {magic!r})")
        if version != CODEBOOK_VERSION:
            raise ValueError(f"unsupported codebook version {version}")
        body = np.frombuffer(fh.read(), dtype="<f8")
    n_codewords = n_layers * per_layer
    if body.size != n_codewords * 2 * n_ant:
        raise ValueError("codebook payload size does not match its header")
    body = body.reshape(n_codewords, 2 * n_ant)
    codewords = body[:, 0::2] + 1j * body[:, 1::2]
    return {
        "n_antennas": n_ant,
        "n_layers": n_layers,
        "codewords_per_layer": per_layer,
        "n_samples": n_samples,
        "seed": seed,
        "codewords": codewords,
    }
