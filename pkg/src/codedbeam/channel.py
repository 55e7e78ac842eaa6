"""Array-manifold math, LoS channel generation, and the noisy received-signal model.

Conventions: a ULA with half-wavelength spacing, spatial direction
phi = sin(theta) in [-1, 1], channel row vector h of length N, unit-norm
transmit beamformer w, received sample y = sqrt(P) * gamma * (h @ w) + n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SPEED_OF_LIGHT = 299_792_458.0


def steering_entries(phi: float, n_antennas: int) -> np.ndarray:
    """Unit-norm ULA steering entries (1/sqrt(N)) * exp(-j*pi*k*phi), k = 0..N-1."""
    if n_antennas < 1:
        raise ValueError(f"n_antennas must be >= 1, got {n_antennas}")
    if not -1.0 <= phi <= 1.0:
        raise ValueError(f"spatial direction must lie in [-1, 1], got {phi}")
    k = np.arange(n_antennas)
    return np.exp(-1j * np.pi * k * phi) / math.sqrt(n_antennas)


@dataclass(frozen=True)
class SteeringVector:
    """Steering vector at a spatial direction, entries of magnitude 1/sqrt(N)."""

    entries: np.ndarray
    spatial_direction: float

    @property
    def n_antennas(self) -> int:
        return self.entries.shape[0]


def steering_vector(phi: float, n_antennas: int) -> SteeringVector:
    """Build the array steering vector for spatial direction phi in [-1, 1]."""
    return SteeringVector(steering_entries(phi, n_antennas), float(phi))


@dataclass(frozen=True)
class ChannelRealization:
    """One multipath channel draw; row_vector = sqrt(N/L0) * sum_l beta_l * alpha(phi_l)."""

    gains: np.ndarray
    directions: np.ndarray
    n_paths: int
    row_vector: np.ndarray

    @property
    def n_antennas(self) -> int:
        return self.row_vector.shape[0]

    @property
    def los_direction(self) -> float:
        return float(self.directions[0])


def multipath_channel(gains, directions, n_antennas: int) -> ChannelRealization:
    """Assemble a Saleh-Valenzuela style channel from path gains and directions."""
    gains = np.asarray(gains, dtype=complex)
    directions = np.asarray(directions, dtype=float)
    if gains.shape != directions.shape or gains.ndim != 1 or gains.size < 1:
        raise ValueError("gains and directions must be equal-length 1-D sequences")
    n_paths = gains.size
    row = np.zeros(n_antennas, dtype=complex)
    for beta, phi in zip(gains, directions):
        row += beta * steering_entries(phi, n_antennas)
    row *= math.sqrt(n_antennas / n_paths)
    return ChannelRealization(gains, directions, n_paths, row)


def los_channel(beta: complex, phi: float, n_antennas: int) -> ChannelRealization:
    """Single-path (LoS) channel: h = sqrt(N) * beta * alpha(phi)."""
    return multipath_channel([beta], [phi], n_antennas)


def pathloss_gain(distance: float, carrier_frequency: float) -> float:
    """Large-scale amplitude factor lambda / (4 * pi * d)."""
    if distance <= 0.0:
        raise ValueError(f"distance must be positive, got {distance}")
    if carrier_frequency <= 0.0:
        raise ValueError(f"carrier frequency must be positive, got {carrier_frequency}")
    wavelength = SPEED_OF_LIGHT / carrier_frequency
    return wavelength / (4.0 * math.pi * distance)


@dataclass(frozen=True)
class LinkBudget:
    """Transmit power, receiver noise power and the large-scale amplitude gain.

    In normalized-SNR mode pathloss_gain is 1 and SNR means P / sigma^2 per
    antenna; in distance mode pathloss_gain = lambda / (4 pi d).
    """

    transmit_power: float
    noise_power: float
    pathloss_gain: float = 1.0
    carrier_frequency: float | None = None
    distance: float | None = None

    def __post_init__(self):
        if self.transmit_power <= 0.0:
            raise ValueError("transmit power must be strictly positive")
        if self.noise_power <= 0.0:
            raise ValueError("noise power must be strictly positive")

    @classmethod
    def from_snr_db(cls, snr_db: float) -> "LinkBudget":
        """Normalized budget with sigma^2 = 1 and P = 10^(snr_db/10)."""
        return cls(transmit_power=10.0 ** (snr_db / 10.0), noise_power=1.0)

    @classmethod
    def from_distance(
        cls,
        distance: float,
        carrier_frequency: float,
        transmit_power: float,
        noise_power: float,
    ) -> "LinkBudget":
        gamma = pathloss_gain(distance, carrier_frequency)
        return cls(
            transmit_power=transmit_power,
            noise_power=noise_power,
            pathloss_gain=gamma,
            carrier_frequency=carrier_frequency,
            distance=distance,
        )


def received_sample(
    channel: ChannelRealization,
    beamformer: np.ndarray,
    budget: LinkBudget,
    noise: complex = 0.0,
) -> complex:
    """One received pilot sample sqrt(P) * gamma * (h @ w) + n, with s0 = 1."""
    w = np.asarray(beamformer)
    if w.shape != channel.row_vector.shape:
        raise ValueError(
            f"beamformer length {w.shape} does not match channel {channel.row_vector.shape}"
        )
    amp = math.sqrt(budget.transmit_power) * budget.pathloss_gain
    return complex(amp * np.dot(channel.row_vector, w) + noise)


def received_power(sample: complex) -> float:
    """Squared magnitude of a received sample."""
    return abs(sample) ** 2


def draw_noise(rng: np.random.Generator, noise_power: float, size=None):
    """Circularly-symmetric complex Gaussian draw(s) with variance noise_power."""
    scale = math.sqrt(noise_power / 2.0)
    return rng.normal(scale=scale, size=size) + 1j * rng.normal(scale=scale, size=size)
