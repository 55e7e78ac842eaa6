"""Monte Carlo experiment driver: configs, per-trial seeding, metrics, CSV.

Every trial derives its random streams from (master seed, stream tag, point
index, trial index), so channel draws are common across schemes at a given
operating point, outputs are reproducible bit-for-bit, and the result does
not depend on how trials are distributed over workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .channel import LinkBudget, draw_noise, los_channel, received_sample
from .codes import chi2_llr, gaussian_llr, ml_decode, viterbi_decode
from .patterns import bintodec
from .protocols import (
    SCHEMES,
    build_conv_codebook,
    build_hamming_codebook,
    build_hierarchical_codebook,
    binary_hierarchical,
    coded_training,
    exhaustive_sweep,
    hamming_training,
    layer_amplitude,
    overhead,
    true_segment,
)
from .synthesis import dft_codebook

# Stable noise-stream tags; tag 0 is reserved for the channel draw so that
# all schemes see identical channels at a given (point, trial).
_CHANNEL_TAG = 0
_SCHEME_TAGS = {
    "exhaustive": 1,
    "hierarchical": 2,
    "coded-fixed": 3,
    "coded-adaptive": 4,
    "hamming": 5,
    "ablation": 6,
}

CSV_HEADER = (
    "scheme,point_kind,point_value,n_trials,successes,success_rate,"
    "mean_rate,se_rate,slots,feedback_slots"
)


class ConfigError(ValueError):
    """Invalid experiment configuration; raised before any trial runs."""


@dataclass(frozen=True)
class ExperimentConfig:
    n_antennas: int = 128
    schemes: tuple = ("exhaustive", "hierarchical", "coded-fixed", "coded-adaptive")
    snr_grid_db: tuple | None = None
    distance_grid_m: tuple | None = None
    n_trials: int = 1000
    seed: int = 0
    llr_kind: str = "chi-squared"
    carrier_frequency: float = 3.5e9
    transmit_power: float = 10.0  # 40 dBm
    noise_power: float = 1e-14  # -110 dBm
    bandwidth: float = 50e6  # carried for fidelity; inert in the narrowband model
    n_subcarriers: int = 1024  # likewise inert
    output: str | None = None


@dataclass(frozen=True)
class MetricsRow:
    scheme: str
    point_kind: str
    point_value: float
    n_trials: int
    successes: int
    success_rate: float
    mean_rate: float
    se_rate: float
    slots: int
    feedback_slots: int

    def as_csv(self) -> str:
        return ",".join(
            [
                self.scheme,
                self.point_kind,
                repr(float(self.point_value)),
                str(self.n_trials),
                str(self.successes),
                repr(float(self.success_rate)),
                repr(float(self.mean_rate)),
                repr(float(self.se_rate)),
                str(self.slots),
                str(self.feedback_slots),
            ]
        )


def rows_to_csv(rows) -> str:
    return "\n".join([CSV_HEADER] + [row.as_csv() for row in rows]) + "\n"


def write_rows(rows, path) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(rows_to_csv(rows))


def validate_config(config: ExperimentConfig) -> tuple[str, tuple]:
    """Check a config and return (point_kind, grid); raises ConfigError."""
    n = config.n_antennas
    if n < 2 or 2 ** int(math.log2(n)) != n:
        raise ConfigError(f"n_antennas must be a power of two >= 2, got {n}")
    if config.n_trials < 1:
        raise ConfigError("n_trials must be >= 1")
    if not config.schemes:
        raise ConfigError("at least one scheme is required")
    for scheme in config.schemes:
        if scheme not in SCHEMES:
            raise ConfigError(f"unknown scheme {scheme!r}; valid: {SCHEMES}")
        if scheme == "hamming" and n != 16:
            raise ConfigError("the hamming scheme is defined for 16 antennas only")
        if scheme in ("coded-fixed", "coded-adaptive") and n < 4:
            raise ConfigError("coded schemes need at least 4 antennas")
    if config.llr_kind not in ("chi-squared", "gaussian"):
        raise ConfigError(f"unknown llr_kind {config.llr_kind!r}")
    has_snr = config.snr_grid_db is not None
    has_dist = config.distance_grid_m is not None
    if has_snr == has_dist:
        raise ConfigError("exactly one of snr_grid_db / distance_grid_m must be set")
    if has_snr:
        grid = tuple(float(v) for v in config.snr_grid_db)
        kind = "snr_db"
    else:
        grid = tuple(float(v) for v in config.distance_grid_m)
        kind = "distance_m"
        if any(d <= 0 for d in grid):
            raise ConfigError("distances must be positive")
    if not grid:
        raise ConfigError("operating-point grid is empty")
    if config.transmit_power <= 0 or config.noise_power <= 0:
        raise ConfigError("powers must be strictly positive")
    return kind, grid


def _budget_for(config: ExperimentConfig, kind: str, value: float) -> LinkBudget:
    if kind == "snr_db":
        return LinkBudget.from_snr_db(value)
    return LinkBudget.from_distance(
        value, config.carrier_frequency, config.transmit_power, config.noise_power
    )


def _rng(seed: int, tag: int, point_idx: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, tag, point_idx, trial]))


def _draw_channel(config: ExperimentConfig, point_idx: int, trial: int):
    rng = _rng(config.seed, _CHANNEL_TAG, point_idx, trial)
    phase = rng.uniform(0.0, 2.0 * math.pi)
    phi = rng.uniform(-1.0, 1.0)
    return los_channel(complex(math.cos(phase), math.sin(phase)), phi, config.n_antennas)


def _achievable_rate(channel, budget: LinkBudget, beamformer) -> float:
    gain = received_sample(channel, beamformer, budget, 0.0)
    return math.log2(1.0 + abs(gain) ** 2 / budget.noise_power)


def _scheme_runner(scheme: str, config: ExperimentConfig):
    if scheme == "exhaustive":
        codebook = dft_codebook(config.n_antennas)
        return lambda ch, budget, rng: exhaustive_sweep(ch, budget, rng, codebook)
    if scheme == "hierarchical":
        codebook = build_hierarchical_codebook(config.n_antennas)
        return lambda ch, budget, rng: binary_hierarchical(ch, budget, codebook, rng)
    if scheme == "hamming":
        codebook = build_hamming_codebook()
        return lambda ch, budget, rng: hamming_training(ch, budget, codebook, rng)
    mode = "fixed" if scheme == "coded-fixed" else "adaptive"
    codebook = build_conv_codebook(config.n_antennas)
    return lambda ch, budget, rng: coded_training(
        ch, budget, codebook, rng, mode=mode, llr_kind=config.llr_kind
    )


def _run_point(config: ExperimentConfig, scheme: str, kind: str, point_idx: int, value: float) -> MetricsRow:
    budget = _budget_for(config, kind, value)
    runner = _scheme_runner(scheme, config)
    tag = _SCHEME_TAGS[scheme]
    expected = (14, 7) if scheme == "hamming" else overhead(scheme, config.n_antennas)
    successes = 0
    rate_sum = 0.0
    for trial in range(config.n_trials):
        channel = _draw_channel(config, point_idx, trial)
        rng = _rng(config.seed, tag, point_idx, trial)
        outcome = runner(channel, budget, rng)
        if (outcome.slots_used, outcome.feedback_slots) != expected:
            raise AssertionError(
                f"slot accounting {outcome.slots_used, outcome.feedback_slots} "
                f"!= overhead table {expected} for {scheme}"
            )
        successes += int(outcome.success)
        rate_sum += _achievable_rate(channel, budget, outcome.beamformer)
    p = successes / config.n_trials
    se = math.sqrt(p * (1.0 - p) / config.n_trials)
    return MetricsRow(
        scheme=scheme,
        point_kind=kind,
        point_value=value,
        n_trials=config.n_trials,
        successes=successes,
        success_rate=p,
        mean_rate=rate_sum / config.n_trials,
        se_rate=se,
        slots=expected[0],
        feedback_slots=expected[1],
    )


def _point_task(args):
    return _run_point(*args)


def run_experiment(config: ExperimentConfig, workers: int = 1) -> list[MetricsRow]:
    """Run all (scheme, operating point) cells and optionally write the CSV."""
    kind, grid = validate_config(config)
    tasks = [
        (config, scheme, kind, point_idx, value)
        for scheme in config.schemes
        for point_idx, value in enumerate(grid)
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_point_task, tasks))
    else:
        rows = [_point_task(t) for t in tasks]
    if config.output:
        write_rows(rows, config.output)
    return rows


def distance_sweep(config: ExperimentConfig, workers: int = 1) -> list[MetricsRow]:
    """run_experiment restricted to pathloss (distance-grid) mode."""
    if config.distance_grid_m is None:
        raise ConfigError("distance_sweep requires distance_grid_m")
    return run_experiment(config, workers=workers)


# ---------------------------------------------------------------------------
# Decoder ablation: chi-squared Viterbi vs Gaussian Viterbi vs the ML bound,
# decoding the same measured power sequences.
# ---------------------------------------------------------------------------

ABLATION_SCHEMES = ("coded-chi2", "coded-gaussian", "coded-ml")


def _ablation_point(config: ExperimentConfig, kind: str, point_idx: int, value: float):
    budget = _budget_for(config, kind, value)
    codebook = build_conv_codebook(config.n_antennas)
    n = config.n_antennas
    sigma2 = budget.noise_power
    coverages = codebook.base_coverages
    beams = [codebook.beam(cov) for cov in coverages]
    amps = np.array([layer_amplitude(budget, cov) for cov in coverages])
    masks = codebook.pattern.masks[:, 0, :]
    tag = _SCHEME_TAGS["ablation"]

    successes = {name: 0 for name in ABLATION_SCHEMES}
    rate_sums = {name: 0.0 for name in ABLATION_SCHEMES}
    for trial in range(config.n_trials):
        channel = _draw_channel(config, point_idx, trial)
        rng = _rng(config.seed, tag, point_idx, trial)
        powers = np.array(
            [
                abs(received_sample(channel, w, budget, draw_noise(rng, sigma2))) ** 2
                for w in beams
            ]
        )
        bottom_noise = draw_noise(rng, sigma2, size=2)

        chi_llrs = np.array(
            [chi2_llr(powers[l], amps[l], sigma2) for l in range(len(beams))]
        )
        gauss_llrs = np.array(
            [gaussian_llr(powers[l], amps[l], sigma2) for l in range(len(beams))]
        )
        decisions = {
            "coded-chi2": bintodec(viterbi_decode(chi_llrs)),
            "coded-gaussian": bintodec(viterbi_decode(gauss_llrs)),
            "coded-ml": ml_decode(powers, masks, amps, sigma2),
        }
        seg_true = true_segment(channel.los_direction, n)
        for name, t_index in decisions.items():
            pair = (2 * t_index, 2 * t_index + 1)
            p_pair = [
                abs(
                    received_sample(
                        channel, codebook.bottom_codeword(idx), budget, bottom_noise[i]
                    )
                )
                ** 2
                for i, idx in enumerate(pair)
            ]
            chosen = pair[1] if p_pair[1] > p_pair[0] else pair[0]
            successes[name] += int(chosen == seg_true)
            rate_sums[name] += _achievable_rate(
                channel, budget, codebook.bottom_codeword(chosen)
            )

    rows = []
    slots, feedback = overhead("coded-fixed", n)
    for name in ABLATION_SCHEMES:
        p = successes[name] / config.n_trials
        rows.append(
            MetricsRow(
                scheme=name,
                point_kind=kind,
                point_value=value,
                n_trials=config.n_trials,
                successes=successes[name],
                success_rate=p,
                mean_rate=rate_sums[name] / config.n_trials,
                se_rate=math.sqrt(p * (1.0 - p) / config.n_trials),
                slots=slots,
                feedback_slots=feedback,
            )
        )
    return rows


def decoder_ablation(config: ExperimentConfig, workers: int = 1) -> list[MetricsRow]:
    """Three curves from shared measurements: chi2 Viterbi, Gaussian Viterbi, ML."""
    probe = replace(config, schemes=("coded-fixed",))
    kind, grid = validate_config(probe)
    tasks = [(probe, kind, idx, value) for idx, value in enumerate(grid)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            per_point = list(pool.map(_ablation_task, tasks))
    else:
        per_point = [_ablation_task(t) for t in tasks]
    # Regroup scheme-major to match run_experiment's row order.
    rows = []
    for s, name in enumerate(ABLATION_SCHEMES):
        for point_rows in per_point:
            rows.append(point_rows[s])
    if config.output:
        write_rows(rows, config.output)
    return rows


def _ablation_task(args):
    return _ablation_point(*args)


# ---------------------------------------------------------------------------
# Flat key = value config files
# ---------------------------------------------------------------------------

_LIST_FIELDS = {"schemes", "snr_grid_db", "distance_grid_m"}
_INT_FIELDS = {"n_antennas", "n_trials", "seed", "n_subcarriers"}
_FLOAT_FIELDS = {"carrier_frequency", "transmit_power", "noise_power", "bandwidth"}


def parse_config_text(text: str) -> ExperimentConfig:
    """Parse flat `key = value` lines into an ExperimentConfig.

    Lists are comma-separated; blank lines and '#' comments are ignored.
    """
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key not in ExperimentConfig.__dataclass_fields__:
            raise ConfigError(f"line {lineno}: unknown config key {key!r}")
        try:
            if key in _LIST_FIELDS:
                items = [v.strip() for v in val.split(",") if v.strip()]
                if key == "schemes":
                    values[key] = tuple(items)
                else:
                    values[key] = tuple(float(v) for v in items)
            elif key in _INT_FIELDS:
                values[key] = int(val)
            elif key in _FLOAT_FIELDS:
                values[key] = float(val)
            else:
                values[key] = val
        except ValueError as err:
            raise ConfigError(f"line {lineno}: bad value for {key}: {val!r}") from err
    return ExperimentConfig(**values)
