"""Command-line front end: synthesize codebooks, run simulations and sweeps."""

from __future__ import annotations

import argparse
import dataclasses
import sys

import numpy as np

from . import harness
from .harness import ConfigError, ExperimentConfig, parse_config_text
from .patterns import conv_pattern, coverage_set, hamming_pattern
from .protocols import build_library
from .synthesis import save_codebook


def _add_common_sim_args(parser: argparse.ArgumentParser):
    parser.add_argument("--antennas", type=int, default=128, help="array size (power of two)")
    parser.add_argument("--trials", type=int, default=1000)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--llr", choices=["chi-squared", "gaussian"], default="chi-squared")
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--out", required=True, help="output CSV path")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="codedbeam",
        description="Coded beam training link-level simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_syn = sub.add_parser("synthesize", help="build and serialize a coded codebook")
    p_syn.add_argument("--antennas", type=int, required=True)
    p_syn.add_argument("--code", choices=["hamming", "conv"], required=True)
    p_syn.add_argument("--seed", type=int, default=7)
    p_syn.add_argument("--out", required=True)

    p_sim = sub.add_parser("simulate", help="run one experiment")
    p_sim.add_argument("--config", help="flat key = value config file")
    p_sim.add_argument("--scheme", help="scheme name (flag mode)")
    p_sim.add_argument("--snr-db", type=float, help="operating SNR in dB (flag mode)")
    p_sim.add_argument("--antennas", type=int, default=128)
    p_sim.add_argument("--trials", type=int, default=1000)
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--llr", choices=["chi-squared", "gaussian"], default="chi-squared")
    p_sim.add_argument("--workers", type=int, default=1)
    p_sim.add_argument("--out", help="output CSV path (overrides config file)")

    p_sweep = sub.add_parser("sweep", help="grid sweep over SNR or distance")
    p_sweep.add_argument("--schemes", default="exhaustive,hierarchical,coded-fixed,coded-adaptive")
    p_sweep.add_argument("--snr-from", type=float)
    p_sweep.add_argument("--snr-to", type=float)
    p_sweep.add_argument("--snr-step", type=float)
    p_sweep.add_argument("--dist-from", type=float)
    p_sweep.add_argument("--dist-to", type=float)
    p_sweep.add_argument("--dist-step", type=float)
    _add_common_sim_args(p_sweep)

    p_abl = sub.add_parser("ablate-decoder", help="chi2 vs Gaussian vs ML decoding")
    p_abl.add_argument("--snr-from", type=float, default=-5.0)
    p_abl.add_argument("--snr-to", type=float, default=0.0)
    p_abl.add_argument("--snr-step", type=float, default=1.0)
    _add_common_sim_args(p_abl)
    return parser


def _grid(start: float, stop: float, step: float) -> tuple:
    if step <= 0:
        raise ConfigError("grid step must be positive")
    if stop < start:
        raise ConfigError("grid end must not precede its start")
    count = int(round((stop - start) / step)) + 1
    return tuple(start + i * step for i in range(count))


def _cmd_synthesize(args) -> int:
    library = build_library(args.antennas, seed=args.seed)
    if args.code == "hamming":
        if args.antennas != 16:
            raise ConfigError("the hamming codebook is defined for --antennas 16")
        pattern = hamming_pattern()
        per_layer = 2
        coverages = [
            coverage_set(pattern, layer, slot)
            for layer in range(1, pattern.n_layers + 1)
            for slot in (1, 2)
        ]
    else:
        levels = int(np.log2(args.antennas)) - 1
        if 2 ** (levels + 1) != args.antennas or levels < 1:
            raise ConfigError("--antennas must be a power of two >= 4 for conv")
        pattern = conv_pattern(levels)
        per_layer = 1
        coverages = [
            coverage_set(pattern, layer) for layer in range(1, pattern.n_layers + 1)
        ]
    codewords = np.vstack([library.codeword_for(cov) for cov in coverages])
    save_codebook(args.out, codewords, per_layer, library.manifold.n_samples, args.seed)
    print(f"wrote {codewords.shape[0]} codewords for {args.antennas} antennas to {args.out}")
    return 0


def _cmd_simulate(args) -> int:
    if args.config:
        with open(args.config) as fh:
            config = parse_config_text(fh.read())
        if args.out:
            config = dataclasses.replace(config, output=args.out)
    else:
        if not args.scheme or args.snr_db is None or not args.out:
            raise ConfigError("flag mode requires --scheme, --snr-db and --out")
        config = ExperimentConfig(
            n_antennas=args.antennas,
            schemes=(args.scheme,),
            snr_grid_db=(args.snr_db,),
            n_trials=args.trials,
            seed=args.seed,
            llr_kind=args.llr,
            output=args.out,
        )
    rows = harness.run_experiment(config, workers=args.workers)
    for row in rows:
        print(row.as_csv())
    return 0


def _cmd_sweep(args) -> int:
    snr_mode = args.snr_from is not None
    dist_mode = args.dist_from is not None
    if snr_mode == dist_mode:
        raise ConfigError("provide either --snr-from/--snr-to/--snr-step or --dist-*")
    if snr_mode:
        if args.snr_to is None or args.snr_step is None:
            raise ConfigError("--snr-from needs --snr-to and --snr-step")
        grid_kwargs = {"snr_grid_db": _grid(args.snr_from, args.snr_to, args.snr_step)}
    else:
        if args.dist_to is None or args.dist_step is None:
            raise ConfigError("--dist-from needs --dist-to and --dist-step")
        grid_kwargs = {
            "distance_grid_m": _grid(args.dist_from, args.dist_to, args.dist_step)
        }
    config = ExperimentConfig(
        n_antennas=args.antennas,
        schemes=tuple(s.strip() for s in args.schemes.split(",") if s.strip()),
        n_trials=args.trials,
        seed=args.seed,
        llr_kind=args.llr,
        output=args.out,
        **grid_kwargs,
    )
    harness.run_experiment(config, workers=args.workers)
    print(f"wrote sweep results to {args.out}")
    return 0


def _cmd_ablate(args) -> int:
    config = ExperimentConfig(
        n_antennas=args.antennas,
        schemes=("coded-fixed",),
        snr_grid_db=_grid(args.snr_from, args.snr_to, args.snr_step),
        n_trials=args.trials,
        seed=args.seed,
        llr_kind=args.llr,
        output=args.out,
    )
    harness.decoder_ablation(config, workers=args.workers)
    print(f"wrote decoder ablation to {args.out}")
    return 0


_COMMANDS = {
    "synthesize": _cmd_synthesize,
    "simulate": _cmd_simulate,
    "sweep": _cmd_sweep,
    "ablate-decoder": _cmd_ablate,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, OSError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
