"""Coded beam training: channel-code-protected hierarchical beam training.

Library + CLI for simulating mmWave/THz beam training where the layer
sequence of training beams forms a channel code, decoded from received
powers via syndrome correction (Hamming) or chi-squared-LLR Viterbi
decoding (convolutional), with optional adaptive beam re-encoding.
"""

from .channel import (
    ChannelRealization,
    LinkBudget,
    SteeringVector,
    los_channel,
    multipath_channel,
    pathloss_gain,
    received_power,
    received_sample,
    steering_vector,
)
from .codes import (
    HAMMING_G,
    HAMMING_H,
    TrellisState,
    chi2_llr,
    conv_encode,
    gaussian_llr,
    hamming_correct,
    hamming_encode,
    log_bessel_i0,
    ml_decode,
    viterbi_decode,
    viterbi_step,
)
from .harness import (
    ExperimentConfig,
    MetricsRow,
    decoder_ablation,
    distance_sweep,
    run_experiment,
)
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
from .protocols import (
    TrainingOutcome,
    binary_hierarchical,
    coded_training,
    exhaustive_sweep,
    hamming_training,
    overhead,
)
from .synthesis import (
    BeamLibrary,
    GainSpec,
    ManifoldMatrix,
    beam_gain_profile,
    desired_gain,
    dft_codebook,
    gs_design,
    load_codebook,
    save_codebook,
)

__version__ = "0.1.0"
