"""ORBGRAND-AI decoding for correlated (Gauss-Markov) channels."""

from .channel import (
    BlockCovariance,
    GaussMarkovChannel,
    block_covariance,
    block_entropy_rate,
    demap_bpsk,
    ebno_to_sigma,
    entropy_rate,
    gm_noise,
    modulate_bpsk,
    transmit,
)
from .codes import LinearCode, crc_new, encode, is_codeword, rlc_new
from .decoder import (
    CandidateTable,
    DecodeResult,
    DecodeStatus,
    OrbgrandAIDecoder,
    build_candidate_table,
    decode,
)
from .harness import BlerPoint, ExperimentConfig, rate_search, run_bler
from .orbgrand_core import Pattern, PatternEnumerator, rank_sort

__version__ = "0.1.0"
