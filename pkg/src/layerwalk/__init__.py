"""layerwalk: node feature learning on multilayer networks.

The pipeline aggregates the layers of a multilayer network into a single
r-adjusted matrix, samples biased second-order random walks on it, and
trains skip-gram with negative sampling on the resulting neighborhoods.
Also included: closed-form co-occurrence limits for the walk process,
synthetic multilayer generators, and embedding evaluation utilities.
"""

from .graph import (
    EXPLICIT_COUPLING,
    IDENTITY_COUPLING,
    AdjustedAggregate,
    MultilayerNetwork,
    NetworkFormatError,
    adjusted_aggregate,
    build_network,
    degree,
    volume,
)
from .walks import NeighborhoodCorpus, WalkConfig, generate_corpus, sample_walk, transition_bias
from .skipgram import EmbeddingModel, SkipGramConfig, exact_log_likelihood, train
from .generators import (
    Partition,
    PlantedPartitionSpec,
    add_noise_layers,
    gen_multilayer_er,
    gen_planted_partition,
)

__version__ = "0.1.0"

__all__ = [
    "AdjustedAggregate",
    "EmbeddingModel",
    "EXPLICIT_COUPLING",
    "IDENTITY_COUPLING",
    "MultilayerNetwork",
    "NeighborhoodCorpus",
    "NetworkFormatError",
    "Partition",
    "PlantedPartitionSpec",
    "SkipGramConfig",
    "WalkConfig",
    "add_noise_layers",
    "adjusted_aggregate",
    "build_network",
    "degree",
    "exact_log_likelihood",
    "gen_multilayer_er",
    "gen_planted_partition",
    "generate_corpus",
    "sample_walk",
    "train",
    "transition_bias",
    "volume",
]
