"""Recovery of block-constant binary matrices from erased and bit-flipped
observations: generation, channel simulation, clustering, majority decoding,
exact error probabilities, analytic bounds, and a seeded experiment harness.
"""

from .model import (
    ERASED,
    ONE,
    ZERO,
    BlockConstantMatrix,
    ChannelParams,
    GenerationLaw,
    ObservedMatrix,
    Partition,
    TiePolicy,
    canonicalize_labels,
    validate_partition,
)
from .generator import (
    cluster_merge_prob_bound,
    cluster_merge_prob_bound_loose,
    effective_partition,
    is_degenerate,
    sample_block_matrix,
)
from .channel import transmit
from .decoder import (
    cluster_correct_prob,
    correct_prob_given_samples,
    exact_error_prob,
    majority_decode,
)
from .bounds import (
    BoundsReport,
    BoundValue,
    ClusterSizeHistogram,
    any_cluster_error_prob,
    binary_entropy,
    bounds_report,
    decoding_error_bounds,
    diff_cluster_error_bound,
    distance_profile,
    effective_flip_rate,
    exponential_error_bounds,
    extremal_size_error_bounds,
    few_disagreements_bound,
    fixed_matrix_cluster_threshold,
    recovery_size_thresholds,
    same_cluster_error_bound,
)
from .clusterer import (
    cluster_axis,
    cluster_pipeline,
    pairwise_decisions,
    pairwise_distance,
    pairwise_error_count,
    partition_match,
)
from .experiment import (
    ErrorEstimate,
    ExperimentConfig,
    Mode,
    TrialResult,
    estimate_error_rates,
    run_trial,
    sweep,
    wilson_interval,
)

__version__ = "0.1.0"
