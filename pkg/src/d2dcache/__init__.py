"""Desk-scale simulator and analysis toolkit for D2D caching networks.

Users placed uniformly in a unit square cache and request Zipf-popular
files; nearby cache hits become device-to-device links, scheduled subject
to protocol-model interference. The package reproduces how the expected
number of simultaneously active links scales with the user count and the
library size.
"""

from .caching import (
    NetworkState,
    assign_caches_most_popular,
    assign_caches_zipf,
    assign_requests,
    sample_network_state,
)
from .experiment import (
    CSV_HEADER,
    ExperimentConfig,
    MonteCarloResult,
    ResolvedPoint,
    ScalingFit,
    TrialResult,
    config_from_mapping,
    fit_scaling,
    load_config,
    monte_carlo,
    parse_config_text,
    results_to_csv,
    run_trial,
    sweep,
)
from .geometry import (
    Adjacency,
    ClusterGrid,
    Placement,
    cluster_partition,
    neighbors,
    sample_placement,
)
from .linkplan import (
    ConflictGraph,
    PotentialLink,
    PotentialLinks,
    build_conflict_graph,
    enumerate_potential_links,
)
from .popularity import (
    PopularityModel,
    harmonic_sum,
    overlap_mass,
    sample_index,
    sample_indices,
    zipf_pmf,
)
from .scheduling import (
    GraphTooLargeError,
    Schedule,
    cluster_schedule,
    count_good_clusters,
    is_independent_set,
    mis_exact,
    mis_greedy,
)
from .theory import (
    HIGH_REUSE,
    LOW_REUSE,
    NoPositiveSolutionError,
    RegimeError,
    RegimeParams,
    ScalingPrediction,
    c1_floor,
    eta,
    optimal_gamma_c,
    optimal_radius,
    predicted_scaling,
    zeta_estimate,
)

__version__ = "0.1.0"
