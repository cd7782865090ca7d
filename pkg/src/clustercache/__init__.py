"""Cluster-aware proactive caching for cache-enabled small-cell networks.

Pipeline: synthesize heterogeneous popularity profiles, cluster users by
request correlation with an information-criterion-selected cluster count,
split the SBS population across clusters with a closed-form concave
optimizer, and validate the analytic hit probability by Monte Carlo.
"""

from clustercache.geometry import PointSet, Region, points_within, sample_ppp
from clustercache.profiles import (
    NetworkConfig,
    PlantedScenario,
    PopularityProfile,
    as_matrix,
    cluster_top_m,
    generate_profiles,
    profiles_from_csv,
    profiles_to_csv,
)
from clustercache.clustering import (
    ClusterModel,
    adaptive_cluster,
    adjusted_rand_index,
    assign_users,
    iterate_to_convergence,
    split_worst_cluster,
    update_centroids,
)
from clustercache.model_selection import (
    ModelScore,
    aic,
    gaussian_log_likelihood,
    log_likelihood,
    select_model,
)
from clustercache.allocation import (
    Allocation,
    cluster_mass,
    coverage_exponent,
    hit_objective,
    numerical_oracle,
    optimize_fractions,
)
from clustercache.hitprob import (
    CachePlacement,
    HitReport,
    analytic_hit,
    analytic_hit_baseline,
    delta_overlap,
    monte_carlo_hit,
)
from clustercache.experiments import ExperimentSpec, run_pipeline, spec_from_config, sweep

__version__ = "0.1.0"
