"""Ensemble clustering via similarity/dissimilarity guided co-association
matrix refinement: entropy-weighted co-association evidence, random-walk
dissimilarity, an adversarial ADMM refinement, and agglomerative
consensus, with an experiment harness and CLI."""

from .basegen import KMeansConfig, derive_seed, generate_pool, kmeans, sample_ensemble
from .ca import (
    ClusterWeighting,
    build_ca,
    build_weighted_ca,
    cluster_entropy,
    cluster_weights,
    extract_high_confidence,
    extract_similarity,
    laplacian,
    normalized_entropy,
)
from .core import (
    Dataset,
    EnsemblePool,
    Partition,
    SymMatrix,
    global_cluster_index,
    load_dataset,
    load_pool,
    save_pool,
)
from .dissim import (
    ClusterGraph,
    build_cluster_graph,
    build_dissimilarity,
    cluster_similarity,
    high_order_proximity,
    jaccard_proximity,
    transition_matrix,
)
from .errors import (
    CoassocError,
    ConfigError,
    DimensionError,
    FormatError,
    MalformedInputError,
    NumericError,
)
from .metrics import ari, cluster_precision_profile, nmi, pairwise_f
from .pipeline import RunConfig, RunReport, emit_report, run_ablation, run_pipeline, run_sweep
from .refine import ConsensusResult, agglomerate, refine_adjacency
from .solver import SolverConfig, SolverState, SolverTrace, solve

__version__ = "0.1.0"
