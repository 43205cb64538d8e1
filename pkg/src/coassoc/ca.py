"""Co-association matrices, entropy-based cluster weighting, and thresholding.

Builds the plain co-association (CA) matrix, its entropy-weighted variants
(ECI weighting as in locally weighted evidence accumulation, and the
normalized-ensemble-entropy weighting that accounts for how finely a base
clustering partitions the data), and the thresholded similarity and
high-confidence matrices consumed by the solver.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import EnsemblePool, SymMatrix
from .errors import ConfigError

WEIGHTING_METHODS = ("uniform", "eci", "nee")


def membership_matrix(pool: EnsemblePool) -> np.ndarray:
    """(n, N_c) 0/1 matrix: sample i belongs to global cluster g."""
    z = np.zeros((pool.n, pool.total_clusters))
    rows = np.arange(pool.n)
    for glob in pool.global_labels():
        z[rows, glob] = 1.0
    return z


def cluster_sizes(pool: EnsemblePool) -> np.ndarray:
    """Member count of every global cluster."""
    sizes = np.zeros(pool.total_clusters, dtype=np.int64)
    for glob in pool.global_labels():
        np.add.at(sizes, glob, 1)
    return sizes


def cluster_entropies(pool: EnsemblePool) -> np.ndarray:
    """Ensemble entropy of every global cluster, in bits.

    For cluster C_i the entropy is -sum_j p(C_i,C_j) log2 p(C_i,C_j) over
    all N_c clusters in the ensemble, with p(C_i,C_j) = |C_i ∩ C_j| / |C_i|
    and 0 log 0 = 0.
    """
    z = membership_matrix(pool)
    overlap = z.T @ z
    sizes = overlap.diagonal()
    p = overlap / sizes[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(p > 0.0, p * np.log2(np.where(p > 0.0, p, 1.0)), 0.0)
    return -terms.sum(axis=1)


def cluster_entropy(pool: EnsemblePool, c: int) -> float:
    """Ensemble entropy of global cluster ``c``."""
    if not 0 <= c < pool.total_clusters:
        raise IndexError(f"cluster index {c} out of range [0, {pool.total_clusters})")
    return float(cluster_entropies(pool)[c])


def _own_partition_sizes(pool: EnsemblePool) -> np.ndarray:
    """Cluster count of the partition that owns each global cluster."""
    return np.repeat(
        [p.n_clusters for p in pool.partitions],
        [p.n_clusters for p in pool.partitions],
    ).astype(np.float64)


def normalized_entropies(pool: EnsemblePool) -> np.ndarray:
    """Ensemble entropy of each cluster divided by log2 of the cluster
    count of its own partition.

    A partition with a single cluster gives a zero denominator; such a
    cluster is the whole sample set and gets entropy 0 by convention.
    """
    h = cluster_entropies(pool)
    k_own = _own_partition_sizes(pool)
    out = np.zeros_like(h)
    nontrivial = k_own > 1
    out[nontrivial] = h[nontrivial] / np.log2(k_own[nontrivial])
    return out


def normalized_entropy(pool: EnsemblePool, c: int) -> float:
    """Normalized ensemble entropy of global cluster ``c``."""
    if not 0 <= c < pool.total_clusters:
        raise IndexError(f"cluster index {c} out of range [0, {pool.total_clusters})")
    return float(normalized_entropies(pool)[c])


@dataclass(frozen=True)
class ClusterWeighting:
    """Per-global-cluster weights in (0, 1] plus the method that made them."""

    weights: np.ndarray
    method: str
    lam: float

    def __post_init__(self):
        weights = np.ascontiguousarray(self.weights, dtype=np.float64)
        weights.setflags(write=False)
        object.__setattr__(self, "weights", weights)
        if self.method not in WEIGHTING_METHODS:
            raise ConfigError(f"unknown weighting method {self.method!r}")
        if weights.min(initial=1.0) <= 0.0 or weights.max(initial=1.0) > 1.0:
            raise ConfigError("cluster weights must lie in (0, 1]")
        if self.method == "uniform" and not np.all(weights == 1.0):
            raise ConfigError("uniform weighting must assign exactly 1.0 everywhere")


def cluster_weights(pool: EnsemblePool, method: str, lam: float = 0.08) -> ClusterWeighting:
    """Weight each global cluster by exp(-uncertainty / (lam * M)).

    ``nee`` uses the normalized ensemble entropy, ``eci`` the raw ensemble
    entropy, and ``uniform`` assigns 1.0 to every cluster (plain evidence
    accumulation).
    """
    if method not in WEIGHTING_METHODS:
        raise ConfigError(f"unknown weighting method {method!r}")
    if lam <= 0.0:
        raise ConfigError(f"lambda must be positive, got {lam}")
    if method == "uniform":
        weights = np.ones(pool.total_clusters)
    else:
        uncertainty = (
            normalized_entropies(pool) if method == "nee" else cluster_entropies(pool)
        )
        weights = np.exp(-uncertainty / (lam * pool.m))
    return ClusterWeighting(weights=weights, method=method, lam=lam)


def build_ca(pool: EnsemblePool) -> SymMatrix:
    """Co-association matrix: fraction of base clusterings that co-cluster
    each sample pair. Diagonal is 1, entries lie in {0, 1/M, ..., 1}."""
    acc = np.zeros((pool.n, pool.n))
    for part in pool.partitions:
        labels = part.labels
        acc += labels[:, None] == labels[None, :]
    return SymMatrix.from_dense(acc / pool.m)


def build_weighted_ca(pool: EnsemblePool, weighting: ClusterWeighting) -> SymMatrix:
    """Co-association matrix with each co-occurrence scaled by the weight
    of the hosting cluster; uniform weights reproduce :func:`build_ca`."""
    if weighting.weights.shape[0] != pool.total_clusters:
        raise ConfigError(
            f"weighting covers {weighting.weights.shape[0]} clusters, "
            f"pool has {pool.total_clusters}"
        )
    acc = np.zeros((pool.n, pool.n))
    for part, glob in zip(pool.partitions, pool.global_labels()):
        labels = part.labels
        eq = labels[:, None] == labels[None, :]
        acc += eq * weighting.weights[glob][:, None]
    return SymMatrix.from_dense(acc / pool.m, atol=1e-12)


def extract_similarity(nwca: SymMatrix, eta: float) -> SymMatrix:
    """Keep entries strictly above ``eta``; everything else becomes 0."""
    if not 0.0 < eta < 1.0:
        raise ConfigError(f"eta must lie in (0, 1), got {eta}")
    dense = nwca.to_dense()
    return SymMatrix.from_dense(np.where(dense > eta, dense, 0.0))


def extract_high_confidence(ca: SymMatrix, theta: float) -> SymMatrix:
    """Keep entries at or above ``theta`` (non-strict, unlike the
    similarity threshold); applied to the unweighted CA matrix."""
    if not 0.0 < theta < 1.0:
        raise ConfigError(f"theta must lie in (0, 1), got {theta}")
    dense = ca.to_dense()
    return SymMatrix.from_dense(np.where(dense >= theta, dense, 0.0))


def laplacian(h: SymMatrix) -> np.ndarray:
    """Graph Laplacian diag(H 1) - H of a nonnegative symmetric matrix.

    Row sums are exactly zero and the result is positive semidefinite.
    """
    dense = h.to_dense()
    if dense.min(initial=0.0) < 0.0:
        raise ConfigError("high-confidence matrix must be nonnegative")
    return np.diag(dense.sum(axis=1)) - dense
