"""Dissimilarity evidence for sample pairs that are never co-clustered.

Clusters are related through a random walk over their Jaccard-overlap
graph: the walk's accumulated high-order proximity profiles are compared
by cosine similarity, and a pair of samples whose host clusters stay
mutually distant in every base clustering earns a high dissimilarity
score. Pairs with any direct co-association evidence are left at zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ca import cluster_sizes, membership_matrix
from .core import EnsemblePool, SymMatrix
from .errors import ConfigError, NumericError

DEFAULT_BETA = 1.0
DEFAULT_WALK_STEPS = 20


def jaccard_proximity(pool: EnsemblePool) -> np.ndarray:
    """Jaccard overlap |C_i ∩ C_j| / |C_i ∪ C_j| between all global
    cluster pairs; symmetric with unit diagonal."""
    z = membership_matrix(pool)
    overlap = z.T @ z
    sizes = cluster_sizes(pool).astype(np.float64)
    union = sizes[:, None] + sizes[None, :] - overlap
    return overlap / union


def transition_matrix(p: np.ndarray) -> np.ndarray:
    """Row-normalize a nonnegative proximity matrix into a random-walk
    transition matrix."""
    p = np.asarray(p, dtype=np.float64)
    degree = p.sum(axis=1)
    if np.any(degree <= 0.0):
        raise NumericError("proximity matrix has a zero-degree row")
    return p / degree[:, None]


def high_order_proximity(
    pt: np.ndarray,
    beta: float = DEFAULT_BETA,
    k_steps: int = DEFAULT_WALK_STEPS,
    symmetric_powers: bool = False,
) -> np.ndarray:
    """Accumulated walk proximity sum_t beta^t (P^t)^T P for t = 1..k.

    ``symmetric_powers`` switches the per-step term to (P^t)^T (P^t), an
    alternative reading kept for sensitivity checks. Powers are built by
    repeated multiplication with the running product.
    """
    if not 0.0 <= beta <= 1.0:
        raise ConfigError(f"beta must lie in [0, 1], got {beta}")
    if k_steps < 1:
        raise ConfigError(f"walk length must be >= 1, got {k_steps}")
    pt = np.asarray(pt, dtype=np.float64)
    if symmetric_powers:
        acc = np.zeros_like(pt)
        power = np.eye(pt.shape[0])
        for t in range(1, k_steps + 1):
            power = power @ pt
            acc += beta**t * (power.T @ power)
        return acc
    acc = np.zeros_like(pt)
    power_t = np.eye(pt.shape[0])
    for t in range(1, k_steps + 1):
        power_t = power_t @ pt.T
        acc += beta**t * power_t
    return acc @ pt


def cluster_similarity(o: np.ndarray, pool: EnsemblePool) -> np.ndarray:
    """Cosine similarity between walk-profile columns, masked to cluster
    pairs living in the same base clustering.

    A zero column has cosine 0 by convention; cross-partition pairs are 0
    regardless of their profiles.
    """
    o = np.asarray(o, dtype=np.float64)
    if o.shape != (pool.total_clusters, pool.total_clusters):
        raise ConfigError(
            f"walk matrix has shape {o.shape}, pool needs "
            f"({pool.total_clusters}, {pool.total_clusters})"
        )
    norms = np.linalg.norm(o, axis=0)
    safe = np.where(norms > 0.0, norms, 1.0)
    unit = o / safe[None, :]
    cos = np.clip(unit.T @ unit, 0.0, 1.0)
    counts = [p.n_clusters for p in pool.partitions]
    owner = np.repeat(np.arange(pool.m), counts)
    same_partition = owner[:, None] == owner[None, :]
    return np.where(same_partition, cos, 0.0)


def build_dissimilarity(
    pool: EnsemblePool,
    r: np.ndarray,
    ca: SymMatrix,
    tau: float = 0.0,
) -> SymMatrix:
    """Average over base clusterings of 1 - r(host cluster of i, host
    cluster of j), restricted to pairs with zero co-association.

    Averages below ``tau`` (before division by M) are suppressed to 0.
    """
    if tau < 0.0:
        raise ConfigError(f"tau must be >= 0, got {tau}")
    ca_dense = ca.to_dense()
    if ca_dense.shape[0] != pool.n:
        raise ConfigError(f"CA matrix order {ca_dense.shape[0]} != pool n {pool.n}")
    sum_r = np.zeros((pool.n, pool.n))
    for glob in pool.global_labels():
        sum_r += r[np.ix_(glob, glob)]
    raw = np.maximum(pool.m - sum_r, 0.0)
    keep = (ca_dense == 0.0) & (raw >= tau)
    np.fill_diagonal(keep, False)
    d = np.where(keep, raw / pool.m, 0.0)
    return SymMatrix.from_dense(d, atol=1e-12)


@dataclass(frozen=True)
class ClusterGraph:
    """All intermediate cluster-level matrices of the walk construction."""

    proximity: np.ndarray
    transition: np.ndarray
    high_order: np.ndarray
    cluster_similarity: np.ndarray
    beta: float
    k_steps: int


def build_cluster_graph(
    pool: EnsemblePool,
    beta: float = DEFAULT_BETA,
    k_steps: int = DEFAULT_WALK_STEPS,
    symmetric_powers: bool = False,
) -> ClusterGraph:
    """Run the full proximity -> transition -> walk -> cosine chain."""
    p = jaccard_proximity(pool)
    pt = transition_matrix(p)
    o = high_order_proximity(pt, beta=beta, k_steps=k_steps, symmetric_powers=symmetric_powers)
    r = cluster_similarity(o, pool)
    return ClusterGraph(
        proximity=p,
        transition=pt,
        high_order=o,
        cluster_similarity=r,
        beta=beta,
        k_steps=k_steps,
    )
