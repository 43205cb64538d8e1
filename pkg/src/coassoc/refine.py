"""Adjacency refinement and similarity-based agglomerative consensus.

The learned similarity/dissimilarity gap adjusts the weighted
co-association adjacency entrywise (net similarity pulls an entry toward
1, net dissimilarity scales it toward 0), and the final partition comes
from agglomerative merging on the refined similarities.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Partition, SymMatrix
from .errors import ConfigError

LINKAGES = ("average", "single", "complete")


def refine_adjacency(w: SymMatrix, s_star: SymMatrix, d_star: SymMatrix) -> SymMatrix:
    """Adjust the adjacency by the learned similarity/dissimilarity gap.

    Where s - d >= 0 the entry moves toward 1 by the complementary
    product 1 - (1 - s + d)(1 - w); where s - d < 0 it is scaled down to
    (1 + s - d) w. Output is clamped to [0, 1].
    """
    if not w.order == s_star.order == d_star.order:
        raise ConfigError("adjacency and learned matrices must share one order")
    wd = w.to_dense()
    gap = s_star.to_dense() - d_star.to_dense()
    enhanced = 1.0 - (1.0 - gap) * (1.0 - wd)
    suppressed = (1.0 + gap) * wd
    out = np.clip(np.where(gap >= 0.0, enhanced, suppressed), 0.0, 1.0)
    return SymMatrix.from_dense(out, atol=1e-12)


@dataclass(frozen=True)
class ConsensusResult:
    """Final partition, the adjacency it came from, and the merge trace."""

    labels: Partition
    w_star: SymMatrix
    dendrogram: tuple  # (i, j, similarity) per merge, n-1 entries


def agglomerate(w_star: SymMatrix, k: int, linkage: str = "average") -> ConsensusResult:
    """Merge the pair of clusters with the highest inter-cluster
    similarity until one cluster remains, reading the labels off at ``k``.

    Linkage acts on similarities: average (size-weighted mean), single
    (max), or complete (min). Ties break on the lexicographically
    smallest index pair; the diagonal never participates.
    """
    if linkage not in LINKAGES:
        raise ConfigError(f"unknown linkage {linkage!r}")
    n = w_star.order
    if not 1 <= k <= n:
        raise ConfigError(f"target cluster count {k} outside [1, {n}]")

    sim = w_star.to_dense()
    np.fill_diagonal(sim, -np.inf)
    sizes = np.ones(n)
    labels = np.arange(n)
    merges = []
    snapshot = labels.copy() if k == n else None

    for active in range(n, 1, -1):
        flat = int(np.argmax(sim))
        i, j = divmod(flat, n)
        if i > j:
            i, j = j, i
        merges.append((int(i), int(j), float(sim[i, j])))
        if linkage == "average":
            row = (sizes[i] * sim[i, :] + sizes[j] * sim[j, :]) / (sizes[i] + sizes[j])
        elif linkage == "single":
            row = np.maximum(sim[i, :], sim[j, :])
        else:
            row = np.minimum(sim[i, :], sim[j, :])
        sim[i, :] = row
        sim[:, i] = row
        sim[i, i] = -np.inf
        sim[j, :] = -np.inf
        sim[:, j] = -np.inf
        sizes[i] += sizes[j]
        labels[labels == j] = i
        if active - 1 == k:
            snapshot = labels.copy()

    return ConsensusResult(
        labels=Partition.from_labels(snapshot),
        w_star=w_star,
        dendrogram=tuple(merges),
    )
