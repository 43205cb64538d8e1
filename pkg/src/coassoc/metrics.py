"""External clustering indices and the cluster-size/precision profile.

All three indices (normalized mutual information, adjusted Rand, pairwise
F-score) are computed from the contingency table between the predicted
and ground-truth partitions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import EnsemblePool, Partition
from .errors import DimensionError

from .ca import cluster_sizes, membership_matrix


@dataclass(frozen=True)
class ContingencyTable:
    """Joint counts between two partitions, with marginals."""

    counts: np.ndarray
    row_marginals: np.ndarray
    col_marginals: np.ndarray
    n: int

    @classmethod
    def build(cls, pred: Partition, truth: Partition) -> "ContingencyTable":
        if pred.n != truth.n:
            raise DimensionError(
                f"partitions cover {pred.n} and {truth.n} samples"
            )
        counts = np.zeros((pred.n_clusters, truth.n_clusters), dtype=np.int64)
        np.add.at(counts, (pred.labels, truth.labels), 1)
        return cls(
            counts=counts,
            row_marginals=counts.sum(axis=1),
            col_marginals=counts.sum(axis=0),
            n=pred.n,
        )


def _entropy(marginals: np.ndarray, n: int) -> float:
    p = marginals[marginals > 0] / n
    return float(-(p * np.log(p)).sum())


def nmi(pred: Partition, truth: Partition, normalization: str = "arithmetic") -> float:
    """Mutual information normalized by the mean (or max) of the two
    partition entropies; two single-cluster partitions score 1.0."""
    table = ContingencyTable.build(pred, truth)
    h_pred = _entropy(table.row_marginals, table.n)
    h_truth = _entropy(table.col_marginals, table.n)
    if h_pred == 0.0 and h_truth == 0.0:
        return 1.0
    nz = table.counts > 0
    joint = table.counts[nz] / table.n
    outer = (
        table.row_marginals[:, None] * table.col_marginals[None, :]
    )[nz] / (table.n * table.n)
    mi = float((joint * np.log(joint / outer)).sum())
    if normalization == "arithmetic":
        denom = (h_pred + h_truth) / 2.0
    elif normalization == "max":
        denom = max(h_pred, h_truth)
    else:
        raise ValueError(f"unknown normalization {normalization!r}")
    if denom == 0.0:
        return 1.0
    return max(0.0, mi / denom)


def _pair_counts(table: ContingencyTable) -> tuple[int, int, int]:
    def comb2(arr):
        arr = arr.astype(np.int64)
        return int((arr * (arr - 1) // 2).sum())

    together_both = comb2(table.counts.ravel())
    together_pred = comb2(table.row_marginals)
    together_truth = comb2(table.col_marginals)
    return together_both, together_pred, together_truth


def ari(pred: Partition, truth: Partition) -> float:
    """Adjusted Rand index in [-1, 1]; 1.0 for identical partitions."""
    table = ContingencyTable.build(pred, truth)
    tp_both, tp_pred, tp_truth = _pair_counts(table)
    all_pairs = table.n * (table.n - 1) // 2
    if all_pairs == 0:
        return 1.0
    expected = tp_pred * tp_truth / all_pairs
    maximum = (tp_pred + tp_truth) / 2.0
    if maximum == expected:
        return 1.0
    return float((tp_both - expected) / (maximum - expected))


def pairwise_f(pred: Partition, truth: Partition) -> float:
    """Harmonic mean of pair precision and recall, where a pair is
    positive iff co-clustered; 0 when there are no positives to score."""
    table = ContingencyTable.build(pred, truth)
    tp, pred_pos, truth_pos = _pair_counts(table)
    precision = tp / pred_pos if pred_pos > 0 else 0.0
    recall = tp / truth_pos if truth_pos > 0 else 0.0
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


@dataclass(frozen=True)
class PrecisionBin:
    """Purity statistics of the pool clusters whose size falls in
    (lo, hi] (the first bin includes its lower edge)."""

    lo: float
    hi: float
    count: int
    mean: float
    median: float


def cluster_precision_profile(
    pool: EnsemblePool,
    truth: Partition,
    bins: list[float] | None = None,
) -> list[PrecisionBin]:
    """Majority-class purity of every pool cluster, grouped by cluster
    size. Default bins are 100 wide starting at [0, 100]; empty bins
    report count 0 with NaN statistics."""
    if truth.n != pool.n:
        raise DimensionError(f"truth covers {truth.n} samples, pool {pool.n}")
    z = membership_matrix(pool)
    truth_onehot = np.zeros((pool.n, truth.n_clusters))
    truth_onehot[np.arange(pool.n), truth.labels] = 1.0
    class_counts = z.T @ truth_onehot
    sizes = cluster_sizes(pool).astype(np.float64)
    precision = class_counts.max(axis=1) / sizes
    if bins is None:
        top = float(np.ceil(sizes.max() / 100.0) * 100.0)
        bins = list(np.arange(0.0, top + 100.0, 100.0))
    edges = np.asarray(bins, dtype=np.float64)
    which = np.searchsorted(edges[1:], sizes, side="left")
    out = []
    for b in range(len(edges) - 1):
        vals = precision[which == b]
        if vals.size == 0:
            out.append(PrecisionBin(edges[b], edges[b + 1], 0, np.nan, np.nan))
        else:
            out.append(
                PrecisionBin(
                    lo=float(edges[b]),
                    hi=float(edges[b + 1]),
                    count=int(vals.size),
                    mean=float(vals.mean()),
                    median=float(np.median(vals)),
                )
            )
    return out
