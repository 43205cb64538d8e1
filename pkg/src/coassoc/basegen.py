"""Randomized k-means pools of base clusterings.

Pools are fully determined by a master seed: every partition derives its
own stream with a splitmix-style mix of (master seed, partition index),
so generation order and parallelism cannot change the result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Dataset, EnsemblePool, Partition
from .errors import ConfigError

_MASK64 = (1 << 64) - 1


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4B5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def derive_seed(master: int, *indices: int) -> int:
    """Derive an independent 64-bit stream seed from a master seed and a
    path of integer indices (splitmix64 chaining)."""
    state = _splitmix64(master & _MASK64)
    for ix in indices:
        state = _splitmix64(state ^ (ix & _MASK64))
    return state


@dataclass(frozen=True)
class KMeansConfig:
    """Pool-generation settings; ``k_max`` defaults to floor(sqrt(n))."""

    seed: int = 0
    k_min: int = 2
    k_max: int | None = None
    restarts: int = 1
    max_iters: int = 100
    tol: float = 1e-4
    standardize: bool = True
    init: str = "random"

    def __post_init__(self):
        if self.k_min < 1:
            raise ConfigError(f"k_min must be >= 1, got {self.k_min}")
        if self.k_max is not None and self.k_max < self.k_min:
            raise ConfigError(f"k_max {self.k_max} below k_min {self.k_min}")
        if self.init not in ("random", "kmeans++"):
            raise ConfigError(f"unknown init {self.init!r}")
        if self.tol <= 0 or self.max_iters < 1 or self.restarts < 1:
            raise ConfigError("tol, max_iters, and restarts must be positive")


def standardize_features(features: np.ndarray) -> np.ndarray:
    """Z-score each feature; constant features are left centered at 0."""
    mu = features.mean(axis=0)
    sd = features.std(axis=0)
    sd = np.where(sd > 0.0, sd, 1.0)
    return (features - mu) / sd


def _init_centers(x: np.ndarray, k: int, rng: np.random.Generator, method: str) -> np.ndarray:
    n = x.shape[0]
    if method == "random":
        return x[rng.choice(n, size=k, replace=False)].copy()
    # kmeans++ seeding
    centers = np.empty((k, x.shape[1]))
    centers[0] = x[rng.integers(n)]
    d2 = ((x - centers[0]) ** 2).sum(axis=1)
    for i in range(1, k):
        total = d2.sum()
        if total <= 0.0:
            centers[i] = x[rng.integers(n)]
            continue
        centers[i] = x[rng.choice(n, p=d2 / total)]
        d2 = np.minimum(d2, ((x - centers[i]) ** 2).sum(axis=1))
    return centers


def _assign(x: np.ndarray, centers: np.ndarray) -> np.ndarray:
    d2 = (
        (x**2).sum(axis=1)[:, None]
        - 2.0 * x @ centers.T
        + (centers**2).sum(axis=1)[None, :]
    )
    return d2.argmin(axis=1)


def _repair_empty(x: np.ndarray, centers: np.ndarray, labels: np.ndarray, k: int) -> None:
    """Reseed each empty cluster to the point farthest from its assigned
    center, never stealing a cluster's last member."""
    counts = np.bincount(labels, minlength=k)
    empty = np.flatnonzero(counts == 0)
    if not empty.size:
        return
    dist = ((x - centers[labels]) ** 2).sum(axis=1)
    for c in empty:
        dist[counts[labels] <= 1] = -1.0
        far = int(dist.argmax())
        counts[labels[far]] -= 1
        labels[far] = c
        counts[c] += 1
        dist[far] = -1.0


def kmeans(
    data: Dataset | np.ndarray,
    k: int,
    seed: int,
    max_iters: int = 100,
    tol: float = 1e-4,
    init: str = "random",
) -> Partition:
    """Lloyd's algorithm from a random sample of k distinct points.

    Iterates until the relative center shift drops below ``tol`` or
    ``max_iters`` passes. A cluster that empties is reseeded to the point
    farthest from its current center, so exactly k clusters come back
    (then densified to first-appearance order).
    """
    x = data.features if isinstance(data, Dataset) else np.asarray(data, dtype=np.float64)
    n = x.shape[0]
    if not 1 <= k <= n:
        raise ConfigError(f"k must lie in [1, {n}], got {k}")
    rng = np.random.default_rng(seed)
    centers = _init_centers(x, k, rng, init)
    labels = _assign(x, centers)
    for _ in range(max_iters):
        _repair_empty(x, centers, labels, k)
        new_centers = np.empty_like(centers)
        for c in range(k):
            new_centers[c] = x[labels == c].mean(axis=0)
        shift = np.linalg.norm(new_centers - centers)
        scale = np.linalg.norm(centers)
        centers = new_centers
        labels = _assign(x, centers)
        if shift <= tol * max(scale, 1e-12):
            break
    _repair_empty(x, centers, labels, k)
    return Partition.from_labels(labels)


def generate_pool(data: Dataset, count: int, cfg: KMeansConfig) -> EnsemblePool:
    """Generate ``count`` k-means partitions with k drawn uniformly from
    [k_min, k_max]; reproducible from ``cfg.seed`` alone."""
    if count < 1:
        raise ConfigError(f"pool size must be >= 1, got {count}")
    x = data.features
    if cfg.standardize:
        x = standardize_features(x)
    n = x.shape[0]
    k_max = cfg.k_max if cfg.k_max is not None else max(cfg.k_min, int(math.isqrt(n)))
    k_max = min(k_max, n)
    if cfg.k_min > n:
        raise ConfigError(f"k_min {cfg.k_min} exceeds sample count {n}")
    k_rng = np.random.default_rng(derive_seed(cfg.seed, 0))
    ks = k_rng.integers(cfg.k_min, k_max + 1, size=count)
    partitions = []
    for i in range(count):
        part = kmeans(
            x,
            int(ks[i]),
            seed=derive_seed(cfg.seed, 1, i),
            max_iters=cfg.max_iters,
            tol=cfg.tol,
            init=cfg.init,
        )
        partitions.append(part)
    return EnsemblePool(partitions=tuple(partitions), n=n, seed=cfg.seed)


def sample_ensemble(pool: EnsemblePool, m: int, seed: int) -> EnsemblePool:
    """Uniform without-replacement draw of ``m`` partitions, kept in pool
    order so downstream cluster numbering is reproducible."""
    if not 1 <= m <= pool.m:
        raise ConfigError(f"ensemble size {m} outside [1, {pool.m}]")
    rng = np.random.default_rng(derive_seed(seed, 2))
    picked = np.sort(rng.choice(pool.m, size=m, replace=False))
    return EnsemblePool(
        partitions=tuple(pool.partitions[i] for i in picked),
        n=pool.n,
        seed=seed,
    )
