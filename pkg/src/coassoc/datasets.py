"""Bundled synthetic benchmark datasets.

The evaluation protocol references four desk-scale benchmarks by name.
The original datasets are not redistributable with this package, so each
is replaced by a deterministic synthetic stand-in that matches the
original's sample count, feature count, class count, and class-size
profile, with cluster overlap tuned so that ensemble-clustering scores
land in the same band. Generators are pure functions of a fixed seed.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .core import Dataset
from .errors import ConfigError


def _blobs(
    rng: np.random.Generator,
    centers: np.ndarray,
    sizes: list[int],
    stds: list[float],
) -> tuple[np.ndarray, np.ndarray]:
    feats = []
    labels = []
    for c, (size, std) in enumerate(zip(sizes, stds)):
        feats.append(rng.normal(centers[c], std, size=(size, centers.shape[1])))
        labels.append(np.full(size, c))
    return np.vstack(feats), np.concatenate(labels)


def aggregation_like(seed: int = 1007) -> Dataset:
    """Seven 2-D blobs of uneven size, two pairs nearly touching."""
    rng = np.random.default_rng(seed)
    centers = np.array(
        [
            [6.0, 25.0],
            [20.0, 26.0],
            [31.0, 22.5],
            [11.0, 9.0],
            [31.5, 8.0],
            [21.5, 5.5],
            [4.5, 4.0],
        ]
    )
    sizes = [45, 170, 102, 273, 34, 130, 34]
    stds = [1.1, 2.0, 1.7, 2.4, 1.1, 1.8, 1.1]
    feats, labels = _blobs(rng, centers, sizes, stds)
    return Dataset(features=feats, labels=labels, name="aggregation")


def ecoli_like(seed: int = 1013) -> Dataset:
    """Eight overlapping 8-D classes with the heavy size imbalance of
    protein-localization data."""
    rng = np.random.default_rng(seed)
    centers = rng.normal(0.0, 1.0, size=(8, 8))
    centers *= 2.1
    # push two mid-size classes toward the largest one to create the
    # localization-style confusion region
    centers[3] = centers[1] + rng.normal(0.0, 0.55, size=8)
    centers[6] = centers[2] + rng.normal(0.0, 0.55, size=8)
    sizes = [143, 77, 52, 35, 20, 5, 2, 2]
    stds = [1.0, 1.0, 0.9, 1.0, 0.9, 0.8, 0.8, 0.8]
    feats, labels = _blobs(rng, centers, sizes, stds)
    return Dataset(features=feats, labels=labels, name="ecoli")


def spf_like(seed: int = 1019) -> Dataset:
    """Seven heavily overlapping 27-D fault classes, one broad catch-all
    class; only a low-dimensional subspace is informative."""
    rng = np.random.default_rng(seed)
    informative = 8
    centers = np.zeros((7, 27))
    centers[:, :informative] = rng.normal(0.0, 1.0, size=(7, informative)) * 1.15
    centers[6] = 0.0  # catch-all sits on top of everything
    sizes = [158, 190, 391, 72, 55, 402, 673]
    stds = [1.0, 1.0, 1.0, 0.95, 0.95, 1.05, 1.55]
    feats, labels = _blobs(rng, centers, sizes, stds)
    return Dataset(features=feats, labels=labels, name="spf")


def mf_like(seed: int = 1021) -> Dataset:
    """Ten balanced digit-style classes in 649 dimensions: separated
    blobs in a 12-D latent space pushed through a random embedding."""
    rng = np.random.default_rng(seed)
    latent_dim = 12
    centers = rng.normal(0.0, 1.0, size=(10, latent_dim)) * 3.2
    sizes = [200] * 10
    stds = [1.0] * 10
    latent, labels = _blobs(rng, centers, sizes, stds)
    embed = rng.normal(0.0, 1.0 / np.sqrt(latent_dim), size=(latent_dim, 649))
    feats = latent @ embed + rng.normal(0.0, 0.35, size=(2000, 649))
    return Dataset(features=feats, labels=labels, name="mf")


BENCHMARKS = {
    "aggregation": aggregation_like,
    "ecoli": ecoli_like,
    "spf": spf_like,
    "mf": mf_like,
}


def benchmark(name: str) -> Dataset:
    """Instantiate a bundled benchmark by name with its fixed seed."""
    try:
        return BENCHMARKS[name]()
    except KeyError:
        raise ConfigError(
            f"unknown benchmark {name!r}; available: {sorted(BENCHMARKS)}"
        ) from None


def write_csv(dataset: Dataset, path) -> None:
    """Write features (and labels, if present, as the last column) as CSV."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        for i in range(dataset.n):
            row = [f"{v!r}" for v in dataset.features[i].tolist()]
            if dataset.labels is not None:
                row.append(str(int(dataset.labels[i])))
            writer.writerow(row)
