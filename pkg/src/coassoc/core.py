"""Core data types, ensemble-pool persistence, and dataset ingestion.

The types here are shared by every stage of the pipeline: a ``Partition``
is one base clustering over ``n`` samples, an ``EnsemblePool`` bundles
``M`` of them together with the global cluster enumeration, ``SymMatrix``
stores the symmetric n-by-n matrices the pipeline passes around, and
``Dataset`` holds raw features plus optional ground truth.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DimensionError, FormatError, MalformedInputError

POOL_MAGIC = "coassoc-pool"
POOL_VERSION = 1


def _dense_labels(raw) -> tuple[np.ndarray, int]:
    """Remap arbitrary label values to 0..k-1 in first-appearance order."""
    raw = np.asarray(raw)
    if raw.ndim != 1:
        raise DimensionError(f"labels must be 1-D, got shape {raw.shape}")
    mapping: dict = {}
    out = np.empty(raw.shape[0], dtype=np.int64)
    for idx, value in enumerate(raw.tolist()):
        code = mapping.setdefault(value, len(mapping))
        out[idx] = code
    return out, len(mapping)


@dataclass(frozen=True)
class Partition:
    """One base clustering: dense 0-based cluster labels over n samples.

    Every label lies in ``[0, n_clusters)`` and every cluster index owns
    at least one sample; use :meth:`from_labels` to densify arbitrary
    label values first.
    """

    labels: np.ndarray
    n_clusters: int

    def __post_init__(self):
        labels = np.ascontiguousarray(self.labels, dtype=np.int64)
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        if labels.size == 0:
            raise DimensionError("partition must cover at least one sample")
        present = np.unique(labels)
        if present[0] < 0 or present[-1] >= self.n_clusters:
            raise ValueError(
                f"labels outside [0, {self.n_clusters}): saw {present[0]}..{present[-1]}"
            )
        if present.size != self.n_clusters:
            raise ValueError(
                f"{self.n_clusters - present.size} of {self.n_clusters} clusters are empty"
            )

    @classmethod
    def from_labels(cls, raw) -> "Partition":
        labels, k = _dense_labels(raw)
        return cls(labels=labels, n_clusters=k)

    @property
    def n(self) -> int:
        return self.labels.shape[0]

    def members(self, c: int) -> np.ndarray:
        """Indices of the samples assigned to cluster ``c``."""
        return np.flatnonzero(self.labels == c)

    def __eq__(self, other):
        if not isinstance(other, Partition):
            return NotImplemented
        return self.n_clusters == other.n_clusters and np.array_equal(
            self.labels, other.labels
        )


@dataclass(frozen=True)
class EnsemblePool:
    """M base clusterings over one sample set, plus provenance.

    ``cluster_offsets[m]`` is the starting index of partition m's clusters
    in the global enumeration ``[0, N_c)`` with ``N_c = sum_m n_clusters``.
    """

    partitions: tuple[Partition, ...]
    n: int
    seed: int
    cluster_offsets: np.ndarray = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "partitions", tuple(self.partitions))
        if not self.partitions:
            raise DimensionError("pool must contain at least one partition")
        for m, part in enumerate(self.partitions):
            if part.n != self.n:
                raise DimensionError(
                    f"partition {m} covers {part.n} samples, pool declares {self.n}"
                )
        offsets = np.cumsum([0] + [p.n_clusters for p in self.partitions])[:-1]
        offsets = np.ascontiguousarray(offsets, dtype=np.int64)
        offsets.setflags(write=False)
        object.__setattr__(self, "cluster_offsets", offsets)

    @property
    def m(self) -> int:
        """Number of base clusterings in the pool."""
        return len(self.partitions)

    @property
    def total_clusters(self) -> int:
        """N_c, the number of clusters across the whole ensemble."""
        return int(self.cluster_offsets[-1]) + self.partitions[-1].n_clusters

    def global_labels(self) -> np.ndarray:
        """(M, n) array mapping each sample to its global cluster index."""
        return np.stack(
            [p.labels + off for p, off in zip(self.partitions, self.cluster_offsets)]
        )

    def __eq__(self, other):
        if not isinstance(other, EnsemblePool):
            return NotImplemented
        return (
            self.n == other.n
            and self.seed == other.seed
            and self.partitions == other.partitions
        )


def global_cluster_index(pool: EnsemblePool, m: int, local: int) -> int:
    """Map (partition, local cluster) to the global index in [0, N_c)."""
    if not 0 <= m < pool.m:
        raise IndexError(f"partition index {m} out of range [0, {pool.m})")
    k = pool.partitions[m].n_clusters
    if not 0 <= local < k:
        raise IndexError(f"cluster index {local} out of range [0, {k}) in partition {m}")
    return int(pool.cluster_offsets[m]) + local


class SymMatrix:
    """Dense symmetric matrix with packed lower-triangle storage.

    Entry (i, j) and (j, i) read the single stored value, so the logical
    matrix is exactly symmetric by construction.
    """

    __slots__ = ("order", "_data")

    def __init__(self, order: int, data: np.ndarray | None = None):
        if order < 1:
            raise DimensionError("matrix order must be positive")
        self.order = order
        size = order * (order + 1) // 2
        if data is None:
            self._data = np.zeros(size)
        else:
            data = np.ascontiguousarray(data, dtype=np.float64)
            if data.shape != (size,):
                raise DimensionError(
                    f"packed data must have length {size}, got {data.shape}"
                )
            self._data = data

    @staticmethod
    def _packed_index(i: int, j: int) -> int:
        if i < j:
            i, j = j, i
        return i * (i + 1) // 2 + j

    def __getitem__(self, key) -> float:
        i, j = key
        return float(self._data[self._packed_index(i, j)])

    def __setitem__(self, key, value: float):
        i, j = key
        self._data[self._packed_index(i, j)] = value

    @classmethod
    def from_dense(cls, arr, atol: float = 0.0) -> "SymMatrix":
        """Pack a square array; off-symmetry beyond ``atol`` is rejected."""
        arr = np.asarray(arr, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise DimensionError(f"expected a square matrix, got shape {arr.shape}")
        gap = np.abs(arr - arr.T).max() if arr.size else 0.0
        if gap > atol:
            raise DimensionError(f"matrix is asymmetric by {gap:.3g} (atol={atol:.3g})")
        n = arr.shape[0]
        return cls(n, arr[np.tril_indices(n)].copy())

    def to_dense(self) -> np.ndarray:
        n = self.order
        out = np.zeros((n, n))
        idx = np.tril_indices(n)
        out[idx] = self._data
        out.T[idx] = self._data
        return out

    def __eq__(self, other):
        if not isinstance(other, SymMatrix):
            return NotImplemented
        return self.order == other.order and np.array_equal(self._data, other._data)

    def __repr__(self):
        return f"SymMatrix(order={self.order})"


@dataclass(frozen=True)
class Dataset:
    """Feature matrix with optional dense ground-truth labels."""

    features: np.ndarray
    labels: np.ndarray | None = None
    name: str = ""

    def __post_init__(self):
        feats = np.ascontiguousarray(self.features, dtype=np.float64)
        if feats.ndim != 2:
            raise DimensionError(f"features must be 2-D, got shape {feats.shape}")
        feats.setflags(write=False)
        object.__setattr__(self, "features", feats)
        if self.labels is not None:
            labels = np.ascontiguousarray(self.labels, dtype=np.int64)
            if labels.shape != (feats.shape[0],):
                raise DimensionError(
                    f"{labels.shape[0]} labels for {feats.shape[0]} samples"
                )
            labels.setflags(write=False)
            object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]

    @property
    def n_classes(self) -> int:
        if self.labels is None:
            raise ValueError(f"dataset {self.name!r} has no ground-truth labels")
        return int(self.labels.max()) + 1

    def truth(self) -> Partition:
        if self.labels is None:
            raise ValueError(f"dataset {self.name!r} has no ground-truth labels")
        return Partition.from_labels(self.labels)


def load_dataset(
    path,
    fmt: str = "csv",
    label_last: bool = True,
    header: bool = False,
    name: str | None = None,
) -> Dataset:
    """Read a CSV into a Dataset.

    When ``label_last`` is set the final column is treated as the
    ground-truth class and re-encoded to dense 0-based integers; all other
    columns must parse as real numbers. ``header`` skips the first row.
    """
    if fmt != "csv":
        raise FormatError(f"unsupported dataset format {fmt!r}")
    path = Path(path)
    rows: list[list[str]] = []
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        for row in reader:
            if row:
                rows.append(row)
    if header and rows:
        rows = rows[1:]
    if not rows:
        raise MalformedInputError(f"{path}: no data rows")
    width = len(rows[0])
    if label_last and width < 2:
        raise MalformedInputError(f"{path}: need at least one feature column")
    features = np.empty((len(rows), width - 1 if label_last else width))
    raw_labels: list[str] = []
    for r, row in enumerate(rows):
        if len(row) != width:
            raise DimensionError(
                f"{path}: row {r + 1} has {len(row)} fields, expected {width}"
            )
        stop = width - 1 if label_last else width
        for c in range(stop):
            try:
                features[r, c] = float(row[c])
            except ValueError:
                raise MalformedInputError(
                    f"{path}: row {r + 1}, column {c + 1}: {row[c]!r} is not a number"
                ) from None
        if label_last:
            raw_labels.append(row[-1].strip())
    labels = None
    if label_last:
        labels, _ = _dense_labels(np.array(raw_labels, dtype=object))
    return Dataset(features=features, labels=labels, name=name or path.stem)


def save_pool(pool: EnsemblePool, path) -> None:
    """Write a pool to a line-oriented text file (see README for the format)."""
    path = Path(path)
    lines = [
        f"{POOL_MAGIC} v{POOL_VERSION}",
        f"n={pool.n} m={pool.m} seed={pool.seed}",
    ]
    for part in pool.partitions:
        lines.append(" ".join(str(int(v)) for v in part.labels))
    path.write_text("\n".join(lines) + "\n")


def load_pool(path) -> EnsemblePool:
    """Read a pool written by :func:`save_pool`; round-trips all fields."""
    path = Path(path)
    text = path.read_text()
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if len(lines) < 2:
        raise FormatError(f"{path}: truncated pool file")
    magic = lines[0].split()
    if len(magic) != 2 or magic[0] != POOL_MAGIC:
        raise FormatError(f"{path}: bad magic line {lines[0]!r}")
    if magic[1] != f"v{POOL_VERSION}":
        raise FormatError(f"{path}: unsupported version {magic[1]!r}")
    try:
        fields = dict(item.split("=", 1) for item in lines[1].split())
        n = int(fields["n"])
        m = int(fields["m"])
        seed = int(fields["seed"])
    except (ValueError, KeyError) as exc:
        raise FormatError(f"{path}: bad header line {lines[1]!r}") from exc
    body = lines[2:]
    if len(body) != m:
        raise FormatError(f"{path}: expected {m} partition rows, found {len(body)}")
    partitions = []
    for row_no, line in enumerate(body):
        try:
            labels = np.array([int(tok) for tok in line.split()], dtype=np.int64)
        except ValueError as exc:
            raise FormatError(f"{path}: non-integer label in row {row_no + 1}") from exc
        if labels.shape[0] != n:
            raise FormatError(
                f"{path}: row {row_no + 1} has {labels.shape[0]} labels, expected {n}"
            )
        partitions.append(Partition(labels=labels, n_clusters=int(labels.max()) + 1))
    return EnsemblePool(partitions=tuple(partitions), n=n, seed=seed)
