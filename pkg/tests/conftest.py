import numpy as np
import pytest

from coassoc.core import EnsemblePool, Partition


def pool_from_rows(rows, seed=0):
    parts = tuple(Partition.from_labels(np.array(r)) for r in rows)
    return EnsemblePool(partitions=parts, n=len(rows[0]), seed=seed)


@pytest.fixture
def two_partition_pool():
    """Six samples, two base clusterings: {012|345} and {0|123|45}."""
    return pool_from_rows([[0, 0, 0, 1, 1, 1], [0, 1, 1, 1, 2, 2]])


@pytest.fixture
def single_partition_pool():
    """Three samples, one base clustering {01|2}."""
    return pool_from_rows([[0, 0, 1]])


@pytest.fixture
def disconnected_pool():
    """Two sample groups that never mix across any base clustering."""
    return pool_from_rows(
        [
            [0, 0, 1, 2, 2, 3],
            [0, 1, 1, 2, 3, 3],
        ]
    )
