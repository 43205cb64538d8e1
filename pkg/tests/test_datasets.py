import numpy as np
import pytest

from coassoc.core import load_dataset
from coassoc.datasets import benchmark, write_csv
from coassoc.errors import ConfigError


EXPECTED_SHAPES = {
    # name: (n, d, classes)
    "ecoli": (336, 8, 8),
    "aggregation": (788, 2, 7),
    "spf": (1941, 27, 7),
    "mf": (2000, 649, 10),
}


@pytest.mark.parametrize("name", sorted(EXPECTED_SHAPES))
def test_shapes_match_reference_benchmarks(name):
    n, d, classes = EXPECTED_SHAPES[name]
    ds = benchmark(name)
    assert ds.n == n
    assert ds.d == d
    assert ds.n_classes == classes


@pytest.mark.parametrize("name", sorted(EXPECTED_SHAPES))
def test_generators_are_deterministic(name):
    a = benchmark(name)
    b = benchmark(name)
    assert np.array_equal(a.features, b.features)
    assert np.array_equal(a.labels, b.labels)


def test_unknown_benchmark():
    with pytest.raises(ConfigError):
        benchmark("iris")


def test_csv_round_trip(tmp_path):
    ds = benchmark("aggregation")
    path = tmp_path / "agg.csv"
    write_csv(ds, path)
    loaded = load_dataset(path, label_last=True)
    assert loaded.n == ds.n and loaded.d == ds.d
    np.testing.assert_allclose(loaded.features, ds.features)
    np.testing.assert_array_equal(loaded.labels, ds.labels)
