import numpy as np
import pytest

from coassoc.basegen import (
    KMeansConfig,
    derive_seed,
    generate_pool,
    kmeans,
    sample_ensemble,
)
from coassoc.core import Dataset
from coassoc.datasets import ecoli_like
from coassoc.errors import ConfigError
from coassoc.metrics import ari


def blob_dataset(seed=0, per=30, sep=12.0):
    rng = np.random.default_rng(seed)
    a = rng.normal((0.0, 0.0), 1.0, size=(per, 2))
    b = rng.normal((sep, sep), 1.0, size=(per, 2))
    feats = np.vstack([a, b])
    labels = np.array([0] * per + [1] * per)
    return Dataset(features=feats, labels=labels, name="blobs")


class TestDeriveSeed:
    def test_deterministic_and_path_sensitive(self):
        assert derive_seed(1, 2, 3) == derive_seed(1, 2, 3)
        assert derive_seed(1, 2, 3) != derive_seed(1, 3, 2)
        assert derive_seed(1) != derive_seed(2)

    def test_64_bit_range(self):
        for master in (0, 1, 2**63, 2**64 - 1):
            assert 0 <= derive_seed(master, 7) < 2**64


class TestKMeans:
    def test_k_one_single_cluster(self):
        data = blob_dataset()
        p = kmeans(data, 1, seed=0)
        assert p.n_clusters == 1

    def test_k_equals_n_singletons(self):
        rng = np.random.default_rng(7)
        data = Dataset(features=rng.normal(size=(8, 2)), name="tiny")
        p = kmeans(data, 8, seed=3)
        assert p.n_clusters == 8

    def test_recovers_separated_blobs(self):
        data = blob_dataset()
        p = kmeans(data, 2, seed=11)
        truth = data.truth()
        assert ari(p, truth) == pytest.approx(1.0)

    def test_deterministic(self):
        data = blob_dataset(seed=3)
        a = kmeans(data, 4, seed=9)
        b = kmeans(data, 4, seed=9)
        assert np.array_equal(a.labels, b.labels)

    def test_k_out_of_range(self):
        data = blob_dataset()
        with pytest.raises(ConfigError):
            kmeans(data, 61, seed=0)
        with pytest.raises(ConfigError):
            kmeans(data, 0, seed=0)

    def test_every_requested_cluster_nonempty(self):
        rng = np.random.default_rng(13)
        data = Dataset(features=rng.normal(size=(40, 3)), name="noise")
        for k in (2, 7, 15):
            p = kmeans(data, k, seed=int(rng.integers(1 << 32)))
            assert p.n_clusters == k
            assert np.bincount(p.labels, minlength=k).min() >= 1

    def test_kmeanspp_init(self):
        data = blob_dataset()
        p = kmeans(data, 2, seed=5, init="kmeans++")
        assert ari(p, data.truth()) == pytest.approx(1.0)


class TestGeneratePool:
    def test_same_seed_identical_pools(self):
        data = blob_dataset(seed=5)
        cfg = KMeansConfig(seed=42, max_iters=30)
        p1 = generate_pool(data, 10, cfg)
        p2 = generate_pool(data, 10, cfg)
        assert p1 == p2

    def test_pool_size(self):
        data = blob_dataset()
        pool = generate_pool(data, 100, KMeansConfig(seed=1, max_iters=15))
        assert pool.m == 100

    def test_cluster_counts_within_sqrt_n(self):
        data = ecoli_like()  # n = 336, floor(sqrt(n)) = 18
        pool = generate_pool(data, 40, KMeansConfig(seed=2, max_iters=15))
        counts = [p.n_clusters for p in pool.partitions]
        assert min(counts) >= 2
        assert max(counts) <= 18

    def test_partitions_satisfy_invariants(self):
        data = blob_dataset(seed=9)
        pool = generate_pool(data, 20, KMeansConfig(seed=3, max_iters=15))
        for part in pool.partitions:
            assert part.labels.min() >= 0
            assert part.labels.max() == part.n_clusters - 1
            assert np.bincount(part.labels).min() >= 1


class TestSampleEnsemble:
    def test_full_draw_is_identity(self):
        data = blob_dataset()
        pool = generate_pool(data, 8, KMeansConfig(seed=4, max_iters=10))
        sub = sample_ensemble(pool, 8, seed=77)
        assert sub.partitions == pool.partitions

    def test_same_seed_same_subset(self):
        data = blob_dataset()
        pool = generate_pool(data, 30, KMeansConfig(seed=4, max_iters=10))
        a = sample_ensemble(pool, 5, seed=123)
        b = sample_ensemble(pool, 5, seed=123)
        assert a == b

    def test_distinct_seeds_give_distinct_subsets(self):
        data = blob_dataset()
        pool = generate_pool(data, 100, KMeansConfig(seed=6, max_iters=5))
        subsets = set()
        for seed in range(1, 21):
            sub = sample_ensemble(pool, 20, seed=seed)
            key = tuple(tuple(p.labels.tolist()) for p in sub.partitions)
            subsets.add(key)
        assert len(subsets) == 20

    def test_m_out_of_range(self):
        data = blob_dataset()
        pool = generate_pool(data, 5, KMeansConfig(seed=4, max_iters=5))
        with pytest.raises(ConfigError):
            sample_ensemble(pool, 6, seed=0)
