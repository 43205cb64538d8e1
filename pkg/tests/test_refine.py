import numpy as np
import pytest

from coassoc.core import SymMatrix
from coassoc.errors import ConfigError
from coassoc.refine import agglomerate, refine_adjacency

from oracles import average_linkage_oracle


def sym(arr):
    return SymMatrix.from_dense(np.asarray(arr, dtype=float))


def co_membership(labels):
    labels = np.asarray(labels)
    return labels[:, None] == labels[None, :]


class TestRefineAdjacency:
    def test_equal_evidence_is_identity(self):
        rng = np.random.default_rng(61)
        w = rng.random((5, 5))
        w = (w + w.T) / 2
        ev = rng.random((5, 5))
        ev = (ev + ev.T) / 2
        out = refine_adjacency(sym(w), sym(ev), sym(ev)).to_dense()
        np.testing.assert_allclose(out, w, atol=1e-15)

    def test_full_enhancement_and_suppression(self):
        w = sym([[0.0, 0.4], [0.4, 0.0]])
        one = sym([[0.0, 1.0], [1.0, 0.0]])
        zero = sym(np.zeros((2, 2)))
        assert refine_adjacency(w, one, zero)[0, 1] == 1.0
        assert refine_adjacency(w, zero, one)[0, 1] == 0.0

    def test_monotone_in_similarity_and_dissimilarity(self):
        rng = np.random.default_rng(62)
        w = rng.random((4, 4))
        w = (w + w.T) / 2
        base_s = rng.random((4, 4)) * 0.5
        base_s = (base_s + base_s.T) / 2
        base_d = rng.random((4, 4)) * 0.5
        base_d = (base_d + base_d.T) / 2
        out = refine_adjacency(sym(w), sym(base_s), sym(base_d)).to_dense()
        bigger_s = np.clip(base_s + 0.3, 0, 1)
        out_s = refine_adjacency(sym(w), sym(bigger_s), sym(base_d)).to_dense()
        assert np.all(out_s >= out - 1e-12)
        bigger_d = np.clip(base_d + 0.3, 0, 1)
        out_d = refine_adjacency(sym(w), sym(base_s), sym(bigger_d)).to_dense()
        assert np.all(out_d <= out + 1e-12)

    def test_output_stays_in_box(self):
        rng = np.random.default_rng(63)
        for _ in range(20):
            def rand_sym():
                a = rng.random((6, 6))
                return sym((a + a.T) / 2)

            out = refine_adjacency(rand_sym(), rand_sym(), rand_sym()).to_dense()
            assert out.min() >= 0.0 and out.max() <= 1.0

    def test_order_mismatch(self):
        with pytest.raises(ConfigError):
            refine_adjacency(SymMatrix(3), SymMatrix(4), SymMatrix(3))


class TestAgglomerate:
    def test_two_clean_blocks(self):
        w = np.kron(np.eye(2), np.full((3, 3), 0.9))
        np.fill_diagonal(w, 1.0)
        res = agglomerate(sym(w), 2)
        np.testing.assert_array_equal(co_membership(res.labels.labels),
                                      co_membership([0, 0, 0, 1, 1, 1]))

    def test_k_equals_n_gives_singletons(self):
        rng = np.random.default_rng(64)
        w = rng.random((5, 5))
        res = agglomerate(sym((w + w.T) / 2), 5)
        assert res.labels.n_clusters == 5

    def test_dendrogram_has_full_merge_trace(self):
        rng = np.random.default_rng(65)
        w = rng.random((7, 7))
        res = agglomerate(sym((w + w.T) / 2), 3)
        assert len(res.dendrogram) == 6  # merges continue to a single cluster
        assert all(len(entry) == 3 for entry in res.dendrogram)

    def test_matches_exhaustive_average_linkage_oracle(self):
        rng = np.random.default_rng(66)
        for _ in range(25):
            n = int(rng.integers(4, 8))
            w = rng.random((n, n))
            w = (w + w.T) / 2
            np.fill_diagonal(w, 1.0)
            k = int(rng.integers(1, n + 1))
            got = agglomerate(sym(w), k).labels.labels
            expect = average_linkage_oracle(w, k)
            np.testing.assert_array_equal(co_membership(got), co_membership(expect))

    def test_five_point_hand_instance(self):
        w = np.array(
            [
                [1.00, 0.82, 0.10, 0.05, 0.12],
                [0.82, 1.00, 0.15, 0.08, 0.09],
                [0.10, 0.15, 1.00, 0.71, 0.64],
                [0.05, 0.08, 0.71, 1.00, 0.58],
                [0.12, 0.09, 0.64, 0.58, 1.00],
            ]
        )
        res = agglomerate(sym(w), 2)
        np.testing.assert_array_equal(co_membership(res.labels.labels),
                                      co_membership([0, 0, 1, 1, 1]))
        np.testing.assert_array_equal(res.labels.labels,
                                      average_linkage_oracle(w, 2))

    def test_permutation_invariance(self):
        rng = np.random.default_rng(67)
        for _ in range(10):
            n = 9
            w = rng.random((n, n))
            w = (w + w.T) / 2
            np.fill_diagonal(w, 1.0)
            base = agglomerate(sym(w), 3).labels.labels
            perm = rng.permutation(n)
            permuted = w[np.ix_(perm, perm)]
            got = agglomerate(sym(permuted), 3).labels.labels
            np.testing.assert_array_equal(
                co_membership(got), co_membership(base[perm])
            )

    def test_tie_break_lowest_index_pair(self):
        w = np.full((4, 4), 0.5)  # every merge is tied
        res = agglomerate(sym(w), 3)
        assert res.dendrogram[0][:2] == (0, 1)

    def test_linkage_variants(self):
        rng = np.random.default_rng(68)
        w = rng.random((6, 6))
        w = (w + w.T) / 2
        for linkage in ("average", "single", "complete"):
            res = agglomerate(sym(w), 2, linkage=linkage)
            assert res.labels.n_clusters == 2
        with pytest.raises(ConfigError):
            agglomerate(sym(w), 2, linkage="ward")

    def test_k_out_of_range(self):
        w = sym(np.eye(3))
        with pytest.raises(ConfigError):
            agglomerate(w, 4)
        with pytest.raises(ConfigError):
            agglomerate(w, 0)
