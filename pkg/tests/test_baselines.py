import numpy as np
import pytest

from models import CLUSTERERS, get_clusterer
from models.boost_kmeans import bkm_cluster
from models.lloyd import kmeanspp, lloyd
from models.lvq import lvq, lvq_rate, lvq_update
from models.minibatch import batch_size_for, minibatch
from models.seeding import assign_to_seeds, init_centroids, init_labels, random_seeds
from src.loader import Dataset, make_blobs
from src.metrics import average_distortion, entropy
from src.runner import ClusterConfig
from src.state import build_state
from src.utils import as_rng, cluster_means, nearest_centroid, repair_empty


class TestLloyd:

    def test_singletons_are_a_fixed_point(self):
        ds = make_blobs(n=12, d=3, k=2, seed=0)
        state, log = lloyd(ds, ClusterConfig('lloyd', k=12))
        assert log.passes == 1
        assert log[-1].moves == 0
        assert average_distortion(ds, state) == pytest.approx(0.0, abs=1e-12)

    def test_two_blobs_from_one_seed_each(self, partition_equal):
        ds = make_blobs(n=80, d=2, k=2, seed=1, centers=[[0.0, 0.0], [30.0, 0.0]])
        seeds = [int(np.flatnonzero(ds.labels == 0)[0]), int(np.flatnonzero(ds.labels == 1)[0])]
        state, log = lloyd(ds, ClusterConfig('lloyd', k=2), labels=assign_to_seeds(ds, seeds))
        assert partition_equal(state.label, ds.labels)
        assert log.passes <= 2

    def test_distortion_never_increases(self):
        ds = make_blobs(n=500, d=8, k=12, seed=2, separation=1.5)
        _, log = lloyd(ds, ClusterConfig('lloyd', k=12, seed=2))
        curve = np.array(log.distortions())
        assert (np.diff(curve) <= 1e-9 * curve[0]).all()
        assert log[-1].moves == 0

    def test_kmeanspp_is_lloyd_from_kpp_seeds(self):
        ds = make_blobs(n=300, d=4, k=6, seed=3, separation=2.0)
        cfg = ClusterConfig('kmeanspp', k=6, seed=3)
        pp_state, pp_log = kmeanspp(ds, cfg)
        l_state, _ = lloyd(ds, cfg.derive(algorithm='lloyd', init='kpp'))
        np.testing.assert_array_equal(pp_state.label, l_state.label)

        start = build_state(ds, init_labels(ds, 6, 'kpp', as_rng(3)), 6)
        assert pp_log[0].distortion == pytest.approx(average_distortion(ds, start), rel=1e-9)

    def test_kmeanspp_with_k_equal_n(self):
        ds = make_blobs(n=15, d=2, k=3, seed=4)
        state, _ = kmeanspp(ds, ClusterConfig('kmeanspp', k=15))
        assert average_distortion(ds, state) == pytest.approx(0.0, abs=1e-12)

    def test_repair_takes_the_farthest_point_of_the_largest_cluster(self):
        X = np.array([[0.0], [1.0], [2.0], [9.0], [20.0]])
        labels = np.array([0, 0, 0, 0, 1])
        assert repair_empty(X, labels, 3) == 1
        np.testing.assert_array_equal(labels, [0, 0, 0, 2, 1])


class TestMiniBatch:

    def test_batch_size(self):
        assert batch_size_for(1000, 0.10) == 100
        assert batch_size_for(1001, 0.10) == 101
        assert batch_size_for(5, 0.01) == 1

    def test_work_per_pass(self):
        ds = make_blobs(n=1000, d=4, k=8, seed=5, separation=2.0)
        _, log = minibatch(ds, ClusterConfig('minibatch', k=8, seed=5, max_passes=5))
        assert all(e.gain_evaluations == 100 * 8 for e in log if e.pass_index > 0)

    def test_full_batch_pass_is_a_lloyd_pass(self):
        ds = make_blobs(n=400, d=5, k=6, seed=6, separation=3.0)
        mb, _ = minibatch(ds, ClusterConfig('minibatch', k=6, seed=6, max_passes=1,
                                            minibatch_fraction=1.0))
        ll, _ = lloyd(ds, ClusterConfig('lloyd', k=6, seed=6, max_passes=1))
        np.testing.assert_array_equal(mb.label, ll.label)

    def test_starts_from_the_seed_samples(self):
        ds = make_blobs(n=300, d=3, k=5, seed=6, separation=2.0)
        centroids, labels = init_centroids(ds, 5, 'rnd', as_rng(6))
        seeds = random_seeds(ds, 5, as_rng(6))
        np.testing.assert_array_equal(centroids, ds.matrix[seeds])
        np.testing.assert_array_equal(labels, assign_to_seeds(ds, seeds))

        centroids, labels = init_centroids(ds, 5, 'none', as_rng(6))
        np.testing.assert_allclose(centroids, cluster_means(ds.matrix, labels, 5))

    def test_immediate_updates(self):
        ds = make_blobs(n=600, d=4, k=5, seed=7, separation=4.0)
        state, log = minibatch(ds, ClusterConfig('minibatch', k=5, seed=7, minibatch_immediate=True))
        assert state.size.sum() == ds.n
        assert (state.size > 0).all()
        assert log.final_distortion < log[0].distortion


class TestLVQ:

    def test_rate_schedule(self):
        cfg = ClusterConfig('lvq')
        assert lvq_rate(cfg, 0) == pytest.approx(0.01)
        assert lvq_rate(cfg, 10) == pytest.approx(0.006)
        assert lvq_rate(cfg, 1000) == pytest.approx(1e-4)

    def test_update_moves_toward_the_sample(self):
        rng = np.random.default_rng(8)
        for _ in range(100):
            c, x, rate = rng.normal(size=6), rng.normal(size=6), rng.uniform(0, 1)
            moved = lvq_update(c, x, rate)
            np.testing.assert_allclose(np.linalg.norm(moved - x),
                                       (1 - rate) * np.linalg.norm(c - x), rtol=1e-12)

    def test_zero_rate_keeps_the_seeds(self):
        ds = make_blobs(n=200, d=3, k=4, seed=9, separation=2.0)
        cfg = ClusterConfig('lvq', k=4, seed=9, lvq_rate0=0.0, lvq_rate_min=0.0)
        state, log = lvq(ds, cfg)

        expected, _ = nearest_centroid(ds.matrix, ds.matrix[random_seeds(ds, 4, as_rng(9))])
        np.testing.assert_array_equal(state.label, expected)
        assert log.passes == 1


class TestHarness:

    def test_registry(self):
        assert set(CLUSTERERS) == {'bkm', 'bkm-fast', 'lloyd', 'kmeanspp', 'minibatch', 'lvq'}
        with pytest.raises(ValueError):
            get_clusterer('kmedoids')

    @pytest.mark.parametrize('algorithm', sorted(CLUSTERERS))
    def test_every_clusterer_returns_a_valid_state(self, algorithm):
        ds = make_blobs(n=300, d=5, k=6, seed=10, separation=2.0)
        state, log = get_clusterer(algorithm)(ds, ClusterConfig(algorithm, k=6, seed=10))

        assert state.size.sum() == ds.n
        assert (state.size > 0).all()
        rebuilt = build_state(ds, state.label, 6)
        np.testing.assert_allclose(state.composite, rebuilt.composite, rtol=1e-9, atol=1e-9)
        assert ds.n * average_distortion(ds, state) + state.score == pytest.approx(ds.energy, rel=1e-9)
        assert log.final_distortion == pytest.approx(average_distortion(ds, state), rel=1e-6)
        assert state.evaluations > 0

    def test_duplicate_points(self):
        ds = Dataset(np.repeat(np.eye(3), 10, axis=0))
        for algorithm in sorted(CLUSTERERS):
            state, _ = get_clusterer(algorithm)(ds, ClusterConfig(algorithm, k=5, seed=1))
            assert (state.size > 0).all()


@pytest.mark.slow
class TestComparisons:

    def test_minibatch_ends_above_boost_kmeans(self):
        ds = make_blobs(n=5000, d=32, k=64, seed=11, separation=1.5)
        bkm_state, _ = bkm_cluster(ds, ClusterConfig('bkm', k=64, seed=11))
        mb_state, _ = minibatch(ds, ClusterConfig('minibatch', k=64, seed=11))
        assert average_distortion(ds, mb_state) > average_distortion(ds, bkm_state)

    def test_lvq_entropy_worse_than_boost_kmeans(self):
        ds = make_blobs(n=3000, d=16, k=30, seed=12, separation=2.0)
        bkm_state, _ = bkm_cluster(ds, ClusterConfig('bkm', k=30, seed=12))
        lvq_state, _ = lvq(ds, ClusterConfig('lvq', k=30, seed=12))
        assert entropy(lvq_state, ds.labels) >= entropy(bkm_state, ds.labels)
