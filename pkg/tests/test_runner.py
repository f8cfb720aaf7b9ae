import pytest

from src.errors import BadConfig
from src.runner import ClusterConfig, IterationLog


class TestClusterConfig:

    @pytest.mark.parametrize('algorithm, init', [('bkm', 'none'), ('bkm-fast', 'none'),
                                                 ('kmeanspp', 'kpp'), ('lloyd', 'rnd'),
                                                 ('minibatch', 'rnd'), ('lvq', 'rnd')])
    def test_default_init(self, algorithm, init):
        assert ClusterConfig(algorithm).init == init

    def test_derive_takes_the_new_algorithms_default_init(self):
        cfg = ClusterConfig('bkm', k=8, seed=3)
        assert cfg.derive(algorithm='lloyd').init == 'rnd'
        assert cfg.derive(algorithm='kmeanspp').init == 'kpp'
        assert cfg.derive(algorithm='lloyd').derive(algorithm='bkm-fast').init == 'none'
        assert cfg.derive(algorithm='lloyd').k == 8

    def test_derive_keeps_a_chosen_init(self):
        cfg = ClusterConfig('bkm', k=8, init='kpp')
        assert cfg.derive(algorithm='lloyd').init == 'kpp'
        assert ClusterConfig('bkm').derive(algorithm='lloyd', init='none').init == 'none'
        assert ClusterConfig('lloyd', init='rnd').derive(k=4).init == 'rnd'

    def test_derive_revalidates(self):
        with pytest.raises(BadConfig):
            ClusterConfig('bkm', k=8).derive(k0=9)

    def test_k_above_n(self):
        with pytest.raises(BadConfig):
            ClusterConfig('bkm', k=8).validate(5)


def test_log_passes_must_increase():
    log = IterationLog()
    log.record(0, 2.0, 0, 0, 0.0)
    with pytest.raises(ValueError):
        log.record(0, 1.0, 3, 10, 0.0)
