import numpy as np
import pytest

from models.seeding import init_labels
from src.loader import Dataset
from src.state import build_state


@pytest.fixture
def make_instance():
    """ Factory of small random (Dataset, ClusterState) pairs; sizes drawn
    from n <= 64, d <= 8, k <= 8 unless given """
    def make(seed, n=None, d=None, k=None):
        rng = np.random.default_rng(seed)
        n = n or int(rng.integers(8, 65))
        d = d or int(rng.integers(1, 9))
        k = min(k or int(rng.integers(2, 9)), n)
        ds = Dataset(rng.normal(size=(n, d)) * rng.uniform(0.5, 5.0) + rng.normal(size=d))
        return ds, build_state(ds, init_labels(ds, k, 'none', rng), k)
    return make


@pytest.fixture
def square_blobs():
    """ Four tight 2-D blobs of 25 points at the corners of a 50 x 50 square """
    from src.loader import make_blobs
    centers = [[0.0, 0.0], [50.0, 0.0], [0.0, 50.0], [50.0, 50.0]]
    return make_blobs(n=100, d=2, k=4, seed=5, spread=1.0, centers=centers)


def same_partition(a, b):
    """ True when two labelings induce the same partition """
    a, b = np.asarray(a), np.asarray(b)
    pairs = set(zip(a.tolist(), b.tolist()))
    return len(pairs) == len(set(a.tolist())) == len(set(b.tolist()))


@pytest.fixture
def partition_equal():
    return same_partition
