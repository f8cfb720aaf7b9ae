import numpy as np

from src.errors import BadLabel, EmptyCluster
from src.utils import cluster_sums


class ClusterState:
    """ Live partition of a Dataset into k non-empty clusters.

    Clusters are represented by their composite vectors D_r (sum of members)
    and sizes n_r; centroids D_r / n_r are derived on demand, never stored.
    `sqnorm[r]` caches D_r'D_r and `score` caches I1* = sum_r D_r'D_r / n_r,
    both maintained incrementally by objective.apply_move. `revision` counts
    mutations so that stale MoveGains can be detected, `evaluations` counts
    gain evaluations (or point-to-centroid comparisons for the baselines).
    """
    def __init__(self, label, composite, size):
        self.label = label
        self.composite = composite
        self.size = size
        self.sqnorm = np.einsum('ij,ij->i', composite, composite)
        self.score = float((self.sqnorm / size).sum())
        self.revision = 0
        self.evaluations = 0

    def __repr__(self):
        return ('ClusterState with %d clusters over %d samples (score %f)'
                % (self.k, self.n, self.score))

    def __len__(self):
        return self.n

    @property
    def k(self):
        return self.size.shape[0]

    @property
    def n(self):
        return self.label.shape[0]

    def centroids(self):
        """ All k centroids as a k x d matrix """
        return self.composite / self.size[:, None]

    def members(self, r):
        """ Sample indexes of cluster r """
        return np.flatnonzero(self.label == r)

    def copy(self):
        state = ClusterState.__new__(ClusterState)
        state.label = self.label.copy()
        state.composite = self.composite.copy()
        state.size = self.size.copy()
        state.sqnorm = self.sqnorm.copy()
        state.score = self.score
        state.revision = self.revision
        state.evaluations = self.evaluations
        return state

    def refresh(self, ds):
        """ Recompute composites, sizes and score from the labels, discarding
        any rounding drift accumulated by incremental moves """
        self.composite, self.size = cluster_sums(ds.matrix, self.label, self.k)
        self.sqnorm = np.einsum('ij,ij->i', self.composite, self.composite)
        self.score = float((self.sqnorm / self.size).sum())
        self.revision += 1
        return self


def build_state(ds, labels, k):
    """ ClusterState computed from scratch from a full labeling """
    labels = np.array(labels, dtype=np.int64, copy=True)
    if labels.shape != (ds.n,):
        raise BadLabel('%d labels for %d samples' % (labels.size, ds.n))

    # Every label in range, every cluster id present
    if labels.min() < 0 or labels.max() >= k:
        bad = np.flatnonzero((labels < 0) | (labels >= k))[0]
        raise BadLabel('sample %d has label %d, outside [0, %d)' % (bad, labels[bad], k))
    composite, size = cluster_sums(ds.matrix, labels, k)
    if (size == 0).any():
        raise EmptyCluster('cluster %d has no member' % np.flatnonzero(size == 0)[0])

    return ClusterState(labels, composite, size)

def centroid(state, r):
    """ C_r = D_r / n_r """
    if not 0 <= r < state.k:
        raise BadLabel('cluster %d outside [0, %d)' % (r, state.k))
    return state.composite[r] / state.size[r]
