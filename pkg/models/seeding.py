import numpy as np

from src.errors import BadConfig
from src.utils import as_rng, cluster_means, nearest_centroid


def init_labels(ds, k, mode, seed):
    """ Initial labeling of every sample.

    none -- uniformly random labels; the first k samples of a random
            permutation claim one label each so no cluster starts empty
    rnd  -- k distinct random samples as seeds, nearest-seed assignment
    kpp  -- k-means++ D^2 seeding, nearest-seed assignment
    """
    if not 1 <= k <= ds.n:
        raise BadConfig('k=%d must lie in [1, n=%d]' % (k, ds.n))
    rng = as_rng(seed)

    if mode == 'none':
        labels = rng.integers(0, k, size=ds.n)
        labels[rng.permutation(ds.n)[:k]] = np.arange(k)
        return labels
    return assign_to_seeds(ds, draw_seeds(ds, k, mode, rng))

def init_centroids(ds, k, mode, seed):
    """ Starting centroids and labels for the centroid-based clusterers. With
    rnd and kpp the centroids are the seed samples themselves; with none
    they are the means of the random labeling """
    if mode == 'none':
        labels = init_labels(ds, k, mode, seed)
        return cluster_means(ds.matrix, labels, k), labels
    if not 1 <= k <= ds.n:
        raise BadConfig('k=%d must lie in [1, n=%d]' % (k, ds.n))
    seeds = draw_seeds(ds, k, mode, as_rng(seed))
    return ds.matrix[seeds].copy(), assign_to_seeds(ds, seeds)

def draw_seeds(ds, k, mode, rng):
    if mode == 'rnd':
        return random_seeds(ds, k, rng)
    if mode == 'kpp':
        return kpp_seeds(ds, k, rng)
    raise BadConfig('Unknown init mode %r' % mode)

def random_seeds(ds, k, seed):
    """ Indexes of k distinct samples drawn uniformly """
    return as_rng(seed).choice(ds.n, size=k, replace=False)

def kpp_seeds(ds, k, seed, first=None):
    """ k-means++ seeding: each next seed is drawn with probability
    proportional to its squared distance to the closest seed so far.
    `first` forces the first seed instead of drawing it uniformly """
    rng = as_rng(seed)
    X, xx = ds.matrix, ds.sqnorms

    seeds = [int(rng.integers(ds.n)) if first is None else int(first)]
    closest = ((X - X[seeds[0]]) ** 2).sum(axis=1)

    while len(seeds) < k:
        total = closest.sum()

        # Fewer distinct points than seeds: fall back to uniform among the rest
        if total <= 0:
            rest = np.setdiff1d(np.arange(ds.n), seeds)
            seeds.append(int(rng.choice(rest)))
        else:
            seeds.append(int(rng.choice(ds.n, p=closest / total)))

        d2 = xx - 2.0 * (X @ X[seeds[-1]]) + xx[seeds[-1]]
        closest = np.minimum(closest, np.maximum(d2, 0.0))
        closest[seeds] = 0.0

    return np.array(seeds, dtype=np.int64)

def assign_to_seeds(ds, seeds):
    """ Label every sample by its nearest seed; each seed keeps its own label
    so duplicate points cannot leave a cluster empty """
    labels, _ = nearest_centroid(ds.matrix, ds.matrix[seeds], ds.sqnorms)
    labels[seeds] = np.arange(len(seeds))
    return labels
