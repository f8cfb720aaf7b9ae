import numpy as np

from src.errors import MissingLabels


class Metrics:
    """ Methods for computing clustering quality

    Average distortion       mean squared distance of samples to the
                             centroid of their cluster
    Entropy                  size-weighted class impurity of the clusters,
                             normalized by log(c); 0 means class-pure
    Cluster size histogram   cluster size -> number of clusters of that size
    """
    def __init__(self):
        pass

    def __call__(self, *args, **kwargs):
        return self.evaluate(*args, **kwargs)

    def evaluate(self, ds, state, classes=None, num_classes=None):
        """ For a dataset and a partition of it, get metrics

        ds: Dataset
        state: ClusterState
        classes: class id per sample (defaults to ds.labels when asked for)

        Usage:
            >> from src.loader import make_blobs
            >> from models import cluster
            >> from src.runner import ClusterConfig
            >>
            >> ds = make_blobs(n=1000, d=8, k=10)
            >> state, log = cluster(ds, ClusterConfig('bkm', k=10))
            >> evalu = Metrics()
            >> evalu(ds, state, classes=ds.labels)
        """
        metric_dict = {'n': state.n,
                       'k': state.k,
                       'distortion': average_distortion(ds, state),
                       'score': state.score,
                       'size_histogram': size_histogram(state)}

        if classes is not None:
            metric_dict['entropy'] = entropy(state, classes, num_classes)

        return metric_dict


def average_distortion(ds, state):
    """ (1/n) sum_i |C_label(i) - x_i|^2, summed directly """
    centroids = state.centroids()
    residual = ds.matrix - centroids[state.label]
    return float(np.einsum('ij,ij->', residual, residual) / ds.n)

def state_distortion(ds, state):
    """ Average distortion through the identity n * distortion + I1* = E """
    return max(ds.energy - state.score, 0.0) / ds.n

def entropy(state, classes, num_classes=None):
    """ sum_r (n_r/n) * (-1/log c) * sum_i (n_r^i/n_r) log(n_r^i/n_r),
    with 0 log 0 = 0. Lower is better; the value lies in [0, 1] """
    if classes is None:
        raise MissingLabels('entropy needs a class id for every sample')
    classes = np.asarray(classes, dtype=np.int64)
    if classes.shape != state.label.shape:
        raise MissingLabels('%d class ids for %d samples' % (classes.size, state.n))

    c = num_classes if num_classes is not None else int(classes.max()) + 1
    if c < 2:
        raise ValueError('entropy needs at least 2 classes, got %d' % c)

    # Contingency table: clusters x classes
    table = np.zeros((state.k, c), dtype=np.float64)
    np.add.at(table, (state.label, classes), 1.0)
    sizes = table.sum(axis=1)

    # Per-cluster class entropy, 0 log 0 taken as 0
    p = table / np.maximum(sizes, 1.0)[:, None]
    with np.errstate(divide='ignore', invalid='ignore'):
        plogp = np.where(p > 0, p * np.log(p), 0.0)
    cluster_entropy = -plogp.sum(axis=1) / np.log(c)

    return float((sizes / sizes.sum() * cluster_entropy).sum())

def recall_at(results, groundtruth, R):
    """ Fraction of queries whose true nearest neighbor (first ground-truth id)
    shows up among the first R results """
    results = np.asarray(results)
    groundtruth = np.asarray(groundtruth)
    if groundtruth.ndim == 2:
        groundtruth = groundtruth[:, 0]
    if results.shape[1] < R:
        raise ValueError('result lists hold %d ids, fewer than R=%d' % (results.shape[1], R))

    hits = (results[:, :R] == groundtruth[:, None]).any(axis=1)
    return float(hits.mean())

def size_histogram(state):
    """ Cluster size -> number of clusters of that size """
    sizes, counts = np.unique(state.size, return_counts=True)
    return {int(s): int(c) for s, c in zip(sizes, counts)}


def avg_dicts(dicts_list):
    """ Average dictionaries together across their shared numeric keys """
    keys = [k for k in dicts_list[0]
            if all(isinstance(d.get(k), (int, float)) for d in dicts_list)]
    merged = {k: sum([d[k] for d in dicts_list])/len(dicts_list) for k in keys}
    return merged

def std_dicts(dicts_list):
    """ Population standard deviation across shared numeric keys """
    means = avg_dicts(dicts_list)
    return {k: float(np.sqrt(sum([(d[k] - m) ** 2 for d in dicts_list]) / len(dicts_list)))
            for k, m in means.items()}
