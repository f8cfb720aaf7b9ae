import numpy as np
from boltons.iterutils import chunk_ranges


def as_rng(seed):
    """ Seeded generator from an int, or pass an existing Generator through """
    return np.random.default_rng(seed)

def sq_distances(X, C, x_sq=None):
    """ Squared l2 distances between rows of X and rows of C, clipped at 0.
    Uses the |x|^2 - 2x'c + |c|^2 expansion """
    if x_sq is None:
        x_sq = np.einsum('ij,ij->i', X, X)
    c_sq = np.einsum('ij,ij->i', C, C)
    d2 = x_sq[:, None] - 2.0 * (X @ C.T) + c_sq[None, :]
    return np.maximum(d2, 0.0, out=d2)

def nearest_centroid(X, C, x_sq=None, chunk_size=4096):
    """ For every row of X, the index of its nearest row of C (ties to the
    lowest index) and the squared distance to it. Chunked to bound memory """
    n = X.shape[0]
    labels = np.empty(n, dtype=np.int64)
    dists = np.empty(n, dtype=np.float64)
    if x_sq is None:
        x_sq = np.einsum('ij,ij->i', X, X)

    for start, stop in chunk_ranges(n, chunk_size):
        d2 = sq_distances(X[start:stop], C, x_sq[start:stop])
        labels[start:stop] = d2.argmin(axis=1)
        dists[start:stop] = d2[np.arange(stop - start), labels[start:stop]]

    return labels, dists

def cluster_sums(X, labels, k):
    """ Composite vectors and sizes of a labeling, accumulated in float64 """
    sums = np.zeros((k, X.shape[1]), dtype=np.float64)
    np.add.at(sums, labels, X)
    sizes = np.bincount(labels, minlength=k).astype(np.int64)
    return sums, sizes

def cluster_means(X, labels, k, previous=None):
    """ Cluster means; an empty cluster keeps its previous centroid (or zeros) """
    sums, sizes = cluster_sums(X, labels, k)
    means = sums / np.maximum(sizes, 1)[:, None]
    if previous is not None:
        means[sizes == 0] = previous[sizes == 0]
    return means

def repair_empty(X, labels, k):
    """ Give every empty cluster one member: the point farthest from its
    centroid within the currently largest cluster. Returns the number of
    repairs; labels are modified in place """
    repairs = 0
    sums, sizes = cluster_sums(X, labels, k)

    for empty in np.flatnonzero(sizes == 0):
        # Largest cluster donates its worst-fitting member
        donor = int(sizes.argmax())
        members = np.flatnonzero(labels == donor)
        centroid = sums[donor] / sizes[donor]
        far = members[np.argmax(((X[members] - centroid) ** 2).sum(axis=1))]

        labels[far] = empty
        sums[donor] -= X[far]
        sums[empty] += X[far]
        sizes[donor] -= 1
        sizes[empty] += 1
        repairs += 1

    return repairs
