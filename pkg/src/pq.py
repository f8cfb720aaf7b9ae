""" Product quantization with asymmetric distance computation (ADC).

The d dimensions are cut into m contiguous ranges; each range gets its own
codebook of k_sub centroids, trained by any of the clusterers. A database
vector is stored as m one-byte codes, and a query is compared against the
codes through m lookup tables of query-to-sub-centroid squared distances.
"""
import json
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from boltons.iterutils import chunked, windowed
from tqdm import tqdm

from src.errors import BadSubdiv, DimMismatch, EmptyFile, FormatError, Truncated
from src.loader import read_fvecs, write_fvecs
from src.runner import ClusterConfig
from src.utils import nearest_centroid


@dataclass
class Codebook:
    """ m sub-codebooks of k_sub centroids, stored as an m x k_sub x (d/m) array """
    centroids: np.ndarray

    def __repr__(self):
        return 'Codebook of %d x %d centroids over %d dimensions' % (self.m, self.k_sub, self.d)

    @property
    def m(self):
        return self.centroids.shape[0]

    @property
    def k_sub(self):
        return self.centroids.shape[1]

    @property
    def dsub(self):
        return self.centroids.shape[2]

    @property
    def d(self):
        return self.m * self.dsub

    @property
    def subdims(self):
        return subdims(self.d, self.m)

    def reconstruct(self, codes):
        """ Vectors rebuilt from their codes, n x d """
        codes = np.asarray(codes, dtype=np.int64)
        return np.hstack([self.centroids[r][codes[:, r]] for r in range(self.m)])


def subdims(d, m):
    """ m contiguous, order-preserving (lo, hi) ranges covering [0, d) """
    if m < 1 or d % m:
        raise BadSubdiv('d=%d is not divisible into m=%d sub-spaces' % (d, m))
    return list(windowed(range(0, d + 1, d // m), 2))


def pq_train(train, m, k_sub=256, inner='bkm', seed=0, workers=1):
    """ Train one codebook per sub-space by clustering its columns with k_sub
    clusters. `inner` is an algorithm name or a ClusterConfig template; the
    sub-space r run uses seed + r. Sub-spaces may train concurrently """
    from models import get_clusterer

    ranges = subdims(train.d, m)
    if not 2 <= k_sub <= 256:
        raise ValueError('k_sub must lie in [2, 256] for one-byte codes, got %d' % k_sub)
    if train.n < k_sub:
        raise ValueError('%d training vectors for %d centroids per sub-space' % (train.n, k_sub))

    template = inner if isinstance(inner, ClusterConfig) else ClusterConfig(inner, k=k_sub)

    def train_sub(r):
        lo, hi = ranges[r]
        cfg = template.derive(k=k_sub, k0=None, seed=seed + r, verbose=False)
        state, _ = get_clusterer(cfg.algorithm)(train.project(lo, hi), cfg)
        return state.centroids()

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            books = list(pool.map(train_sub, range(m)))
    else:
        books = [train_sub(r) for r in tqdm(range(m), desc='pq train',
                                            disable=not template.verbose)]

    # Duplicate centroids waste codes but are not fatal
    for r, book in enumerate(books):
        distinct = np.unique(book, axis=0).shape[0]
        if distinct < k_sub:
            warnings.warn('sub-codebook %d has %d duplicate centroid(s)' % (r, k_sub - distinct))

    return Codebook(np.stack(books))


def pq_encode(cb, ds):
    """ n x m uint8 codes: nearest sub-centroid per sub-vector, ties to the
    lowest index """
    if ds.d != cb.d:
        raise DimMismatch('codebook covers %d dimensions, data has %d' % (cb.d, ds.d))
    codes = np.empty((ds.n, cb.m), dtype=np.uint8)
    for r, (lo, hi) in enumerate(cb.subdims):
        codes[:, r], _ = nearest_centroid(ds.matrix[:, lo:hi], cb.centroids[r])
    return codes


def adc_tables(cb, query):
    """ m x k_sub squared distances from each query sub-vector to every sub-centroid """
    query = np.asarray(query, dtype=np.float64)
    if query.shape != (cb.d,):
        raise DimMismatch('query has shape %s, codebook covers %d dimensions'
                          % (query.shape, cb.d))
    sub = query.reshape(cb.m, 1, cb.dsub)
    return ((cb.centroids - sub) ** 2).sum(axis=2)

def adc_scores(cb, codes, query):
    """ Approximate squared distance from the query to every encoded vector """
    tables = adc_tables(cb, query)
    return tables[np.arange(cb.m), codes.astype(np.int64)].sum(axis=1)

def adc_search(cb, codes, query, topR):
    """ topR ids by ascending ADC score, ties to the lower id """
    if not 1 <= topR <= codes.shape[0]:
        raise ValueError('topR=%d must lie in [1, n=%d]' % (topR, codes.shape[0]))
    scores = adc_scores(cb, codes, query)
    if topR < len(scores):
        # Shortlist with argpartition, then a stable sort on (score, id)
        cut = np.partition(scores, topR - 1)[topR - 1]
        shortlist = np.flatnonzero(scores <= cut)
    else:
        shortlist = np.arange(len(scores))
    order = np.lexsort((shortlist, scores[shortlist]))
    return shortlist[order][:topR]

def adc_search_batch(cb, codes, queries, topR, batch_size=100, verbose=False):
    """ adc_search over the rows of a query matrix, n_queries x topR """
    queries = getattr(queries, 'matrix', queries)
    results = []
    for batch in tqdm(chunked(range(len(queries)), batch_size), desc='adc search',
                      disable=not verbose):
        results.extend(adc_search(cb, codes, queries[q], topR) for q in batch)
    return np.array(results, dtype=np.int64)


def save_codebook(cb, dirname):
    """ header.json (m, k_sub, d) plus one .fvecs file per sub-codebook """
    os.makedirs(dirname, exist_ok=True)
    with open(os.path.join(dirname, 'header.json'), 'w') as f:
        json.dump({'m': cb.m, 'k_sub': cb.k_sub, 'd': cb.d}, f)
    for r in range(cb.m):
        write_fvecs(cb.centroids[r], os.path.join(dirname, 'sub_%03d.fvecs' % r))

def load_codebook(dirname):
    with open(os.path.join(dirname, 'header.json')) as f:
        header = json.load(f)
    m, k_sub, d = header['m'], header['k_sub'], header['d']
    subdims(d, m)

    books = []
    for r in range(m):
        book = read_fvecs(os.path.join(dirname, 'sub_%03d.fvecs' % r)).matrix
        if book.shape != (k_sub, d // m):
            raise DimMismatch('sub-codebook %d has shape %s, header says (%d, %d)'
                              % (r, book.shape, k_sub, d // m))
        books.append(book)
    return Codebook(np.stack(books))

def save_codes(codes, path):
    """ 8-byte header (n, m as little-endian uint32), then the codes row-major """
    codes = np.ascontiguousarray(codes, dtype=np.uint8)
    with open(path, 'wb') as f:
        f.write(np.array(codes.shape, dtype='<u4').tobytes())
        f.write(codes.tobytes())

def load_codes(path):
    raw = np.fromfile(path, dtype=np.uint8)
    if raw.size == 0:
        raise EmptyFile('%s is empty' % path)
    if raw.size < 8:
        raise Truncated('%s: %d bytes, shorter than the header' % (path, raw.size))
    n, m = (int(v) for v in raw[:8].view('<u4'))
    if raw.size != 8 + n * m:
        raise (Truncated if raw.size < 8 + n * m else FormatError)(
            '%s: header declares %d x %d codes, payload holds %d bytes' % (path, n, m, raw.size - 8))
    return raw[8:].reshape(n, m).copy()
