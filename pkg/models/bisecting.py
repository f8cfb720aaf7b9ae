""" Bisecting clustering: k clusters from k-1 successive 2-way splits.

The cluster to split next is popped from a priority queue (largest first),
split by any k-way clusterer run with k = 2 on its members, and both halves
are pushed back. Because a split never revisits its neighbours, samples
near borders between earlier splits stay misassigned; `refine` repairs that
with direct k-way Boost k-means started from the bisecting labels.
"""
import heapq
import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from src.errors import BadConfig, InsufficientData, TooSmall
from src.runner import IterationLog, Stopwatch
from src.state import build_state
from src.utils import as_rng


class SplitQueue:
    """ Clusters waiting to be split, largest priority first, ties to the
    lower cluster id. Priority is the size, or with `spread` the average
    intra-cluster distortion """
    def __init__(self, priority='size'):
        self.priority = priority
        self.heap = []

    def __len__(self):
        return len(self.heap)

    def __repr__(self):
        return 'SplitQueue of %d clusters by %s' % (len(self.heap), self.priority)

    def push(self, cluster_id, size, sse=0.0):
        """ Enqueue a cluster; singletons cannot be split and are dropped """
        if size < 2:
            return False
        key = size if self.priority == 'size' else sse / size
        heapq.heappush(self.heap, (-key, cluster_id, size))
        return True

    def pop(self):
        """ (cluster_id, size) of the current top cluster """
        _, cluster_id, size = heapq.heappop(self.heap)
        return cluster_id, size


def bisect_cluster(ds, members, inner, seed):
    """ Split the given rows in two with `inner` run with k = 2. `inner` is
    a clusterer name, a ClusterConfig (its algorithm and settings are used)
    or a callable taking (Dataset, ClusterConfig) """
    first, second, _ = _bisect(ds, members, inner, seed)
    return first, second

def _bisect(ds, members, inner, seed):
    """ bisect_cluster, also returning the inner run's final state """
    members = np.asarray(members)
    if members.size < 2:
        raise TooSmall('cannot bisect %d member(s)' % members.size)

    cfg, run = _resolve(inner, seed)
    state, _ = run(ds.subset(members), cfg)
    return members[state.label == 0], members[state.label == 1], state

def _resolve(inner, seed):
    """ (config with k = 2, clusterer) from a name, config, or callable """
    from models import get_clusterer
    from src.runner import ClusterConfig

    if isinstance(inner, ClusterConfig):
        return inner.derive(k=2, k0=None, seed=seed), get_clusterer(inner.algorithm)
    if isinstance(inner, str):
        return ClusterConfig(inner, k=2, seed=seed), get_clusterer(inner)
    return ClusterConfig('bkm', k=2, seed=seed), inner


def bisecting_cluster(ds, cfg, k=None):
    """ k-1 bisections driven by a SplitQueue. cfg.algorithm is the inner
    clusterer; `k` overrides cfg.k (k = 1 returns the input as one cluster).
    The log holds the overall distortion after every bisection """
    k = cfg.k if k is None else k
    if not 1 <= k <= ds.n:
        raise BadConfig('k=%d must lie in [1, n=%d]' % (k, ds.n))
    rng = as_rng(cfg.seed)
    clock = Stopwatch()
    inner = cfg.derive(max_passes=min(cfg.max_passes, cfg.bisect_passes), verbose=False)

    labels = np.zeros(ds.n, dtype=np.int64)
    sizes, sse = [ds.n], [_sse(ds, np.arange(ds.n))]

    log = IterationLog(verbose=cfg.verbose, name='bisecting ' + cfg.algorithm)
    log.record(0, sum(sse) / ds.n, 0, 0, clock.lap())

    queue = SplitQueue(cfg.split_priority)
    queue.push(0, ds.n, sse[0])
    evaluations, bisections = 0, 0

    while len(sizes) < k:
        if not queue:
            raise InsufficientData('only singleton clusters left after %d of %d clusters'
                                   % (len(sizes), k))

        # Pop up to bisect_workers clusters; sequential by default
        width = min(cfg.bisect_workers, k - len(sizes), len(queue))
        popped = [queue.pop()[0] for _ in range(width)]
        seeds = [int(rng.integers(2 ** 63)) for _ in popped]
        jobs = [(np.flatnonzero(labels == r), inner, s) for r, s in zip(popped, seeds)]

        if width == 1:
            splits = [_bisect(ds, *jobs[0])]
        else:
            with ThreadPoolExecutor(max_workers=width) as pool:
                splits = list(pool.map(lambda job: _bisect(ds, *job), jobs))

        for r, (first, second, state) in zip(popped, splits):
            # First half keeps the id, second half gets the next free one
            new = len(sizes)
            labels[second] = new
            sizes[r] = first.size
            sizes.append(second.size)
            sse[r] = _sse(ds, first)
            sse.append(_sse(ds, second))
            queue.push(r, sizes[r], sse[r])
            queue.push(new, sizes[new], sse[new])

            evaluations += state.evaluations
            bisections += 1
            log.record(bisections, sum(sse) / ds.n, 1, state.evaluations, clock.lap())

    state = build_state(ds, labels, k)
    state.evaluations = evaluations
    return state, log

def _sse(ds, members):
    """ Sum of squared distances of the members to their mean """
    rows = ds.matrix[members]
    return float(max(ds.sqnorms[members].sum() - (rows.sum(axis=0) ** 2).sum() / len(members), 0.0))


def refine(state, ds, cfg):
    """ Direct k-way Boost k-means started from the given labels. The score
    can only go up, so the distortion can only go down """
    from models.boost_kmeans import bkm_cluster

    algorithm = 'bkm-fast' if cfg.algorithm == 'bkm-fast' else 'bkm'
    refined, log = bkm_cluster(ds, cfg.derive(algorithm=algorithm, k=state.k),
                               labels=state.label)
    refined.evaluations += state.evaluations
    return refined, log


def secting_cost(n, k, s=2):
    """ Comparisons spent by s-secting n samples down to k clusters with
    evenly sized splits: n * (s - 1) * log_s(k). Minimal at s = 2 """
    if n < 1 or k < 2 or s < 2:
        raise ValueError('secting_cost needs n >= 1, k >= 2, s >= 2')
    return n * (s - 1) * math.log(k) / math.log(s)


if __name__ == '__main__':
    from src.loader import make_blobs
    from src.runner import ClusterConfig

    ds = make_blobs(n=20000, d=32, k=256, seed=11, separation=3.0)
    for algo in ['bkm', 'lloyd', 'kmeanspp']:
        cfg = ClusterConfig(algo, k=256)
        bisected, log = bisecting_cluster(ds, cfg)
        refined, rlog = refine(bisected, ds, cfg)
        print("{:<10} {:<14.4f} {:<14.4f} {:<10.0f}".format(algo, log.final_distortion,
                                                            rlog.final_distortion, log.elapsed_ms))
