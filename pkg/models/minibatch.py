import math

import numpy as np
from tqdm import tqdm

from models.seeding import init_centroids
from src.metrics import state_distortion
from src.runner import IterationLog, Stopwatch
from src.state import build_state
from src.utils import as_rng, cluster_sums, nearest_centroid, repair_empty


def minibatch(ds, cfg):
    """ Mini-Batch k-means: every pass draws ceil(fraction * n) samples,
    assigns them to their nearest centroid and pulls each centroid toward
    its batch members with a per-centroid 1/count learning rate (counts
    persist across passes). Labels come from a full assignment pass.

    Batch members are assigned against the centroids as they stood at the
    start of the batch; cfg.minibatch_immediate assigns each one against the
    live centroids instead. """
    cfg.validate(ds.n)
    rng = as_rng(cfg.seed)
    clock = Stopwatch()
    X, k = ds.matrix, cfg.k
    batch_size = batch_size_for(ds.n, cfg.minibatch_fraction)

    centroids, labels = init_centroids(ds, k, cfg.init, rng)
    state = build_state(ds, labels, k)
    counts = np.zeros(k, dtype=np.float64)

    log = IterationLog(verbose=cfg.verbose, name=cfg.algorithm)
    log.record(0, state_distortion(ds, state), 0, 0, clock.lap())

    evaluations = 0
    for p in tqdm(range(1, cfg.max_passes+1), desc=cfg.algorithm, disable=not cfg.verbose):
        batch = rng.choice(ds.n, size=batch_size, replace=False)

        if cfg.minibatch_immediate:
            _immediate_updates(X[batch], centroids, counts)
        else:
            assigned, _ = nearest_centroid(X[batch], centroids, ds.sqnorms[batch])

            # Sequential 1/count updates collapse to a running mean per centroid
            sums, hits = cluster_sums(X[batch], assigned, k)
            moved = hits > 0
            total = counts + hits
            centroids[moved] = ((counts[moved, None] * centroids[moved] + sums[moved])
                                / total[moved, None])
            counts = total
        evaluations += batch_size * k
        work_ms = clock.lap()

        # Full assignment for the log and the stopping test; not timed
        changed, state = _full_assignment(ds, centroids, state, k)
        state.evaluations = evaluations
        log.record(p, state_distortion(ds, state), changed, batch_size * k, work_ms)
        clock.lap()

        if changed == 0:
            break

    return state, log

def batch_size_for(n, fraction):
    return min(n, max(1, math.ceil(fraction * n)))

def _immediate_updates(batch, centroids, counts):
    """ Assign and update one sample at a time """
    cnorm = np.einsum('ij,ij->i', centroids, centroids)
    for x in batch:
        j = int(np.argmin(cnorm - 2.0 * (centroids @ x)))
        counts[j] += 1
        centroids[j] += (x - centroids[j]) / counts[j]
        cnorm[j] = centroids[j] @ centroids[j]

def _full_assignment(ds, centroids, state, k):
    """ Label every sample by its nearest centroid; returns (changed, state) """
    assigned, _ = nearest_centroid(ds.matrix, centroids, ds.sqnorms)
    repair_empty(ds.matrix, assigned, k)
    changed = int((assigned != state.label).sum())
    return changed, build_state(ds, assigned, k)
