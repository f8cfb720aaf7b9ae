""" Direct k-way Boost k-means.

Samples are visited in a fresh random order every pass; each one is moved
to the cluster that increases I1* the most (or, for the fast variant, to the
first candidate found that increases it at all). No centroid is ever stored:
the state is the set of composite vectors, so a move costs O(d). The run
stops after a pass without any accepted move, which is exactly the point
where no single-sample move can improve the objective.
"""
import numpy as np
from tqdm import tqdm

from models.seeding import init_labels
from src.metrics import state_distortion
from src.objective import MoveGain, apply_move, candidate_gains
from src.runner import IterationLog, Stopwatch
from src.state import build_state
from src.utils import as_rng


def bkm_cluster(ds, cfg, labels=None):
    """ Run Boost k-means to convergence or cfg.max_passes. Starting `labels`
    bypass the configured initialization (used by refinement) """
    cfg.validate(ds.n)
    rng = as_rng(cfg.seed)
    clock = Stopwatch()

    # Initial partition; the composites are all the state there is
    if labels is None:
        labels = init_labels(ds, cfg.k, cfg.init, rng)
    state = build_state(ds, labels, cfg.k)

    log = IterationLog(verbose=cfg.verbose, name=cfg.algorithm)
    log.record(0, state_distortion(ds, state), 0, 0, clock.lap())

    seek = bkm_pass_fast if cfg.algorithm == 'bkm-fast' else bkm_pass
    for p in tqdm(range(1, cfg.max_passes+1), desc=cfg.algorithm, disable=not cfg.verbose):

        # Pruning only once samples stop travelling far
        k0 = cfg.k0 if cfg.k0 is not None and p > cfg.k0_after else None

        before = state.evaluations
        moves = seek(state, ds, rng, k0)

        # Epoch-end recompute bounds rounding drift of the incremental updates
        state.refresh(ds)
        log.record(p, state_distortion(ds, state), moves,
                   state.evaluations - before, clock.lap())

        if moves == 0:
            break

    return state, log

def bkm_pass(state, ds, rng, k0=None):
    """ One pass of best-move seeking. Returns the number of accepted moves """
    X, XX = ds.matrix, ds.sqnorms
    everyone = np.arange(state.k)
    moves = 0

    for i in rng.permutation(ds.n):
        u = int(state.label[i])
        if state.size[u] < 2:
            continue

        x = X[i]
        xd = state.composite @ x
        candidates = everyone if k0 is None else _nearest_ids(state, xd, k0, u)
        candidates = candidates[candidates != u]
        if candidates.size == 0:
            continue

        delta, floor = candidate_gains(state, x, XX[i], u, candidates, xd)
        state.evaluations += candidates.size

        # argmax returns the first maximum: lowest id on ties
        j = int(delta.argmax())
        if delta[j] > floor[j]:
            apply_move(state, ds, MoveGain(int(i), u, int(candidates[j]), float(delta[j]),
                                           float(floor[j]), state.revision))
            moves += 1

    return moves

def bkm_pass_fast(state, ds, rng, k0=None):
    """ One pass accepting the first improving candidate, candidates examined
    in a random order. Returns the number of accepted moves """
    X, XX = ds.matrix, ds.sqnorms
    everyone = np.arange(state.k)
    moves = 0

    for i in rng.permutation(ds.n):
        u = int(state.label[i])
        if state.size[u] < 2:
            continue

        x = X[i]
        xd = state.composite @ x
        candidates = everyone if k0 is None else _nearest_ids(state, xd, k0, u)
        candidates = rng.permutation(candidates[candidates != u])

        delta, floor = candidate_gains(state, x, XX[i], u, candidates, xd)
        hits = np.flatnonzero(delta > floor)
        if hits.size == 0:
            state.evaluations += candidates.size
            continue

        j = int(hits[0])
        state.evaluations += j + 1
        apply_move(state, ds, MoveGain(int(i), u, int(candidates[j]), float(delta[j]),
                                       float(floor[j]), state.revision))
        moves += 1

    return moves

def prune_candidates(state, ds, i, k0):
    """ Ids of the k0 clusters whose centroids are nearest to sample i, plus
    the sample's own cluster, ascending """
    xd = state.composite @ ds.matrix[i]
    return _nearest_ids(state, xd, k0, int(state.label[i]))

def _nearest_ids(state, xd, k0, u):
    """ Top-k0 centroids by |C_r|^2 - 2 x'C_r (|x|^2 is common to all r) """
    if k0 >= state.k:
        return np.arange(state.k)
    dist = state.sqnorm / state.size ** 2 - 2.0 * xd / state.size
    nearest = np.argpartition(dist, k0 - 1)[:k0]
    return np.union1d(nearest, [u])


if __name__ == '__main__':
    from models import cluster
    from src.loader import make_blobs
    from src.runner import ClusterConfig

    ds = make_blobs(n=5000, d=32, k=64, seed=7, separation=4.0)
    runs = {'BKM(non)': ClusterConfig('bkm', k=64, init='none', verbose=True),
            'BKM(rnd)+Fast': ClusterConfig('bkm-fast', k=64, init='rnd', verbose=True),
            'BKM(non), k0=8': ClusterConfig('bkm', k=64, k0=8, verbose=True),
            'k-means': ClusterConfig('lloyd', k=64, verbose=True),
            'k-means++': ClusterConfig('kmeanspp', k=64, verbose=True)}

    for name, cfg in runs.items():
        _, log = cluster(ds, cfg)
        print("{:<16} {:<12.4f} {:<5} {:<12}".format(name, log.final_distortion,
                                                    log.passes, log.gain_evaluations))
