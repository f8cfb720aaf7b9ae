import numpy as np
from tqdm import tqdm

from models.minibatch import _full_assignment
from models.seeding import init_centroids
from src.metrics import state_distortion
from src.runner import IterationLog, Stopwatch
from src.state import build_state
from src.utils import as_rng


def lvq(ds, cfg):
    """ Online learning vector quantization: every visited sample pulls its
    nearest centroid toward itself, c <- c + rate * (x - c). The rate is
    constant within a pass and decays linearly from pass to pass """
    cfg.validate(ds.n)
    rng = as_rng(cfg.seed)
    clock = Stopwatch()
    X, k = ds.matrix, cfg.k

    # Seeds themselves are the starting centroids
    centroids, labels = init_centroids(ds, k, cfg.init, rng)
    state = build_state(ds, labels, k)

    log = IterationLog(verbose=cfg.verbose, name=cfg.algorithm)
    log.record(0, state_distortion(ds, state), 0, 0, clock.lap())

    evaluations = 0
    for p in tqdm(range(1, cfg.max_passes+1), desc=cfg.algorithm, disable=not cfg.verbose):
        rate = lvq_rate(cfg, p - 1)
        cnorm = np.einsum('ij,ij->i', centroids, centroids)

        for i in rng.permutation(ds.n):
            x = X[i]
            j = int(np.argmin(cnorm - 2.0 * (centroids @ x)))
            centroids[j] = lvq_update(centroids[j], x, rate)
            cnorm[j] = centroids[j] @ centroids[j]
        evaluations += ds.n * k
        work_ms = clock.lap()

        # Full assignment for the log and the stopping test; not timed
        changed, state = _full_assignment(ds, centroids, state, k)
        state.evaluations = evaluations
        log.record(p, state_distortion(ds, state), changed, ds.n * k, work_ms)
        clock.lap()

        if changed == 0:
            break

    return state, log

def lvq_rate(cfg, p):
    """ Rate of pass p (0-based): rate0 - decay * p, floored at rate_min """
    return max(cfg.lvq_rate0 - cfg.lvq_decay * p, min(cfg.lvq_rate_min, cfg.lvq_rate0))

def lvq_update(c, x, rate):
    return c + rate * (x - c)
