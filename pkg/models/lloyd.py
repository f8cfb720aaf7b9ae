from tqdm import tqdm

from models.seeding import init_labels
from src.metrics import state_distortion
from src.runner import IterationLog, Stopwatch
from src.state import build_state
from src.utils import as_rng, nearest_centroid, repair_empty


def lloyd(ds, cfg, labels=None):
    """ Traditional k-means: alternate assigning every sample to its nearest
    centroid and recomputing the centroids, until no label changes. Starting
    `labels` bypass the configured initialization """
    cfg.validate(ds.n)
    rng = as_rng(cfg.seed)
    clock = Stopwatch()
    X, k = ds.matrix, cfg.k

    if labels is None:
        labels = init_labels(ds, k, cfg.init, rng)
    state = build_state(ds, labels, k)

    log = IterationLog(verbose=cfg.verbose, name=cfg.algorithm)
    log.record(0, state_distortion(ds, state), 0, 0, clock.lap())

    evaluations = 0
    for p in tqdm(range(1, cfg.max_passes+1), desc=cfg.algorithm, disable=not cfg.verbose):

        # Assignment step against the current means
        assigned, _ = nearest_centroid(X, state.centroids(), ds.sqnorms)
        repair_empty(X, assigned, k)
        evaluations += ds.n * k

        # Update step: means of the new partition
        changed = int((assigned != state.label).sum())
        state = build_state(ds, assigned, k)
        state.evaluations = evaluations
        log.record(p, state_distortion(ds, state), changed, ds.n * k, clock.lap())

        if changed == 0:
            break

    return state, log

def kmeanspp(ds, cfg):
    """ k-means++: D^2-weighted seeding followed by Lloyd iterations """
    return lloyd(ds, cfg.derive(init='kpp'))


if __name__ == '__main__':
    from src.loader import make_blobs
    from src.metrics import Metrics
    from src.runner import ClusterConfig

    evalu = Metrics()
    ds = make_blobs(n=2000, d=16, k=20, seed=3, separation=3.0)
    for algo in ['lloyd', 'kmeanspp']:
        state, log = (lloyd if algo == 'lloyd' else kmeanspp)(ds, ClusterConfig(algo, k=20))
        metrics_dict = evalu(ds, state, classes=ds.labels)
        for key in ['distortion', 'entropy']:
            print("{:<10} {:<12} {:<15}".format(algo, key, metrics_dict[key]))
        print("{:<10} {:<12} {:<15}".format(algo, 'passes', log.passes))
