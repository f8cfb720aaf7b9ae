""" Clusterers sharing one interface: run(ds, cfg) -> (ClusterState, IterationLog) """
from models.bisecting import bisecting_cluster, refine
from models.boost_kmeans import bkm_cluster
from models.lloyd import kmeanspp, lloyd
from models.lvq import lvq
from models.minibatch import minibatch


CLUSTERERS = {'bkm': bkm_cluster,
              'bkm-fast': bkm_cluster,
              'lloyd': lloyd,
              'kmeanspp': kmeanspp,
              'minibatch': minibatch,
              'lvq': lvq}


def get_clusterer(algorithm):
    try:
        return CLUSTERERS[algorithm]
    except KeyError:
        raise ValueError('Unknown algorithm %r, choose from %s'
                         % (algorithm, sorted(CLUSTERERS))) from None

def cluster(ds, cfg, bisect=False, refine_after=False):
    """ Direct k-way run of cfg.algorithm, or bisecting with cfg.algorithm as
    the inner clusterer, optionally followed by k-way refinement. Refinement
    passes continue the numbering of the bisecting log """
    if not bisect:
        state, log = get_clusterer(cfg.algorithm)(ds, cfg)
    else:
        state, log = bisecting_cluster(ds, cfg)

    if refine_after:
        state, refined = refine(state, ds, cfg)
        log.extend(refined)

    return state, log
