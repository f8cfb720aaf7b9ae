""" The I1* objective, its incremental single-move gain and move application.

Maximizing I1* = sum_r D_r'D_r / n_r is equivalent to minimizing k-means
distortion: n * distortion + I1* = E, with E the (constant) dataset energy.
"""
from dataclasses import dataclass

import numpy as np

from src.errors import BadLabel, SameCluster, StaleGain, WouldEmptyCluster

# Relative rounding floor: a gain counts as positive only above
# ROUNDING * (magnitude of the terms it was computed from).
ROUNDING = 1e-11


@dataclass(frozen=True)
class MoveGain:
    """ Change of I1* when `sample` moves from `source` to `target` """
    sample: int
    source: int
    target: int
    delta: float
    floor: float = 0.0
    revision: int = 0

    @property
    def improving(self):
        return self.delta > self.floor


def objective_score(state):
    """ I1* recomputed from the stored composite vectors """
    sqnorm = np.einsum('ij,ij->i', state.composite, state.composite)
    return float((sqnorm / state.size).sum())


def candidate_gains(state, x, xx, u, candidates, xd=None):
    """ Gains of moving x (x'x = xx) out of cluster u into each candidate.
    Returns (delta, floor) arrays; requires n_u >= 2. `xd` may carry the
    precomputed dot products x'D_r for all r.

    delta = (D_v+x)'(D_v+x)/(n_v+1) + (D_u-x)'(D_u-x)/(n_u-1)
            - D_v'D_v/n_v - D_u'D_u/n_u
    expanded so that only x'D_u, x'D_v and the cached D_r'D_r are needed.
    """
    if xd is None:
        xd_v = state.composite[candidates] @ x
        xd_u = float(state.composite[u] @ x)
    else:
        xd_v = xd[candidates]
        xd_u = float(xd[u])

    n_v = state.size[candidates]
    q_v = state.sqnorm[candidates]
    n_u = state.size[u]
    q_u = state.sqnorm[u]

    new_v = (q_v + 2.0 * xd_v + xx) / (n_v + 1)
    old_v = q_v / n_v
    new_u = (q_u - 2.0 * xd_u + xx) / (n_u - 1)
    old_u = q_u / n_u

    delta = (new_v - old_v) + (new_u - old_u)
    floor = ROUNDING * (old_v + old_u + xx)
    return delta, floor

def move_gain(state, ds, i, v):
    """ MoveGain of sample i into cluster v; the state is left untouched """
    u = int(state.label[i])
    if not 0 <= v < state.k:
        raise BadLabel('cluster %d outside [0, %d)' % (v, state.k))
    if u == v:
        raise SameCluster('sample %d already lies in cluster %d' % (i, v))
    if state.size[u] < 2:
        raise WouldEmptyCluster('moving sample %d would empty cluster %d' % (i, u))

    x = ds.matrix[i]
    delta, floor = candidate_gains(state, x, float(ds.sqnorms[i]), u, np.array([v]))
    state.evaluations += 1
    return MoveGain(int(i), u, int(v), float(delta[0]), float(floor[0]), state.revision)

def apply_move(state, ds, gain):
    """ Relocate gain.sample; composites, sizes, cached norms and score are
    updated incrementally in O(d) """
    if gain.revision != state.revision:
        raise StaleGain('gain computed at revision %d, state is at %d'
                        % (gain.revision, state.revision))
    i, u, v = gain.sample, gain.source, gain.target
    x = ds.matrix[i]

    state.composite[u] -= x
    state.composite[v] += x
    state.size[u] -= 1
    state.size[v] += 1
    state.sqnorm[u] = state.composite[u] @ state.composite[u]
    state.sqnorm[v] = state.composite[v] @ state.composite[v]

    state.label[i] = v
    state.score += gain.delta
    state.revision += 1
    return state

def best_move(state, ds, i, candidates=None):
    """ Improving move of sample i with the largest gain over `candidates`
    (all clusters by default), or None. Ties go to the lowest cluster id """
    u = int(state.label[i])
    if state.size[u] < 2:
        return None

    # Own cluster filtered out, ascending ids so argmax breaks ties low
    if candidates is None:
        candidates = np.arange(state.k)
    candidates = np.unique(np.asarray(candidates, dtype=np.int64))
    candidates = candidates[candidates != u]
    if candidates.size == 0:
        return None

    delta, floor = candidate_gains(state, ds.matrix[i], float(ds.sqnorms[i]), u, candidates)
    state.evaluations += candidates.size
    j = int(delta.argmax())
    if delta[j] <= floor[j]:
        return None
    return MoveGain(int(i), u, int(candidates[j]), float(delta[j]), float(floor[j]), state.revision)

def all_gains(state, ds):
    """ n x k matrix of single-move gains; the own cluster and moves out of
    singleton clusters are -inf. Used for exhaustive optimality scans """
    X, xx = ds.matrix, ds.sqnorms
    u = state.label
    xd = X @ state.composite.T

    n_u = state.size[u].astype(np.float64)
    q_u = state.sqnorm[u]
    xd_u = xd[np.arange(state.n), u]
    with np.errstate(divide='ignore', invalid='ignore'):
        out_u = (q_u - 2.0 * xd_u + xx) / (n_u - 1) - q_u / n_u

    gains = (state.sqnorm[None, :] + 2.0 * xd + xx[:, None]) / (state.size[None, :] + 1) \
            - (state.sqnorm / state.size)[None, :] + out_u[:, None]
    gains[np.arange(state.n), u] = -np.inf
    gains[n_u < 2] = -np.inf
    return gains

def improving_moves(state, ds):
    """ Number of samples that still have an improving single move """
    gains = all_gains(state, ds)
    u = state.label
    old = (state.sqnorm / state.size)
    floor = ROUNDING * (old[None, :] + old[u][:, None] + ds.sqnorms[:, None])
    return int((gains > floor).any(axis=1).sum())
