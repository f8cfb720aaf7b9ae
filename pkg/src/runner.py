import sys
import time
from dataclasses import dataclass, field, replace

from tqdm import tqdm

from src.errors import BadConfig


ALGORITHMS = ('bkm', 'bkm-fast', 'lloyd', 'kmeanspp', 'minibatch', 'lvq')
INITS = ('none', 'rnd', 'kpp')
PRIORITIES = ('size', 'spread')

DEFAULT_INIT = {'bkm': 'none', 'bkm-fast': 'none', 'kmeanspp': 'kpp'}


@dataclass
class ClusterConfig:
    """ Everything one clustering run depends on. Same config, same dataset,
    same seed: same labels """
    algorithm: str = 'bkm'
    k: int = 2
    init: str = None
    seed: int = 0
    max_passes: int = 130

    # Top-k0 candidate pruning, active once `k0_after` passes are done
    k0: int = None
    k0_after: int = 2

    minibatch_fraction: float = 0.10
    minibatch_immediate: bool = False

    lvq_rate0: float = 0.01
    lvq_decay: float = 4e-4
    lvq_rate_min: float = 1e-4

    # Bisecting only; each bisection runs at most bisect_passes passes
    split_priority: str = 'size'
    bisect_passes: int = 5
    bisect_workers: int = 1

    verbose: bool = False

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise BadConfig('Unknown algorithm %r, choose from %s' % (self.algorithm, ALGORITHMS))
        if self.init is None:
            self.init = DEFAULT_INIT.get(self.algorithm, 'rnd')
        if self.init not in INITS:
            raise BadConfig('Unknown init %r, choose from %s' % (self.init, INITS))
        if self.k < 2:
            raise BadConfig('k must be at least 2, got %d' % self.k)
        if self.k0 is not None and not 1 <= self.k0 <= self.k:
            raise BadConfig('k0 must lie in [1, k=%d], got %d' % (self.k, self.k0))
        if not 0 < self.minibatch_fraction <= 1:
            raise BadConfig('minibatch_fraction must lie in (0, 1], got %r' % self.minibatch_fraction)
        if self.max_passes < 1:
            raise BadConfig('max_passes must be positive, got %d' % self.max_passes)
        if self.lvq_rate0 < 0 or self.lvq_decay < 0 or self.lvq_rate_min < 0:
            raise BadConfig('LVQ rates must be non-negative')
        if self.split_priority not in PRIORITIES:
            raise BadConfig('Unknown split priority %r, choose from %s'
                            % (self.split_priority, PRIORITIES))
        if self.bisect_passes < 1:
            raise BadConfig('bisect_passes must be positive, got %d' % self.bisect_passes)
        if self.bisect_workers < 1:
            raise BadConfig('bisect_workers must be positive')

    def validate(self, n):
        """ Dataset-dependent checks """
        if self.k > n:
            raise BadConfig('k=%d exceeds the number of samples n=%d' % (self.k, n))
        return self

    def derive(self, **changes):
        """ Copy with some fields replaced (re-validated). A new algorithm
        brings its own default init unless the old init was a non-default
        choice or `init` is among the changes """
        switching = changes.get('algorithm', self.algorithm) != self.algorithm
        if switching and 'init' not in changes and \
                self.init == DEFAULT_INIT.get(self.algorithm, 'rnd'):
            changes['init'] = None
        return replace(self, **changes)


@dataclass(frozen=True)
class PassRecord:
    pass_index: int
    distortion: float
    moves: int
    gain_evaluations: int
    elapsed_ms: float


@dataclass
class IterationLog:
    """ Per-pass records of a run. Pass 0 is the initial partition """
    entries: list = field(default_factory=list)
    verbose: bool = False
    name: str = ''

    def __getitem__(self, idx):
        return self.entries[idx]

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    def __repr__(self):
        if not self.entries:
            return 'IterationLog (empty)'
        return ('IterationLog of %d passes, final distortion %f'
                % (self.entries[-1].pass_index, self.entries[-1].distortion))

    def record(self, pass_index, distortion, moves, gain_evaluations, elapsed_ms):
        """ Append one pass; pass indexes must strictly increase """
        if self.entries and pass_index <= self.entries[-1].pass_index:
            raise ValueError('pass %d logged after pass %d'
                             % (pass_index, self.entries[-1].pass_index))
        entry = PassRecord(int(pass_index), float(distortion), int(moves),
                           int(gain_evaluations), float(elapsed_ms))
        self.entries.append(entry)

        # Log progress
        if self.verbose:
            tqdm.write('%sPass: %d | Distortion: %f | Moves: %d | Gain evals: %d | ms: %.1f'
                       % (self.name + ' | ' if self.name else '', entry.pass_index,
                          entry.distortion, entry.moves, entry.gain_evaluations,
                          entry.elapsed_ms), file=sys.stderr)
        return entry

    def extend(self, other):
        """ Append another log's passes, renumbered to continue this one.
        The other log's pass 0 duplicates our last entry and is skipped """
        offset = self.entries[-1].pass_index if self.entries else 0
        for entry in other:
            if entry.pass_index == 0 and self.entries:
                continue
            self.record(entry.pass_index + offset, entry.distortion, entry.moves,
                        entry.gain_evaluations, entry.elapsed_ms)
        return self

    @property
    def passes(self):
        return self.entries[-1].pass_index if self.entries else 0

    @property
    def final_distortion(self):
        return self.entries[-1].distortion

    @property
    def gain_evaluations(self):
        return sum(e.gain_evaluations for e in self.entries)

    @property
    def elapsed_ms(self):
        return sum(e.elapsed_ms for e in self.entries)

    def distortions(self):
        return [e.distortion for e in self.entries]

    def first_pass_below(self, level):
        """ Index of the first pass whose distortion is <= level, or None """
        for e in self.entries:
            if e.distortion <= level:
                return e.pass_index
        return None


class Stopwatch:
    """ Milliseconds since the last lap """
    def __init__(self):
        self.last = time.perf_counter()

    def lap(self):
        now = time.perf_counter()
        elapsed, self.last = (now - self.last) * 1e3, now
        return elapsed


def viz_logs(logs, savepath=None):
    """ Plot distortion against pass for several runs (dict name -> log) """
    import matplotlib
    if savepath:
        matplotlib.use('Agg')
    import matplotlib.pyplot as plt

    # Initialize plot
    fig, (curve, evals) = plt.subplots(ncols=2, figsize=(11, 4))

    for name, log in logs.items():
        passes = [e.pass_index for e in log]

        # Distortion curve
        curve.plot(passes, log.distortions(), label=name)

        # Cumulative work
        total, cumulative = 0, []
        for e in log:
            total += e.gain_evaluations
            cumulative.append(total)
        evals.plot(passes, cumulative, label=name)

    curve.set_xlabel('Pass')
    curve.set_ylabel('Average distortion')
    curve.legend(loc='upper right')

    evals.set_xlabel('Pass')
    evals.set_ylabel('Gain evaluations (cumulative)')
    evals.set_yscale('symlog')

    fig.tight_layout()
    if savepath:
        fig.savefig(savepath)
        plt.close(fig)
    else:
        plt.show()
    return fig
