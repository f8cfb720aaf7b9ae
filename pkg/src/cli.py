""" Benchmark harness.

    python -m src.cli cluster --input sift_base.fvecs --format fvecs --algo bkm \
        --k 1024 --bisect --refine --out-labels labels.csv --out-log log.csv
    python -m src.cli eval --input data.csv --format csv --labels labels.csv --classes
    python -m src.cli pq train --train sift_learn.fvecs --m 8 --ksub 256 --out codebook/
    python -m src.cli pq encode --codebook codebook/ --input sift_base.fvecs --out base.codes
    python -m src.cli pq search --codebook codebook/ --codes base.codes \
        --queries sift_query.fvecs --groundtruth sift_groundtruth.ivecs
    python -m src.cli bench --sweep k --values 64,128,256 --algos bkm,lloyd --bisect
    python -m src.cli plot --logs bkm.csv lloyd.csv --out curves.png

Every command prints one JSON object (bench: CSV) on standard output and
exits 0; module errors print `error: ...` on standard error and exit 1.
"""
import argparse
import csv
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from tqdm import tqdm

from models import cluster
from src.errors import ClusteringError, MissingLabels
from src.loader import (make_blobs, read_dataset, read_ivecs, read_labels, read_log,
                        write_labels, write_log)
from src.metrics import Metrics, avg_dicts, recall_at, std_dicts
from src.pq import (adc_search_batch, load_codebook, load_codes, pq_encode, pq_train,
                    save_codebook, save_codes)
from src.runner import ALGORITHMS, INITS, PRIORITIES, ClusterConfig, Stopwatch, viz_logs
from src.state import build_state


def cmd_cluster(args):
    """ Cluster one dataset, dump labels and the per-pass log """
    ds = read_dataset(args.input, args.format, args.normalize)
    cfg = config_from_args(args)

    clock = Stopwatch()
    state, log = cluster(ds, cfg, bisect=args.bisect, refine_after=args.refine)
    wall_ms = clock.lap()

    if args.out_labels:
        write_labels(state, args.out_labels)
    if args.out_log:
        write_log(log, args.out_log)

    return {'algo': cfg.algorithm, 'init': cfg.init, 'k': cfg.k, 'k0': cfg.k0,
            'n': ds.n, 'd': ds.d, 'seed': cfg.seed,
            'bisect': args.bisect, 'refine': args.refine,
            'passes': log.passes,
            'distortion': log.final_distortion,
            'gain_evals': state.evaluations,
            'wall_ms': wall_ms}

def cmd_eval(args):
    """ Distortion, entropy and cluster sizes of a label dump """
    ds = read_dataset(args.input, args.format, args.normalize)
    labels = read_labels(args.labels)
    state = build_state(ds, labels, int(labels.max()) + 1)

    # --classes alone uses the dataset's class column; with a path, a label dump
    classes = None
    if args.classes is not None:
        classes = ds.labels if args.classes == '' else read_labels(args.classes)
        if classes is None:
            raise MissingLabels('entropy requested but the dataset carries no class column')

    metrics_dict = Metrics()(ds, state, classes=classes)
    metrics_dict['size_histogram'] = {str(size): count for size, count
                                      in metrics_dict['size_histogram'].items()}
    return metrics_dict

def cmd_pq_train(args):
    train = read_dataset(args.train, args.format, args.normalize)
    template = ClusterConfig(args.algo, k=args.ksub, init=args.init,
                             max_passes=args.max_passes, verbose=args.verbose)

    clock = Stopwatch()
    cb = pq_train(train, args.m, args.ksub, inner=template, seed=args.seed,
                  workers=args.workers)
    wall_ms = clock.lap()
    save_codebook(cb, args.out)
    return {'m': cb.m, 'k_sub': cb.k_sub, 'd': cb.d, 'algo': args.algo,
            'n_train': train.n, 'wall_ms': wall_ms}

def cmd_pq_encode(args):
    cb = load_codebook(args.codebook)
    ds = read_dataset(args.input, args.format, args.normalize)
    codes = pq_encode(cb, ds)
    save_codes(codes, args.out)
    return {'n': int(codes.shape[0]), 'm': int(codes.shape[1])}

def cmd_pq_search(args):
    """ Recall@{1,10,100} of exhaustive ADC search """
    cb = load_codebook(args.codebook)
    codes = load_codes(args.codes)
    queries = read_dataset(args.queries, args.format, args.normalize)
    groundtruth = read_ivecs(args.groundtruth)

    if args.limit:
        queries = queries.subset(np.arange(min(args.limit, queries.n)))
    groundtruth = groundtruth[:queries.n]

    clock = Stopwatch()
    results = adc_search_batch(cb, codes, queries, args.topR)
    wall_ms = clock.lap()

    recalls = {'recall@%d' % R: recall_at(results, groundtruth, R)
               for R in (1, 10, 100) if R <= args.topR}
    return dict(recalls, queries=queries.n, wall_ms=wall_ms)


BENCH_COLUMNS = ['algo', 'bisect', 'refine', 'sweep', 'value', 'repeats',
                 'distortion', 'distortion_std', 'wall_ms', 'wall_ms_std',
                 'gain_evals', 'passes']

def cmd_bench(args):
    """ One CSV row per (algorithm, sweep value), averaged over repeats """
    if args.input:
        ds = read_dataset(args.input, args.format, args.normalize)
    else:
        ds = make_blobs(args.n, args.dim, args.blobs, seed=args.seed, separation=args.separation)
    base = config_from_args(args)

    cells = [(algo, value) for algo in args.algos for value in args.values]

    def run_cell(cell):
        algo, value = cell
        sub = ds
        if args.sweep == 'n':
            if value > ds.n:
                raise ClusteringError('sweep value n=%d exceeds the %d available samples'
                                      % (value, ds.n))
            sub = ds.subset(np.arange(value))
        runs = []
        for r in range(args.repeats):
            changes = {'algorithm': algo, 'init': args.init, 'seed': base.seed + r,
                       'verbose': False}
            if args.sweep == 'k':
                changes['k'] = value
            cfg = ClusterConfig(**dict(vars(base), **changes))

            clock = Stopwatch()
            state, log = cluster(sub, cfg, bisect=args.bisect, refine_after=args.refine)
            runs.append({'distortion': log.final_distortion, 'wall_ms': clock.lap(),
                         'gain_evals': state.evaluations, 'passes': log.passes})

        mean, std = avg_dicts(runs), std_dicts(runs)
        return {'algo': algo, 'bisect': int(args.bisect), 'refine': int(args.refine),
                'sweep': args.sweep, 'value': value, 'repeats': args.repeats,
                'distortion': mean['distortion'], 'distortion_std': std['distortion'],
                'wall_ms': mean['wall_ms'], 'wall_ms_std': std['wall_ms'],
                'gain_evals': mean['gain_evals'], 'passes': mean['passes']}

    if args.workers > 1:
        with ThreadPoolExecutor(max_workers=args.workers) as pool:
            rows = list(tqdm(pool.map(run_cell, cells), total=len(cells), desc='bench',
                             disable=not args.verbose))
    else:
        rows = [run_cell(cell) for cell in tqdm(cells, desc='bench', disable=not args.verbose)]

    out = open(args.out, 'w', newline='') if args.out else sys.stdout
    try:
        writer = csv.DictWriter(out, fieldnames=BENCH_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)
    finally:
        if args.out:
            out.close()
    return None

def cmd_plot(args):
    """ Distortion curves of exported logs, rendered to an image file """
    names = args.names or [os.path.splitext(os.path.basename(p))[0] for p in args.logs]
    if len(names) != len(args.logs):
        raise ClusteringError('%d names for %d logs' % (len(names), len(args.logs)))
    viz_logs({name: read_log(path) for name, path in zip(names, args.logs)}, args.out)
    return {'plot': args.out, 'curves': len(args.logs)}


def config_from_args(args):
    return ClusterConfig(algorithm=args.algo, k=args.k, init=args.init, seed=args.seed,
                         max_passes=args.max_passes, k0=args.k0, k0_after=args.k0_after,
                         minibatch_fraction=args.minibatch_fraction,
                         lvq_rate0=args.lvq_rate0, lvq_decay=args.lvq_decay,
                         split_priority=args.split_priority,
                         bisect_passes=args.bisect_passes,
                         bisect_workers=args.bisect_workers, verbose=args.verbose)

def int_list(text):
    """ '1000,2000' -> [1000, 2000]; an empty list is a usage error """
    try:
        values = [int(v) for v in text.split(',') if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError('expected comma-separated integers, got %r' % text)
    if not values:
        raise argparse.ArgumentTypeError('empty value list')
    return values

def str_list(choices):
    def parse(text):
        values = [v.strip() for v in text.split(',') if v.strip()]
        bad = [v for v in values if v not in choices]
        if not values or bad:
            raise argparse.ArgumentTypeError('expected comma-separated values from %s'
                                             % (choices,))
        return values
    return parse


def _add_input(p, flag='--input', required=True):
    p.add_argument(flag, required=required)
    p.add_argument('--format', choices=['fvecs', 'bvecs', 'csv'], default='fvecs')
    p.add_argument('--normalize', action='store_true', help='scale rows to unit length')

def _add_cluster_flags(p, algo_required=True):
    p.add_argument('--algo', choices=ALGORITHMS, default='bkm')
    p.add_argument('--init', choices=INITS, default=None)
    p.add_argument('--k', type=int, required=algo_required)
    p.add_argument('--seed', type=int, default=0)
    p.add_argument('--max-passes', type=int, default=130)
    p.add_argument('--k0', type=int, default=None)
    p.add_argument('--k0-after', type=int, default=2)
    p.add_argument('--minibatch-fraction', type=float, default=0.10)
    p.add_argument('--lvq-rate0', type=float, default=0.01)
    p.add_argument('--lvq-decay', type=float, default=4e-4)
    p.add_argument('--split-priority', choices=PRIORITIES, default='size')
    p.add_argument('--bisect-passes', type=int, default=5)
    p.add_argument('--bisect-workers', type=int, default=1)
    p.add_argument('--bisect', action='store_true')
    p.add_argument('--refine', action='store_true')
    p.add_argument('--verbose', action='store_true')

def build_parser():
    parser = argparse.ArgumentParser(prog='python -m src.cli',
                                     description='Boost k-means clustering benchmarks')
    commands = parser.add_subparsers(dest='command', required=True)

    p = commands.add_parser('cluster', help='cluster a dataset')
    _add_input(p)
    _add_cluster_flags(p)
    p.add_argument('--out-labels')
    p.add_argument('--out-log')
    p.set_defaults(func=cmd_cluster)

    p = commands.add_parser('eval', help='evaluate a label dump')
    _add_input(p)
    p.add_argument('--labels', required=True)
    p.add_argument('--classes', nargs='?', const='', default=None,
                   help='class ids: a label dump, or the dataset class column when bare')
    p.set_defaults(func=cmd_eval)

    pq = commands.add_parser('pq', help='product quantization').add_subparsers(
        dest='pq_command', required=True)

    p = pq.add_parser('train')
    _add_input(p, '--train')
    p.add_argument('--m', type=int, required=True)
    p.add_argument('--ksub', type=int, default=256)
    p.add_argument('--algo', choices=ALGORITHMS, default='bkm')
    p.add_argument('--init', choices=INITS, default=None)
    p.add_argument('--seed', type=int, default=0)
    p.add_argument('--max-passes', type=int, default=130)
    p.add_argument('--workers', type=int, default=1)
    p.add_argument('--out', required=True)
    p.add_argument('--verbose', action='store_true')
    p.set_defaults(func=cmd_pq_train)

    p = pq.add_parser('encode')
    _add_input(p)
    p.add_argument('--codebook', required=True)
    p.add_argument('--out', required=True)
    p.set_defaults(func=cmd_pq_encode)

    p = pq.add_parser('search')
    _add_input(p, '--queries')
    p.add_argument('--codebook', required=True)
    p.add_argument('--codes', required=True)
    p.add_argument('--groundtruth', required=True)
    p.add_argument('--topR', type=int, default=100)
    p.add_argument('--limit', type=int, default=None, help='use the first LIMIT queries')
    p.set_defaults(func=cmd_pq_search)

    p = commands.add_parser('bench', help='sweep n or k over several algorithms')
    _add_input(p, required=False)
    _add_cluster_flags(p, algo_required=False)
    p.set_defaults(k=64)
    p.add_argument('--sweep', choices=['n', 'k'], required=True)
    p.add_argument('--values', type=int_list, required=True)
    p.add_argument('--algos', type=str_list(ALGORITHMS), default=['bkm'])
    p.add_argument('--repeats', type=int, default=1)
    p.add_argument('--workers', type=int, default=1)
    p.add_argument('--n', type=int, default=10000, help='synthetic samples without --input')
    p.add_argument('--dim', type=int, default=32)
    p.add_argument('--blobs', type=int, default=64)
    p.add_argument('--separation', type=float, default=4.0)
    p.add_argument('--out')
    p.set_defaults(func=cmd_bench)

    p = commands.add_parser('plot', help='render distortion curves from logs')
    p.add_argument('--logs', nargs='+', required=True)
    p.add_argument('--names', nargs='+')
    p.add_argument('--out', required=True)
    p.set_defaults(func=cmd_plot)

    return parser

def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        result = args.func(args)
    except (ClusteringError, ValueError, OSError) as exc:
        print('error: %s' % exc, file=sys.stderr)
        return 1

    if result is not None:
        print(json.dumps(result))
    return 0


if __name__ == '__main__':
    sys.exit(main())
