import csv

import numpy as np
from cached_property import cached_property

from src.errors import DimMismatch, EmptyFile, ParseError, Truncated


class Dataset:
    """ Immutable n x d matrix of samples, optionally with one class id per
    row. Rows keep the dtype they were loaded with (float32 for the
    benchmark formats) so that writers reproduce files byte for byte;
    every computation goes through the float64 `matrix` instead. """
    def __init__(self, rows, labels=None, class_names=None, name=None):
        rows = np.array(rows, copy=True)
        if rows.ndim == 1:
            rows = rows[:, None]
        if rows.ndim != 2 or rows.shape[0] < 1 or rows.shape[1] < 1:
            raise DimMismatch('dataset needs n >= 1 rows of d >= 1 values, got shape %s'
                              % (rows.shape,))
        if not np.issubdtype(rows.dtype, np.floating):
            rows = rows.astype(np.float64)
        rows.setflags(write=False)
        self.rows = rows

        if labels is not None:
            labels = np.asarray(labels, dtype=np.int64).copy()
            if labels.shape != (rows.shape[0],):
                raise DimMismatch('%d class labels for %d rows' % (labels.size, rows.shape[0]))
            labels.setflags(write=False)
        self.labels = labels
        self.class_names = class_names
        self.name = name

    def __getitem__(self, idx):
        return self.rows[idx]

    def __repr__(self):
        return ('Dataset of %d vectors in %d dimensions%s'
                % (self.n, self.d, '' if self.labels is None else ' (labeled)'))

    def __len__(self):
        return self.n

    @property
    def n(self):
        return self.rows.shape[0]

    @property
    def d(self):
        return self.rows.shape[1]

    @property
    def num_classes(self):
        if self.labels is None:
            return 0
        return int(self.labels.max()) + 1

    @cached_property
    def matrix(self):
        """ Rows widened to float64, read-only """
        matrix = self.rows.astype(np.float64)
        matrix.setflags(write=False)
        return matrix

    @cached_property
    def sqnorms(self):
        """ x_i'x_i for every row """
        return np.einsum('ij,ij->i', self.matrix, self.matrix)

    @cached_property
    def energy(self):
        """ E = sum of squared norms; constant under any partition """
        return float(self.sqnorms.sum())

    def subset(self, indices):
        """ Dataset restricted to the given rows (class labels follow) """
        indices = np.asarray(indices)
        labels = None if self.labels is None else self.labels[indices]
        return Dataset(self.rows[indices], labels, self.class_names, self.name)

    def project(self, lo, hi):
        """ Dataset restricted to the contiguous columns [lo, hi) """
        return Dataset(self.rows[:, lo:hi], self.labels, self.class_names, self.name)

    def normalized(self):
        """ Copy with every non-zero row scaled to unit length """
        norms = np.sqrt(self.sqnorms)
        norms[norms == 0] = 1.0
        rows = (self.matrix / norms[:, None]).astype(self.rows.dtype)
        return Dataset(rows, self.labels, self.class_names, self.name)


def make_blobs(n, d, k, seed=0, spread=1.0, separation=10.0, centers=None):
    """ Balanced Gaussian mixture of k components, component id as class label """
    rng = np.random.default_rng(seed)

    # Component centers, unless given
    if centers is None:
        centers = rng.normal(0.0, separation, size=(k, d))
    centers = np.asarray(centers, dtype=np.float64)

    # Balanced assignment of samples to components, shuffled
    labels = rng.permutation(np.arange(n) % len(centers))

    rows = centers[labels] + rng.normal(0.0, spread, size=(n, centers.shape[1]))
    return Dataset(rows, labels, name='blobs')


def _read_vecs(path, dtype):
    """ Read the texmex framing: per record a little-endian int32 dimension
    followed by that many values of `dtype`. Every record must share the
    first record's dimension; trailing bytes are an error. """
    width = np.dtype(dtype).itemsize
    raw = np.fromfile(path, dtype=np.uint8)

    # Header of the first record fixes the dimension
    if raw.size == 0:
        raise EmptyFile('%s holds no record' % path)
    if raw.size < 4:
        raise Truncated('%s: %d bytes, shorter than a header' % (path, raw.size))
    d = int(raw[:4].view('<i4')[0])
    if d <= 0:
        raise DimMismatch('%s: record 0 declares dimension %d' % (path, d))

    record = 4 + d * width
    if raw.size % record:
        _locate_bad_record(raw, path, d, width)

    # All records have the same size: check every header at once
    records = raw.reshape(-1, record)
    headers = records[:, :4].copy().view('<i4').ravel()
    bad = np.flatnonzero(headers != d)
    if bad.size:
        raise DimMismatch('%s: record %d declares dimension %d, expected %d'
                          % (path, bad[0], headers[bad[0]], d))

    payload = records[:, 4:].copy().view(np.dtype(dtype).newbyteorder('<'))
    return payload.astype(dtype)

def _locate_bad_record(raw, path, d, width):
    """ Walk the records one at a time to report why the sizes do not add up """
    offset, index = 0, 0
    while offset < raw.size:
        if offset + 4 > raw.size:
            raise Truncated('%s: %d trailing bytes after record %d'
                            % (path, raw.size - offset, index - 1))
        header = int(raw[offset:offset+4].view('<i4')[0])
        if header != d:
            raise DimMismatch('%s: record %d declares dimension %d, expected %d'
                              % (path, index, header, d))
        offset += 4 + d * width
        index += 1
    raise Truncated('%s: record %d is cut short' % (path, index - 1))

def _write_vecs(rows, path, dtype):
    """ Inverse of _read_vecs """
    rows = np.asarray(rows)
    if rows.ndim != 2 or rows.shape[1] < 1:
        raise DimMismatch('cannot write array of shape %s' % (rows.shape,))
    n, d = rows.shape
    width = np.dtype(dtype).itemsize

    framed = np.empty((n, 4 + d * width), dtype=np.uint8)
    framed[:, :4] = np.full((n, 1), d, dtype='<i4').view(np.uint8)
    framed[:, 4:] = np.ascontiguousarray(rows, dtype=np.dtype(dtype).newbyteorder('<')).view(np.uint8)
    framed.tofile(path)


def read_fvecs(path, normalize=False):
    """ Read a .fvecs file into a float32 Dataset """
    ds = Dataset(_read_vecs(path, np.float32), name=str(path))
    return ds.normalized() if normalize else ds

def read_bvecs(path, normalize=False):
    """ Read a .bvecs file; uint8 payloads are widened to float32 exactly """
    ds = Dataset(_read_vecs(path, np.uint8).astype(np.float32), name=str(path))
    return ds.normalized() if normalize else ds

def read_ivecs(path):
    """ Read a .ivecs file (e.g. ground-truth neighbor ids) into an int array """
    return _read_vecs(path, np.int32)

def write_fvecs(rows, path):
    _write_vecs(rows.rows if isinstance(rows, Dataset) else rows, path, np.float32)

def write_bvecs(rows, path):
    rows = rows.rows if isinstance(rows, Dataset) else np.asarray(rows)
    if rows.size and (rows.min() < 0 or rows.max() > 255):
        raise DimMismatch('bvecs payloads must lie in 0..255')
    _write_vecs(rows.astype(np.uint8), path, np.uint8)

def write_ivecs(rows, path):
    _write_vecs(rows, path, np.int32)


def read_dataset(path, fmt, normalize=False):
    """ Dispatch on the format name used by the command line """
    if fmt == 'fvecs':
        return read_fvecs(path, normalize)
    if fmt == 'bvecs':
        return read_bvecs(path, normalize)
    if fmt == 'csv':
        return read_labeled_csv(path, normalize)
    raise ValueError('Unknown format %r' % fmt)


def read_labeled_csv(path, normalize=False):
    """ Read a CSV with a header row of feature columns and an optional
    `class` column. Class values are mapped to dense ids in sorted order. """
    rows, classes = [], []
    with open(path, newline='', encoding='utf-8') as f:
        reader = csv.reader(f)

        # Header decides which column carries the class
        header = next(reader, None)
        if header is None:
            raise EmptyFile('%s holds no header' % path)
        columns = [h.strip() for h in header]
        class_col = columns.index('class') if 'class' in columns else None
        features = [i for i in range(len(columns)) if i != class_col]
        if not features:
            raise ParseError('no feature column in header', 1)

        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(columns):
                raise ParseError('%d cells, header has %d' % (len(row), len(columns)), line_no)
            try:
                rows.append([float(row[i]) for i in features])
            except ValueError as exc:
                raise ParseError(str(exc), line_no) from None
            if class_col is not None:
                classes.append(row[class_col].strip())

    if not rows:
        raise EmptyFile('%s holds a header but no row' % path)

    labels, names = None, None
    if class_col is not None:
        labels, names = _dense_classes(classes)

    ds = Dataset(np.array(rows, dtype=np.float64), labels, names, name=str(path))
    return ds.normalized() if normalize else ds

def _dense_classes(values):
    """ Map class values to 0..c-1; integer-looking values sort numerically """
    try:
        keys = [int(v) for v in values]
    except ValueError:
        keys = values
    names, ids = np.unique(np.array(keys), return_inverse=True)
    return ids, [str(name) for name in names]


def write_labels(labels, path):
    """ Dump one (sample_index, cluster_id) row per sample """
    labels = getattr(labels, 'label', labels)
    with open(path, 'w', newline='', encoding='utf-8') as f:
        writer = csv.writer(f)
        writer.writerow(['sample_index', 'cluster_id'])
        writer.writerows(enumerate(int(l) for l in labels))

def read_labels(path):
    """ Inverse of write_labels; rows may come in any order but must cover 0..n-1 """
    pairs = []
    with open(path, newline='', encoding='utf-8') as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None:
            raise EmptyFile('%s holds no header' % path)
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                pairs.append((int(row[0]), int(row[1])))
            except (ValueError, IndexError) as exc:
                raise ParseError(str(exc), line_no) from None

    if not pairs:
        raise EmptyFile('%s holds no label' % path)
    index, cluster = np.array(pairs).T
    labels = np.full(len(pairs), -1, dtype=np.int64)
    if index.min() < 0 or index.max() >= len(pairs):
        raise ParseError('sample index out of range', 1)
    labels[index] = cluster
    if (labels < 0).any():
        raise ParseError('sample indexes are not a permutation of 0..n-1', 1)
    return labels


LOG_COLUMNS = ['pass', 'distortion', 'moves', 'gain_evals', 'ms']

def write_log(log, path):
    """ One CSV row per logged pass """
    with open(path, 'w', newline='', encoding='utf-8') as f:
        writer = csv.writer(f)
        writer.writerow(LOG_COLUMNS)
        for entry in log:
            writer.writerow([entry.pass_index, repr(entry.distortion), entry.moves,
                             entry.gain_evaluations, '%.3f' % entry.elapsed_ms])

def read_log(path):
    """ Parse a CSV written by write_log back into an IterationLog """
    from src.runner import IterationLog

    log = IterationLog()
    with open(path, newline='', encoding='utf-8') as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header != LOG_COLUMNS:
            raise ParseError('expected header %s' % ','.join(LOG_COLUMNS), 1)
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                log.record(int(row[0]), float(row[1]), int(row[2]), int(row[3]), float(row[4]))
            except (ValueError, IndexError) as exc:
                raise ParseError(str(exc), line_no) from None
    return log
