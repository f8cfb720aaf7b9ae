import numpy as np
import pytest

from src.errors import DimMismatch, EmptyFile, MissingLabels, ParseError, Truncated
from src.loader import (Dataset, make_blobs, read_bvecs, read_fvecs, read_ivecs, read_labeled_csv,
                        read_labels, read_log, write_bvecs, write_fvecs, write_labels, write_log)
from src.metrics import entropy
from src.runner import IterationLog
from src.state import build_state


def header(d):
    return np.array([d], dtype='<i4').tobytes()


class TestVecsFormats:

    def test_single_fvecs_record(self, tmp_path):
        path = tmp_path / 'one.fvecs'
        path.write_bytes(header(2) + np.array([1.0, 2.0], dtype='<f4').tobytes())
        assert path.stat().st_size == 12

        ds = read_fvecs(path)
        assert (ds.n, ds.d) == (1, 2)
        np.testing.assert_array_equal(ds.rows, [[1.0, 2.0]])

    def test_zero_dimension_header(self, tmp_path):
        path = tmp_path / 'zero.fvecs'
        path.write_bytes(header(0))
        with pytest.raises(DimMismatch):
            read_fvecs(path)

    def test_empty_file(self, tmp_path):
        path = tmp_path / 'empty.fvecs'
        path.write_bytes(b'')
        with pytest.raises(EmptyFile):
            read_fvecs(path)

    def test_mixed_dimensions(self, tmp_path):
        path = tmp_path / 'mixed.fvecs'
        path.write_bytes(header(2) + np.zeros(2, '<f4').tobytes()
                         + header(3) + np.zeros(3, '<f4').tobytes())
        with pytest.raises(DimMismatch):
            read_fvecs(path)

    def test_trailing_garbage(self, tmp_path):
        path = tmp_path / 'garbage.fvecs'
        path.write_bytes(header(2) + np.ones(2, '<f4').tobytes() + b'\x01\x02')
        with pytest.raises(Truncated):
            read_fvecs(path)

    def test_cut_record(self, tmp_path):
        path = tmp_path / 'cut.fvecs'
        path.write_bytes(header(4) + np.ones(3, '<f4').tobytes())
        with pytest.raises(Truncated):
            read_fvecs(path)

    def test_fvecs_bytes_survive_a_round_trip(self, tmp_path):
        rows = np.random.default_rng(0).normal(size=(50, 7)).astype('<f4')
        original = tmp_path / 'a.fvecs'
        original.write_bytes(b''.join(header(7) + r.tobytes() for r in rows))

        copy = tmp_path / 'b.fvecs'
        write_fvecs(read_fvecs(original), copy)
        assert copy.read_bytes() == original.read_bytes()

    def test_ivecs_record(self, tmp_path):
        path = tmp_path / 'gt.ivecs'
        path.write_bytes(header(2) + np.array([5, 9], dtype='<i4').tobytes())
        np.testing.assert_array_equal(read_ivecs(path), [[5, 9]])

    def test_bvecs_widening_is_exact(self, tmp_path):
        path = tmp_path / 'all.bvecs'
        path.write_bytes(header(256) + np.arange(256, dtype=np.uint8).tobytes())

        ds = read_bvecs(path)
        assert ds.rows.dtype == np.float32
        np.testing.assert_array_equal(ds.rows[0], np.arange(256, dtype=np.float64))

        copy = tmp_path / 'copy.bvecs'
        write_bvecs(ds, copy)
        assert copy.read_bytes() == path.read_bytes()

    def test_sift_groundtruth_matches_brute_force(self, tmp_path):
        rng = np.random.default_rng(3)
        base = rng.normal(size=(1000, 16)).astype(np.float32)
        queries = rng.normal(size=(20, 16)).astype(np.float32)
        d2 = ((queries[:, None, :].astype(np.float64) - base[None]) ** 2).sum(axis=2)
        gt = np.argsort(d2, axis=1, kind='stable')[:, :10].astype(np.int32)

        from src.loader import write_ivecs
        write_ivecs(gt, tmp_path / 'gt.ivecs')
        np.testing.assert_array_equal(read_ivecs(tmp_path / 'gt.ivecs')[:, 0], d2.argmin(axis=1))


class TestCsv:

    def test_class_column(self, tmp_path):
        path = tmp_path / 'data.csv'
        path.write_text('x,y,class\n1.0,2.0,cat\n3.5,-1,dog\n')
        ds = read_labeled_csv(path)
        assert (ds.n, ds.d) == (2, 2)
        np.testing.assert_array_equal(ds.labels, [0, 1])
        assert ds.class_names == ['cat', 'dog']

    def test_integer_classes_sort_numerically(self, tmp_path):
        path = tmp_path / 'data.csv'
        path.write_text('class,a\n10,0\n2,1\n10,2\n')
        np.testing.assert_array_equal(read_labeled_csv(path).labels, [1, 0, 1])

    def test_missing_class_column(self, tmp_path):
        path = tmp_path / 'plain.csv'
        path.write_text('a,b\n0,0\n1,1\n5,5\n')
        ds = read_labeled_csv(path)
        assert ds.labels is None

        state = build_state(ds, [0, 0, 1], 2)
        with pytest.raises(MissingLabels):
            entropy(state, ds.labels)

    def test_parse_error_reports_line(self, tmp_path):
        path = tmp_path / 'bad.csv'
        path.write_text('a,b\n0,0\n1,oops\n')
        with pytest.raises(ParseError) as info:
            read_labeled_csv(path)
        assert info.value.line == 3

    def test_wrong_cell_count(self, tmp_path):
        path = tmp_path / 'short.csv'
        path.write_text('a,b\n0\n')
        with pytest.raises(ParseError):
            read_labeled_csv(path)

    def test_normalize_option(self, tmp_path):
        path = tmp_path / 'data.csv'
        path.write_text('a,b\n3,4\n0,0\n0,2\n')
        ds = read_labeled_csv(path, normalize=True)
        np.testing.assert_allclose(ds.rows, [[0.6, 0.8], [0, 0], [0, 1]])

    def test_labels_round_trip(self, tmp_path):
        labels = np.random.default_rng(1).integers(0, 7, size=40)
        write_labels(labels, tmp_path / 'labels.csv')
        np.testing.assert_array_equal(read_labels(tmp_path / 'labels.csv'), labels)

    def test_log_round_trip(self, tmp_path):
        log = IterationLog()
        log.record(0, 12.345678901234, 0, 0, 0.5)
        log.record(1, 10.0000000001, 37, 1200, 3.25)
        write_log(log, tmp_path / 'log.csv')

        back = read_log(tmp_path / 'log.csv')
        assert back.distortions() == log.distortions()
        assert [e.moves for e in back] == [0, 37]
        assert [e.gain_evaluations for e in back] == [0, 1200]


class TestDataset:

    def test_energy(self):
        ds = make_blobs(n=200, d=5, k=3, seed=2)
        recomputed = float((ds.matrix ** 2).sum())
        assert abs(ds.energy - recomputed) <= 1e-12 * recomputed

    def test_rows_are_immutable(self):
        ds = Dataset(np.ones((3, 2)))
        with pytest.raises(ValueError):
            ds.rows[0, 0] = 5.0

    def test_rejects_empty(self):
        with pytest.raises(DimMismatch):
            Dataset(np.zeros((0, 3)))
