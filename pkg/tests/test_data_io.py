import io
import os

import numpy as np
import pytest

from asbox.data_io import (encode_labels, load_dataset, parse_libsvm,
                           synthetic_logistic_dataset, to_libsvm)
from asbox.errors import ParseError

DATA_DIR = os.environ.get("ASBOX_DATA_DIR", os.path.join(
    os.path.dirname(__file__), "..", "data"))


class TestParse:
    def test_single_line(self):
        ds = parse_libsvm(io.StringIO("1 3:0.5 7:-1.2\n"))
        assert ds.n_samples == 1
        assert ds.labels[0] == 1.0
        assert ds.row(0) == [(2, 0.5), (6, -1.2)]
        assert ds.n_features == 7

    def test_unicode_minus_accepted(self):
        ds = parse_libsvm(io.StringIO("1 3:0.5 7:−1.2\n"))
        assert ds.row(0)[1] == (6, -1.2)

    def test_empty_input_errors(self):
        with pytest.raises(ParseError, match="no samples"):
            parse_libsvm(io.StringIO(""))

    def test_comments_and_blanks_skipped(self):
        text = "# header\n\n1 1:2.0  # trailing\n\n-1 2:3.0\n"
        ds = parse_libsvm(io.StringIO(text))
        assert ds.n_samples == 2

    def test_roundtrip(self):
        text = ("1 1:0.5 3:-1.25\n"
                "-1 2:2.0\n"
                "1 1:-0.3 2:0.7 3:0.1\n"
                "-1 3:1.5\n"
                "1 1:1e-3\n")
        ds1 = parse_libsvm(io.StringIO(text))
        ds2 = parse_libsvm(io.StringIO(to_libsvm(ds1)))
        assert np.array_equal(ds1.indptr, ds2.indptr)
        assert np.array_equal(ds1.indices, ds2.indices)
        assert np.array_equal(ds1.values, ds2.values)
        assert np.array_equal(ds1.labels, ds2.labels)
        assert ds1.n_features == ds2.n_features

    def test_malformed_token_reports_line(self):
        with pytest.raises(ParseError, match="line 2"):
            parse_libsvm(io.StringIO("1 1:1.0\n1 oops\n"))

    def test_bad_label_reports_line(self):
        with pytest.raises(ParseError, match="line 3"):
            parse_libsvm(io.StringIO("1 1:1\n-1 1:1\nxyz 1:1\n"))

    def test_nonincreasing_index_rejected(self):
        with pytest.raises(ParseError, match="not increasing"):
            parse_libsvm(io.StringIO("1 3:1.0 3:2.0\n"))
        with pytest.raises(ParseError, match="not increasing"):
            parse_libsvm(io.StringIO("1 3:1.0 2:2.0\n"))

    def test_zero_index_rejected(self):
        with pytest.raises(ParseError, match=">= 1"):
            parse_libsvm(io.StringIO("1 0:1.0\n"))

    def test_declared_feature_count(self):
        ds = parse_libsvm(io.StringIO("1 2:1.0\n"), n_features=10)
        assert ds.n_features == 10
        with pytest.raises(ParseError, match="below max index"):
            parse_libsvm(io.StringIO("1 22:1.0\n"), n_features=10)


class TestEncodeLabels:
    def test_one_two_convention(self):
        enc, mapping = encode_labels([1.0, 2.0, 1.0])
        assert enc.tolist() == [-1.0, 1.0, -1.0]
        assert mapping == {1.0: -1.0, 2.0: 1.0}

    def test_already_encoded_unchanged(self):
        enc, _ = encode_labels([-1.0, 1.0, -1.0])
        assert enc.tolist() == [-1.0, 1.0, -1.0]

    def test_zero_one_convention(self):
        enc, _ = encode_labels([0.0, 1.0])
        assert enc.tolist() == [-1.0, 1.0]

    def test_single_class_rejected(self):
        with pytest.raises(ValueError, match="two distinct"):
            encode_labels([1.0, 1.0])

    def test_three_classes_rejected(self):
        with pytest.raises(ValueError, match="two distinct"):
            encode_labels([0.0, 1.0, 2.0])


class TestSynthetic:
    def test_shapes_and_labels(self):
        ds = synthetic_logistic_dataset(100, 12, noise=0.1, seed=0)
        assert ds.n_samples == 100
        assert ds.n_features == 12
        assert set(np.unique(ds.labels)) <= {-1.0, 1.0}

    def test_deterministic(self):
        a = synthetic_logistic_dataset(50, 8, seed=3)
        b = synthetic_logistic_dataset(50, 8, seed=3)
        assert np.array_equal(a.values, b.values)
        assert np.array_equal(a.labels, b.labels)


class TestRealDatasets:
    """Statistics checks against the published dataset shapes; skipped when
    the files are not present under data/ (they are not redistributed)."""

    @pytest.mark.skipif(
        not os.path.exists(os.path.join(DATA_DIR, "mushrooms")),
        reason="mushrooms dataset not present")
    def test_mushrooms_statistics(self):
        ds = load_dataset(os.path.join(DATA_DIR, "mushrooms"))
        assert ds.n_samples == 8124
        assert ds.n_features == 112

    @pytest.mark.skipif(
        not os.path.exists(os.path.join(DATA_DIR, "ijcnn1")),
        reason="ijcnn1 dataset not present")
    def test_ijcnn1_statistics(self):
        ds = load_dataset(os.path.join(DATA_DIR, "ijcnn1"))
        assert ds.n_samples == 49990
        assert ds.n_features == 22
