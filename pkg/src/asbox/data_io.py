"""LIBSVM sparse text parsing and label encoding.

Rows are stored CSR-style (indptr/indices/values) with 1-based file indices
converted to 0-based at this boundary, and are immutable after load. Dot
products iterate a row's nonzeros; that is the one-scalar-product cost unit
the evaluation ledger counts per sample.
"""

import io
from dataclasses import dataclass

import numpy as np

from .errors import ParseError

__all__ = ["SparseDataset", "parse_libsvm", "to_libsvm", "encode_labels",
           "load_dataset", "synthetic_logistic_dataset"]


@dataclass(frozen=True)
class SparseDataset:
    indptr: np.ndarray    # (N+1,) int64
    indices: np.ndarray   # 0-based feature columns, strictly increasing per row
    values: np.ndarray
    labels: np.ndarray    # raw labels from the file until encode_labels is applied
    n_features: int

    @property
    def n_samples(self):
        return self.indptr.shape[0] - 1

    def row(self, i):
        """Sorted (column, value) pairs of sample i, 0-based columns."""
        lo, hi = self.indptr[i], self.indptr[i + 1]
        return list(zip(self.indices[lo:hi].tolist(), self.values[lo:hi].tolist()))

    def with_labels(self, labels):
        return SparseDataset(self.indptr, self.indices, self.values,
                             np.asarray(labels, float), self.n_features)


def parse_libsvm(source, n_features=None):
    """Parse `label idx:val [idx:val ...]` lines into a SparseDataset.

    ``source`` is a file path, a text stream, or a literal string containing
    newlines. Blank lines and `#` comments are skipped; any malformed token or
    nonincreasing index fails loudly with the 1-based line number. Raw labels
    are preserved (see encode_labels).
    """
    if hasattr(source, "read"):
        lines = source.read().splitlines()
    elif isinstance(source, str) and "\n" in source:
        lines = source.splitlines()
    else:
        with open(source, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()

    labels = []
    indptr = [0]
    cols = []
    vals = []
    max_col = 0
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        try:
            labels.append(float(tokens[0]))
        except ValueError:
            raise ParseError(f"bad label token {tokens[0]!r}", line=lineno) from None
        prev = 0
        for token in tokens[1:]:
            idx_s, _, val_s = token.partition(":")
            if not val_s:
                raise ParseError(f"bad feature token {token!r}", line=lineno)
            try:
                idx = int(idx_s)
                val = float(val_s.replace("−", "-"))
            except ValueError:
                raise ParseError(f"bad feature token {token!r}",
                                 line=lineno) from None
            if idx < 1:
                raise ParseError(f"feature index {idx} must be >= 1", line=lineno)
            if idx <= prev:
                raise ParseError(
                    f"feature index {idx} not increasing (previous {prev})",
                    line=lineno)
            prev = idx
            cols.append(idx - 1)
            vals.append(val)
        indptr.append(len(cols))
        max_col = max(max_col, prev)

    if not labels:
        raise ParseError("no samples in input")
    if n_features is not None and n_features < max_col:
        raise ParseError(f"declared n_features {n_features} below max index "
                         f"{max_col}")
    return SparseDataset(
        indptr=np.asarray(indptr, dtype=np.int64),
        indices=np.asarray(cols, dtype=np.int64),
        values=np.asarray(vals, dtype=np.float64),
        labels=np.asarray(labels, dtype=np.float64),
        n_features=n_features if n_features is not None else max_col,
    )


def to_libsvm(dataset):
    """Serialize back to LIBSVM text (1-based indices); round-trips parse_libsvm."""
    out = io.StringIO()
    for i in range(dataset.n_samples):
        label = dataset.labels[i]
        parts = [repr(int(label)) if label == int(label) else repr(label)]
        for col, val in dataset.row(i):
            parts.append(f"{col + 1}:{val!r}")
        out.write(" ".join(parts) + "\n")
    return out.getvalue()


def encode_labels(raw):
    """Map the two distinct raw label values onto {-1, +1}.

    The smaller raw value becomes -1 and the larger +1; returns the encoded
    vector and the mapping actually applied.
    """
    raw = np.asarray(raw, dtype=float)
    distinct = np.unique(raw)
    if distinct.shape[0] != 2:
        raise ValueError(
            f"need exactly two distinct labels, got {distinct.tolist()}")
    lo, hi = distinct
    encoded = np.where(raw == lo, -1.0, 1.0)
    return encoded, {lo: -1.0, hi: 1.0}


def load_dataset(path, n_features=None):
    """Parse a LIBSVM file and encode its labels in {-1, +1}."""
    dataset = parse_libsvm(path, n_features=n_features)
    encoded, _ = encode_labels(dataset.labels)
    return dataset.with_labels(encoded)


def synthetic_logistic_dataset(n_samples, n_features, noise=0.1, seed=0,
                               density=0.3):
    """Sparse binary-classification data from a planted separator.

    Rows get ~density*n_features gaussian nonzeros; labels are the sign of
    the planted margin with a ``noise`` fraction flipped. Labels come out in
    {-1, +1} already.
    """
    rng = np.random.default_rng(seed)
    separator = rng.standard_normal(n_features)
    indptr = [0]
    cols = []
    vals = []
    labels = np.empty(n_samples)
    for i in range(n_samples):
        nnz = max(1, rng.binomial(n_features, density))
        row_cols = np.sort(rng.choice(n_features, size=nnz, replace=False))
        row_vals = rng.standard_normal(nnz)
        margin = float(np.dot(row_vals, separator[row_cols]))
        labels[i] = 1.0 if margin >= 0 else -1.0
        cols.extend(row_cols.tolist())
        vals.extend(row_vals.tolist())
        indptr.append(len(cols))
    flips = rng.random(n_samples) < noise
    labels[flips] = -labels[flips]
    return SparseDataset(
        indptr=np.asarray(indptr, dtype=np.int64),
        indices=np.asarray(cols, dtype=np.int64),
        values=np.asarray(vals, dtype=np.float64),
        labels=labels,
        n_features=n_features,
    )
