"""Small exact sparse matrices in column-major triple form.

Storage is three int64 arrays (row, col, value) sorted by (col, row), which is
the CSC entry order the parallel generator partitions on. Values are
non-negative integers; every arithmetic step that could leave int64 is checked
and raises ``OverflowError`` instead of wrapping.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from krongraph.distribution import DegreeDistribution

INT64_MAX = int(np.iinfo(np.int64).max)


def _frozen(arr) -> np.ndarray:
    out = np.ascontiguousarray(arr, dtype=np.int64)
    out.flags.writeable = False
    return out


def _column_major_order(rows: np.ndarray, cols: np.ndarray, nrows: int) -> np.ndarray:
    if nrows == 0 or int(cols.max(initial=0)) <= (INT64_MAX - nrows) // nrows:
        return np.argsort(cols * nrows + rows, kind="stable")
    return np.lexsort((rows, cols))


@dataclass(frozen=True, eq=False)
class SparseMatrix:
    """Sparse non-negative integer matrix; build with :meth:`from_triples`."""

    rows: int
    cols: int
    row_idx: np.ndarray
    col_idx: np.ndarray
    values: np.ndarray

    @classmethod
    def from_triples(cls, rows: int, cols: int, rr, cc, vv=None) -> SparseMatrix:
        rows, cols = int(rows), int(cols)
        if rows < 0 or cols < 0:
            raise ValueError("matrix dimensions must be non-negative")
        if rows > INT64_MAX or cols > INT64_MAX:
            raise OverflowError(f"dimensions {rows}x{cols} exceed int64 indexing")
        rr = np.asarray(rr, dtype=np.int64).ravel()
        cc = np.asarray(cc, dtype=np.int64).ravel()
        vv = np.ones_like(rr) if vv is None else np.asarray(vv, dtype=np.int64).ravel()
        if not (rr.shape == cc.shape == vv.shape):
            raise ValueError("triple arrays must have equal length")
        if rr.size:
            if rr.min() < 0 or rr.max() >= rows or cc.min() < 0 or cc.max() >= cols:
                raise IndexError("triple index out of range")
            if vv.min() < 0:
                raise ValueError("values must be non-negative")
        keep = vv != 0
        rr, cc, vv = rr[keep], cc[keep], vv[keep]
        order = _column_major_order(rr, cc, rows)
        rr, cc, vv = rr[order], cc[order], vv[order]
        if rr.size > 1:
            same = (rr[1:] == rr[:-1]) & (cc[1:] == cc[:-1])
            if same.any():
                k = int(np.flatnonzero(same)[0])
                raise ValueError(f"duplicate entry at ({rr[k]}, {cc[k]})")
        return cls(rows, cols, _frozen(rr), _frozen(cc), _frozen(vv))

    @classmethod
    def from_dense(cls, dense) -> SparseMatrix:
        dense = np.asarray(dense, dtype=np.int64)
        rr, cc = np.nonzero(dense)
        return cls.from_triples(dense.shape[0], dense.shape[1], rr, cc, dense[rr, cc])

    @classmethod
    def identity(cls, n: int) -> SparseMatrix:
        idx = np.arange(n, dtype=np.int64)
        return cls.from_triples(n, n, idx, idx)

    @classmethod
    def empty(cls, rows: int, cols: int) -> SparseMatrix:
        return cls.from_triples(rows, cols, [], [])

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @property
    def nnz(self) -> int:
        return int(self.values.size)

    def triples(self) -> list[tuple[int, int, int]]:
        return list(zip(self.row_idx.tolist(), self.col_idx.tolist(), self.values.tolist()))

    def to_dict(self) -> dict[tuple[int, int], int]:
        return {(i, j): v for i, j, v in self.triples()}

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.rows, self.cols), dtype=np.int64)
        out[self.row_idx, self.col_idx] = self.values
        return out

    def transpose(self) -> SparseMatrix:
        return SparseMatrix.from_triples(self.cols, self.rows, self.col_idx, self.row_idx, self.values)

    def is_binary(self) -> bool:
        return bool(np.all(self.values == 1))

    def is_symmetric(self) -> bool:
        return self.rows == self.cols and self == self.transpose()

    def diagonal_nnz(self) -> int:
        return int(np.count_nonzero(self.row_idx == self.col_idx))

    def without_entry(self, i: int, j: int) -> SparseMatrix:
        keep = ~((self.row_idx == i) & (self.col_idx == j))
        if keep.all():
            raise KeyError(f"no stored entry at ({i}, {j})")
        return SparseMatrix(self.rows, self.cols, _frozen(self.row_idx[keep]),
                            _frozen(self.col_idx[keep]), _frozen(self.values[keep]))

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return (
            self.shape == other.shape
            and np.array_equal(self.row_idx, other.row_idx)
            and np.array_equal(self.col_idx, other.col_idx)
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None

    def __repr__(self) -> str:
        return f"SparseMatrix({self.rows}x{self.cols}, nnz={self.nnz})"


@dataclass(frozen=True)
class IncidencePair:
    """Out/in incidence matrices; row e marks the source and target of edge e."""

    e_out: SparseMatrix
    e_in: SparseMatrix

    def __post_init__(self):
        if self.e_out.shape != self.e_in.shape:
            raise ValueError("e_out and e_in must have the same shape")

    @property
    def edges(self) -> int:
        return self.e_out.rows

    def adjacency(self) -> SparseMatrix:
        return matmul(self.e_out.transpose(), self.e_in)


def kron(a: SparseMatrix, b: SparseMatrix) -> SparseMatrix:
    """Kronecker product with entry (ia*b.rows + ib, ja*b.cols + jb)."""
    rows, cols = a.rows * b.rows, a.cols * b.cols
    if rows > INT64_MAX or cols > INT64_MAX:
        raise OverflowError(f"kron dimensions {rows}x{cols} exceed int64 indexing")
    if a.nnz and b.nnz:
        vmax = int(a.values.max()) * int(b.values.max())
        if vmax > INT64_MAX:
            raise OverflowError("kron value product exceeds int64")
    # every index is below rows/cols, which were range-checked above
    rr = (a.row_idx[:, None] * b.rows + b.row_idx[None, :]).ravel()
    cc = (a.col_idx[:, None] * b.cols + b.col_idx[None, :]).ravel()
    vv = (a.values[:, None] * b.values[None, :]).ravel()
    order = _column_major_order(rr, cc, rows)
    return SparseMatrix(rows, cols, _frozen(rr[order]), _frozen(cc[order]), _frozen(vv[order]))


def kron_all(mats) -> SparseMatrix:
    mats = list(mats)
    if not mats:
        return SparseMatrix.identity(1)
    out = mats[0]
    for m in mats[1:]:
        out = kron(out, m)
    return out


def _rows_of(a: SparseMatrix) -> dict[int, dict[int, int]]:
    rows: dict[int, dict[int, int]] = {}
    for i, j, v in a.triples():
        rows.setdefault(i, {})[j] = v
    return rows


def _cols_of(a: SparseMatrix) -> dict[int, dict[int, int]]:
    cols: dict[int, dict[int, int]] = {}
    for i, j, v in a.triples():
        cols.setdefault(j, {})[i] = v
    return cols


def _checked_build(rows: int, cols: int, acc: dict[tuple[int, int], int]) -> SparseMatrix:
    if acc and max(acc.values()) > INT64_MAX:
        raise OverflowError("matrix value exceeds int64")
    keys = list(acc)
    return SparseMatrix.from_triples(
        rows, cols, [k[0] for k in keys], [k[1] for k in keys], [acc[k] for k in keys]
    )


def matmul(a: SparseMatrix, b: SparseMatrix) -> SparseMatrix:
    """Exact plus-times matrix product."""
    if a.cols != b.rows:
        raise ValueError(f"dimension mismatch: {a.shape} @ {b.shape}")
    b_rows = _rows_of(b)
    acc: dict[tuple[int, int], int] = {}
    for i, k, v in a.triples():
        for j, w in b_rows.get(k, {}).items():
            acc[i, j] = acc.get((i, j), 0) + v * w
    return _checked_build(a.rows, b.cols, acc)


def ewise_mult(a: SparseMatrix, b: SparseMatrix) -> SparseMatrix:
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    bd = b.to_dict()
    acc = {(i, j): v * bd[i, j] for i, j, v in a.triples() if (i, j) in bd}
    return _checked_build(a.rows, a.cols, acc)


def closed_wedge_sum(a: SparseMatrix) -> int:
    """Sum of all entries of (A A) .* A, evaluated only on A's pattern.

    For a symmetric binary matrix without self-loops this is six times the
    number of triangles.
    """
    if a.rows != a.cols:
        raise ValueError(f"closed_wedge_sum needs a square matrix, got {a.shape}")
    rows, cols = _rows_of(a), _cols_of(a)
    total = 0
    for i, j, v in a.triples():
        ri, cj = rows[i], cols[j]
        if len(ri) > len(cj):
            total += v * sum(w * ri[k] for k, w in cj.items() if k in ri)
        else:
            total += v * sum(w * cj[k] for k, w in ri.items() if k in cj)
    return total


def triangle_count(a: SparseMatrix) -> int:
    if a.rows != a.cols:
        raise ValueError(f"triangle_count needs a square matrix, got {a.shape}")
    if a.diagonal_nnz():
        raise ValueError("triangle_count needs a zero diagonal; remove self-loops first")
    if not a.is_symmetric():
        raise ValueError("triangle_count needs a symmetric matrix")
    s = closed_wedge_sum(a)
    if s % 6:
        raise ValueError(f"closed wedge sum {s} is not divisible by 6")
    return s // 6


def degrees(a: SparseMatrix) -> DegreeDistribution:
    """Row-nnz histogram; a self-loop counts once toward its vertex."""
    if a.rows != a.cols:
        raise ValueError(f"degrees needs a square matrix, got {a.shape}")
    per_row = np.bincount(a.row_idx, minlength=a.rows)
    values, counts = np.unique(per_row, return_counts=True)
    return DegreeDistribution(dict(zip(values.tolist(), counts.tolist())))


def incidence_pair(a: SparseMatrix) -> IncidencePair:
    """One incidence row per stored entry of ``a``, in column-major order."""
    if not a.is_binary():
        raise ValueError("incidence_pair needs a binary matrix")
    edge = np.arange(a.nnz, dtype=np.int64)
    return IncidencePair(
        e_out=SparseMatrix.from_triples(a.nnz, a.rows, edge, a.row_idx),
        e_in=SparseMatrix.from_triples(a.nnz, a.cols, edge, a.col_idx),
    )


def kron_incidence(p: IncidencePair, q: IncidencePair) -> IncidencePair:
    return IncidencePair(kron(p.e_out, q.e_out), kron(p.e_in, q.e_in))
