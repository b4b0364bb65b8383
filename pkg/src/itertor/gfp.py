"""Exact linear algebra over prime fields F_p.

Two matrix representations are provided.  :class:`FpMatrix` is a dense
numpy grid and is the correctness baseline; :class:`SparseFpMatrix` stores
columns as ``{row: value}`` dicts and is what the homology code uses.  Both
go through the same pivot rule (lowest index first), so ``rank``,
``image_basis`` and ``solve_in_span`` give identical answers on either.

Public vectors are tuples of canonical residues.  Internally the sparse
routines work with ``dict[int, int]`` vectors and the :class:`Echelon`
accumulator.
"""
from __future__ import annotations

from typing import Iterable, Iterator, Sequence

import numpy as np

__all__ = [
    "FpMatrix",
    "SparseFpMatrix",
    "Echelon",
    "NotInSpanError",
    "SubspaceError",
    "is_prime",
    "check_prime",
    "rank",
    "kernel_basis",
    "image_basis",
    "solve_in_span",
    "quotient_representatives",
]

Vector = tuple[int, ...]
SparseVector = dict[int, int]

# entries are < p, so products stay well inside int64
_MAX_DENSE_PRIME = 1 << 31


class NotInSpanError(ArithmeticError):
    """The target vector is not a linear combination of the spanning set."""


class SubspaceError(ValueError):
    """A claimed subspace is not contained in the ambient space."""


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


def check_prime(p: int) -> int:
    if not isinstance(p, (int, np.integer)) or not is_prime(int(p)):
        raise ValueError(f"modulus must be prime, got {p!r}")
    return int(p)


class FpMatrix:
    """Immutable dense matrix over F_p."""

    __slots__ = ("p", "_a")

    def __init__(self, entries, p: int, shape: tuple[int, int] | None = None):
        self.p = check_prime(p)
        if self.p >= _MAX_DENSE_PRIME:
            raise ValueError("dense matrices require p < 2**31")
        a = np.asarray(entries, dtype=np.int64)
        if shape is not None:
            a = a.reshape(shape)
        elif a.size == 0 and a.ndim != 2:
            a = a.reshape(0, 0)
        if a.ndim != 2:
            raise ValueError("matrix entries must be two-dimensional")
        a = np.mod(a, self.p)
        a.setflags(write=False)
        self._a = a

    @classmethod
    def zeros(cls, rows: int, cols: int, p: int) -> "FpMatrix":
        return cls(np.zeros((rows, cols), dtype=np.int64), p)

    @classmethod
    def identity(cls, n: int, p: int) -> "FpMatrix":
        return cls(np.eye(n, dtype=np.int64), p)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], rows: int, p: int) -> "FpMatrix":
        a = np.zeros((rows, len(columns)), dtype=np.int64)
        for j, col in enumerate(columns):
            if len(col) != rows:
                raise ValueError("column length mismatch")
            a[:, j] = col
        return cls(a, p)

    @property
    def rows(self) -> int:
        return self._a.shape[0]

    @property
    def cols(self) -> int:
        return self._a.shape[1]

    @property
    def array(self) -> np.ndarray:
        return self._a

    def __getitem__(self, key):
        return int(self._a[key]) if isinstance(key, tuple) else self._a[key]

    def __eq__(self, other) -> bool:
        if isinstance(other, SparseFpMatrix):
            other = other.to_dense()
        if not isinstance(other, FpMatrix):
            return NotImplemented
        return self.p == other.p and self._a.shape == other._a.shape and bool(np.all(self._a == other._a))

    def __hash__(self):
        return hash((self.p, self._a.shape, self._a.tobytes()))

    def __repr__(self) -> str:
        return f"FpMatrix(p={self.p}, {self.rows}x{self.cols})"

    def apply(self, v: Sequence[int]) -> Vector:
        if len(v) != self.cols:
            raise ValueError("vector length does not match column count")
        return tuple(int(x) for x in (self._a @ np.asarray(v, dtype=np.int64)) % self.p)

    def column(self, j: int) -> Vector:
        return tuple(int(x) for x in self._a[:, j])

    def to_sparse(self) -> "SparseFpMatrix":
        cols = []
        for j in range(self.cols):
            nz = np.nonzero(self._a[:, j])[0]
            cols.append({int(i): int(self._a[i, j]) for i in nz})
        return SparseFpMatrix(self.rows, cols, self.p)


class SparseFpMatrix:
    """Immutable column-sparse matrix over F_p."""

    __slots__ = ("p", "rows", "columns")

    def __init__(self, rows: int, columns: Iterable[dict[int, int]], p: int):
        self.p = check_prime(p)
        self.rows = rows
        cols = []
        for col in columns:
            clean = {}
            for i, x in col.items():
                if not 0 <= i < rows:
                    raise ValueError(f"row index {i} out of range")
                x %= self.p
                if x:
                    clean[i] = x
            cols.append(clean)
        self.columns = tuple(cols)

    @property
    def cols(self) -> int:
        return len(self.columns)

    def to_dense(self) -> FpMatrix:
        a = np.zeros((self.rows, self.cols), dtype=np.int64)
        for j, col in enumerate(self.columns):
            for i, x in col.items():
                a[i, j] = x
        return FpMatrix(a, self.p)

    def __eq__(self, other) -> bool:
        if isinstance(other, (FpMatrix, SparseFpMatrix)):
            return self.to_dense() == (other if isinstance(other, FpMatrix) else other.to_dense())
        return NotImplemented

    def __hash__(self):
        return hash(self.to_dense())

    def __repr__(self) -> str:
        nnz = sum(len(c) for c in self.columns)
        return f"SparseFpMatrix(p={self.p}, {self.rows}x{self.cols}, nnz={nnz})"

    def apply(self, v: Sequence[int]) -> Vector:
        if len(v) != self.cols:
            raise ValueError("vector length does not match column count")
        out = [0] * self.rows
        for j, c in enumerate(v):
            if c % self.p:
                for i, x in self.columns[j].items():
                    out[i] = (out[i] + c * x) % self.p
        return tuple(out)


# -- sparse kernel -------------------------------------------------------------


def axpy(v: SparseVector, c: int, w: SparseVector, p: int) -> None:
    """In place ``v += c * w`` over F_p."""
    for k, x in w.items():
        nv = (v.get(k, 0) + c * x) % p
        if nv:
            v[k] = nv
        else:
            v.pop(k, None)


class Echelon:
    """Incrementally built echelon basis of sparse vectors.

    Each stored row has a distinct pivot (its lowest nonzero index) with
    pivot coefficient 1.  Rows may carry a *track* vector recording how
    they were formed from caller-labelled inputs; reduction accumulates
    tracks with the same coefficients.
    """

    __slots__ = ("p", "rows")

    def __init__(self, p: int):
        self.p = p
        self.rows: dict[int, tuple[SparseVector, SparseVector | None]] = {}

    def __len__(self) -> int:
        return len(self.rows)

    def reduce(self, v: SparseVector, track: SparseVector | None = None) -> tuple[SparseVector, SparseVector | None]:
        """Leading-term reduction; mutates and returns ``(v, track)``.

        The result is empty iff ``v`` was in the span.  ``track`` collects
        ``-sum(c_k * track_k)`` over the rows subtracted.
        """
        p = self.p
        rows = self.rows
        while v:
            lead = min(v)
            row = rows.get(lead)
            if row is None:
                break
            c = p - v[lead]
            rv, rt = row
            axpy(v, c, rv, p)
            if track is not None and rt:
                axpy(track, c, rt, p)
        return v, track

    def add(self, v: SparseVector, track: SparseVector | None = None) -> bool:
        """Insert ``v`` (copied) if independent; return whether it was."""
        v = dict(v)
        if track is not None:
            track = dict(track)
        v, track = self.reduce(v, track)
        if not v:
            return False
        lead = min(v)
        inv = pow(v[lead], -1, self.p)
        if inv != 1:
            v = {k: x * inv % self.p for k, x in v.items()}
            if track is not None:
                track = {k: x * inv % self.p for k, x in track.items()}
        self.rows[lead] = (v, track)
        return True

    def contains(self, v: SparseVector) -> bool:
        rem, _ = self.reduce(dict(v))
        return not rem

    def solve(self, v: SparseVector) -> SparseVector:
        """Coefficients (in track labels) expressing ``v``; raises if not in span."""
        rem, track = self.reduce(dict(v), {})
        if rem:
            raise NotInSpanError("vector is not in the span")
        p = self.p
        return {k: (p - x) % p for k, x in track.items() if x}


def sparse_rank(columns: Iterable[SparseVector], p: int) -> int:
    ech = Echelon(p)
    for col in columns:
        ech.add(col)
    return len(ech)


def sparse_pivot_columns(columns: Sequence[SparseVector], p: int) -> list[int]:
    ech = Echelon(p)
    return [j for j, col in enumerate(columns) if ech.add(col)]


def sparse_kernel(columns: Sequence[SparseVector], p: int) -> Iterator[SparseVector]:
    """Yield a kernel basis of the map whose ``j``-th column is ``columns[j]``.

    Vectors are yielded in order of the first dependent column they involve.
    """
    ech = Echelon(p)
    for j, col in enumerate(columns):
        v, track = ech.reduce(dict(col), {j: 1})
        if not v:
            yield track
            continue
        lead = min(v)
        inv = pow(v[lead], -1, p)
        ech.rows[lead] = ({k: x * inv % p for k, x in v.items()}, {k: x * inv % p for k, x in track.items()})


# -- dense baseline ------------------------------------------------------------


def _rref(a: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    a = np.array(a, dtype=np.int64) % p
    nrows, ncols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            a[[r, i]] = a[[i, r]]
        inv = pow(int(a[r, c]), -1, p)
        a[r] = (a[r] * inv) % p
        col = a[:, c].copy()
        col[r] = 0
        nzr = np.nonzero(col)[0]
        if nzr.size:
            a[nzr] = (a[nzr] - np.outer(col[nzr], a[r])) % p
        pivots.append(c)
        r += 1
    return a, pivots


def _as_matrix(m) -> FpMatrix | SparseFpMatrix:
    if isinstance(m, (FpMatrix, SparseFpMatrix)):
        return m
    raise TypeError(f"expected FpMatrix or SparseFpMatrix, got {type(m).__name__}")


def rank(m: FpMatrix | SparseFpMatrix) -> int:
    m = _as_matrix(m)
    if isinstance(m, SparseFpMatrix):
        return sparse_rank(m.columns, m.p)
    if m.rows == 0 or m.cols == 0:
        return 0
    return len(_rref(m.array, m.p)[1])


def kernel_basis(m: FpMatrix | SparseFpMatrix) -> list[Vector]:
    """Null-space basis.  Dense: one vector per free column of the RREF."""
    m = _as_matrix(m)
    if isinstance(m, SparseFpMatrix):
        out = []
        for vec in sparse_kernel(m.columns, m.p):
            dense = [0] * m.cols
            for k, x in vec.items():
                dense[k] = x
            out.append(tuple(dense))
        return out
    p = m.p
    if m.rows == 0:
        return [tuple(int(i == j) for i in range(m.cols)) for j in range(m.cols)]
    r, pivots = _rref(m.array, p)
    pivot_set = set(pivots)
    basis = []
    for free in range(m.cols):
        if free in pivot_set:
            continue
        v = [0] * m.cols
        v[free] = 1
        for row, pc in enumerate(pivots):
            v[pc] = int(-r[row, free]) % p
        basis.append(tuple(v))
    return basis


def image_basis(m: FpMatrix | SparseFpMatrix) -> list[Vector]:
    """Column-space basis made of the matrix's own pivot columns."""
    m = _as_matrix(m)
    if isinstance(m, SparseFpMatrix):
        out = []
        for j in sparse_pivot_columns(m.columns, m.p):
            dense = [0] * m.rows
            for i, x in m.columns[j].items():
                dense[i] = x
            out.append(tuple(dense))
        return out
    if m.rows == 0 or m.cols == 0:
        return []
    _, pivots = _rref(m.array, m.p)
    return [m.column(j) for j in pivots]


def _validate_vectors(vectors: Sequence[Sequence[int]], length: int | None, p: int) -> list[Vector]:
    out = []
    for v in vectors:
        v = tuple(int(x) % p for x in v)
        if length is None:
            length = len(v)
        elif len(v) != length:
            raise ValueError("vectors have mismatched lengths")
        out.append(v)
    return out


def _to_sparse(v: Vector) -> SparseVector:
    return {i: x for i, x in enumerate(v) if x}


def solve_in_span(target: Sequence[int], spanning: Sequence[Sequence[int]], p: int) -> Vector:
    """Coefficients ``c`` with ``sum(c_i * spanning_i) == target``.

    Dependent spanning vectors (those not chosen as pivots in order) get
    coefficient zero.  Raises :class:`NotInSpanError` when unsolvable and
    ``ValueError`` on malformed input.
    """
    p = check_prime(p)
    (tgt,) = _validate_vectors([target], None, p)
    span = _validate_vectors(spanning, len(tgt), p)
    ech = Echelon(p)
    for i, v in enumerate(span):
        ech.add(_to_sparse(v), {i: 1})
    coeffs = ech.solve(_to_sparse(tgt))
    return tuple(coeffs.get(i, 0) for i in range(len(span)))


def quotient_representatives(
    space_basis: Sequence[Sequence[int]], subspace_basis: Sequence[Sequence[int]], p: int
) -> list[Vector]:
    """Vectors of ``space_basis`` whose classes form a basis of space/subspace.

    Candidates are taken from ``space_basis`` in order and kept when
    independent of the subspace and of the representatives kept so far.
    """
    p = check_prime(p)
    space = _validate_vectors(space_basis, None, p)
    length = len(space[0]) if space else None
    sub = _validate_vectors(subspace_basis, length, p)
    if sub and not space and any(any(v) for v in sub):
        raise SubspaceError("subspace is not contained in the space")
    ambient = Echelon(p)
    for v in space:
        ambient.add(_to_sparse(v))
    ech = Echelon(p)
    for v in sub:
        sv = _to_sparse(v)
        if not ambient.contains(sv):
            raise SubspaceError("subspace is not contained in the space")
        ech.add(sv)
    return [v for v in space if ech.add(_to_sparse(v))]
