"""Exact scalars and matrices over QQ and GF(p).

Scalars are elements of a sympy domain (``QQ`` or ``GF(p)``); matrices are
sparse dictionaries of keys that are handed to ``DomainMatrix`` for row
reduction. Nothing here ever touches floating point.
"""

from collections import defaultdict
from dataclasses import dataclass, field
from functools import lru_cache
from fractions import Fraction
from typing import Any, Iterable, Sequence

from sympy import isprime
from sympy.polys.domains import GF, QQ
from sympy.polys.matrices import DomainMatrix

Scalar = Any

# below this size the elimination runs on the dense representation
DENSE_BELOW = 64


@lru_cache(maxsize=None)
def _domain(p: int | None):
    return QQ if p is None else GF(p)


@dataclass(frozen=True)
class FieldSpec:
    """The base field: rationals when ``p`` is None, otherwise GF(p)."""

    p: int | None = None

    def __post_init__(self):
        if self.p is not None:
            if not (2 <= self.p < 2**31) or not isprime(self.p):
                raise ValueError(f"Unknown prime field: {self.p} is not a prime below 2^31")

    @property
    def domain(self):
        return _domain(self.p)

    @property
    def kind(self) -> str:
        return "QQ" if self.p is None else f"GF({self.p})"

    @property
    def zero(self) -> Scalar:
        return self.domain.zero

    @property
    def one(self) -> Scalar:
        return self.domain.one

    def __str__(self) -> str:
        return self.kind

    def __call__(self, x: int | Fraction | str | Scalar) -> Scalar:
        match x:
            case str():
                return self.parse(x)
            case bool():
                raise ValueError(f"Unknown scalar: {x!r}")
            case int():
                return self.domain.convert(x)
            case Fraction():
                return self.domain.convert(x.numerator) / self.domain.convert(x.denominator)
            case _:
                return self.domain.convert(x)

    def is_zero(self, x: Scalar) -> bool:
        return self.domain.is_zero(x)

    def parse(self, s: str) -> Scalar:
        """Reads "p/q" or "n"; residues are reduced mod p."""
        s = s.strip()
        num, _, den = s.partition("/")
        try:
            n, d = int(num), int(den) if den else 1
        except ValueError:
            raise ValueError(f"Unknown scalar literal: {s!r}") from None
        if d == 0:
            raise ValueError(f"Zero denominator in scalar literal: {s!r}")
        return self.domain.convert(n) / self.domain.convert(d)

    def format(self, x: Scalar) -> str:
        if self.p is not None:
            return str(int(x) % self.p)
        n, d = int(QQ.numer(x)), int(QQ.denom(x))
        return str(n) if d == 1 else f"{n}/{d}"

    @classmethod
    def from_string(cls, s: str) -> "FieldSpec":
        s = s.strip()
        if s.upper() in ("QQ", "Q", "RATIONALS"):
            return cls(None)
        if s.upper().startswith("GF(") and s.endswith(")"):
            s = s[3:-1]
        try:
            return cls(int(s))
        except ValueError:
            raise ValueError(f"Unknown field: {s!r}") from None


@dataclass(frozen=True, eq=False)
class Matrix:
    """Sparse matrix; ``entries`` holds only nonzero positions."""

    field: FieldSpec
    rows: int
    cols: int
    entries: dict[tuple[int, int], Scalar] = field(default_factory=dict)

    def __post_init__(self):
        assert self.rows >= 0 and self.cols >= 0
        assert len(self.entries) <= self.rows * self.cols

    @classmethod
    def from_rows(cls, fs: FieldSpec, rows: Sequence[Sequence[Any]]) -> "Matrix":
        n = len(rows)
        m = len(rows[0]) if n else 0
        entries = {}
        for i, row in enumerate(rows):
            assert len(row) == m
            for j, x in enumerate(row):
                x = fs(x)
                if not fs.is_zero(x):
                    entries[(i, j)] = x
        return cls(fs, n, m, entries)

    @classmethod
    def from_columns(cls, fs: FieldSpec, nrows: int, columns: Iterable[dict[int, Scalar]]) -> "Matrix":
        entries = {}
        ncols = 0
        for j, col in enumerate(columns):
            ncols = j + 1
            for i, x in col.items():
                if not fs.is_zero(x):
                    entries[(i, j)] = x
        return cls(fs, nrows, ncols, entries)

    @classmethod
    def zeros(cls, fs: FieldSpec, rows: int, cols: int) -> "Matrix":
        return cls(fs, rows, cols, {})

    @classmethod
    def identity(cls, fs: FieldSpec, n: int) -> "Matrix":
        return cls(fs, n, n, {(i, i): fs.one for i in range(n)})

    def to_domain_matrix(self) -> DomainMatrix:
        dm = DomainMatrix.from_dok(self.entries, (self.rows, self.cols), self.field.domain)
        if self.rows < DENSE_BELOW and self.cols < DENSE_BELOW:
            dm = dm.to_dense()
        return dm

    def to_rows(self) -> list[list[Scalar]]:
        out = [[self.field.zero] * self.cols for _ in range(self.rows)]
        for (i, j), x in self.entries.items():
            out[i][j] = x
        return out

    def column(self, j: int) -> dict[int, Scalar]:
        return {i: x for (i, jj), x in self.entries.items() if jj == j}

    def matvec(self, v: Sequence[Scalar]) -> list[Scalar]:
        if len(v) != self.cols:
            raise ValueError(f"Dimension mismatch: {self.rows}x{self.cols} matrix against vector of length {len(v)}")
        out = [self.field.zero] * self.rows
        for (i, j), x in self.entries.items():
            out[i] += x * v[j]
        return out

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise ValueError(f"Dimension mismatch: {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        by_row = defaultdict(list)
        for (k, j), y in other.entries.items():
            by_row[k].append((j, y))
        acc: dict[tuple[int, int], Scalar] = defaultdict(lambda: self.field.zero)
        for (i, k), x in self.entries.items():
            for j, y in by_row.get(k, ()):
                acc[(i, j)] += x * y
        return Matrix(self.field, self.rows, other.cols, {ij: x for ij, x in acc.items() if not self.field.is_zero(x)})

    def transpose(self) -> "Matrix":
        return Matrix(self.field, self.cols, self.rows, {(j, i): x for (i, j), x in self.entries.items()})

    def permuted(self, row_order: Sequence[int], col_order: Sequence[int]) -> "Matrix":
        rinv = {old: new for new, old in enumerate(row_order)}
        cinv = {old: new for new, old in enumerate(col_order)}
        return Matrix(self.field, self.rows, self.cols, {(rinv[i], cinv[j]): x for (i, j), x in self.entries.items()})

    def __str__(self) -> str:
        return "[" + ", ".join("[" + ", ".join(self.field.format(x) for x in row) + "]" for row in self.to_rows()) + "]"


def rref(m: Matrix) -> tuple[dict[int, dict[int, Scalar]], tuple[int, ...]]:
    """Reduced row echelon form as ``{row: {col: value}}`` plus pivot columns.

    Pivots are taken in column order, so the output is deterministic.
    """
    if m.rows == 0 or m.cols == 0 or not m.entries:
        return {}, ()
    reduced, pivots = m.to_domain_matrix().rref()
    K = m.field.domain
    rows: dict[int, dict[int, Scalar]] = defaultdict(dict)
    for (i, j), x in reduced.to_dok().items():
        if not K.is_zero(x):
            rows[i][j] = x
    return dict(rows), tuple(pivots)


def rank(m: Matrix) -> int:
    return len(rref(m)[1])


def kernel_basis(m: Matrix) -> list[list[Scalar]]:
    """Basis of the null space, one vector per free column (in column order)."""
    fs = m.field
    rows, pivots = rref(m)
    pivot_row = {p: i for i, p in enumerate(pivots)}
    basis = []
    for f in range(m.cols):
        if f in pivot_row:
            continue
        v = [fs.zero] * m.cols
        v[f] = fs.one
        for p, i in pivot_row.items():
            x = rows.get(i, {}).get(f)
            if x is not None:
                v[p] = -x
        basis.append(v)
    return basis


def solve(m: Matrix, b: Sequence[Scalar]) -> list[Scalar] | None:
    """Some x with m x = b, or None when the system is inconsistent."""
    if len(b) != m.rows:
        raise ValueError(f"Dimension mismatch: {m.rows} rows against right-hand side of length {len(b)}")
    fs = m.field
    if m.cols == 0:
        return [] if all(fs.is_zero(x) for x in b) else None
    entries = dict(m.entries)
    for i, x in enumerate(b):
        if not fs.is_zero(x):
            entries[(i, m.cols)] = x
    rows, pivots = rref(Matrix(fs, m.rows, m.cols + 1, entries))
    if pivots and pivots[-1] == m.cols:
        return None
    x = [fs.zero] * m.cols
    for i, p in enumerate(pivots):
        x[p] = rows.get(i, {}).get(m.cols, fs.zero)
    return x


class Solver:
    """Repeated solves against one fixed matrix, reusing a single elimination.

    Columns are the spanning vectors; ``coordinates`` returns coefficients of a
    vector in terms of the pivot columns, or None when it is outside the span.
    """

    def __init__(self, m: Matrix):
        self.m = m
        fs = m.field
        # eliminate on [m | I] so every later right-hand side is one product away
        entries = dict(m.entries)
        for i in range(m.rows):
            entries[(i, m.cols + i)] = fs.one
        rows, pivots = rref(Matrix(fs, m.rows, m.cols + m.rows, entries))
        self.pivots = tuple(p for p in pivots if p < m.cols)
        self._rows = rows
        self._rank = len(self.pivots)

    def coordinates(self, b: dict[int, Scalar]) -> dict[int, Scalar] | None:
        fs = self.m.field
        n = self.m.cols
        # row i of the transform applied to b
        transformed = {}
        for i, row in self._rows.items():
            acc = fs.zero
            for j, x in row.items():
                if j >= n:
                    y = b.get(j - n)
                    if y is not None:
                        acc += x * y
            if not fs.is_zero(acc):
                transformed[i] = acc
        if any(i >= self._rank for i in transformed):
            return None
        return {self.pivots[i]: x for i, x in transformed.items()}
