"""Exact arithmetic and dense linear algebra over a prime field GF(p).

Everything downstream (encoding, repair, secrecy audits, entropy
computations) reduces to rank and solve over GF(p), so this module keeps
all arithmetic exact: entries are machine integers in [0, p-1], every
reduction is eager, and elimination always picks the first nonzero pivot
in column order.  Identical inputs therefore produce bit-identical
echelon forms, ranks, and solutions on every run.

Only prime fields are supported.  The default modulus used elsewhere in
the package is 257, which is large enough for every desk-scale system
(p >= n + 1 is all that is ever required) while keeping exhaustive tests
cheap.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

from .errors import (
    BadParameters,
    DuplicatePoint,
    SingularMatrix,
    ZeroInverse,
    ZeroPoint,
)

DEFAULT_PRIME = 257


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    q = 2
    while q * q <= p:
        if p % q == 0:
            return False
        q += 1
    return True


@dataclass(frozen=True)
class FieldModulus:
    """A prime modulus p with 2 < p < 2**16, checked by trial division."""

    p: int

    def __post_init__(self) -> None:
        if not isinstance(self.p, int) or not 2 < self.p < 2**16:
            raise BadParameters(f"modulus must satisfy 2 < p < 2^16, got {self.p!r}")
        if not _is_prime(self.p):
            raise BadParameters(f"modulus {self.p} is not prime")

    def check(self, a: int) -> int:
        if not 0 <= a < self.p:
            raise BadParameters(f"element {a} outside [0, {self.p - 1}]")
        return a

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.p

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.p

    def neg(self, a: int) -> int:
        return (-a) % self.p

    def mul(self, a: int, b: int) -> int:
        return (a * b) % self.p

    def inv(self, a: int) -> int:
        """Multiplicative inverse of a nonzero element (Fermat)."""
        if a % self.p == 0:
            raise ZeroInverse("zero has no multiplicative inverse")
        return pow(a, self.p - 2, self.p)

    @property
    def nonzero(self) -> range:
        return range(1, self.p)


def modulus_of(p: "int | FieldModulus") -> FieldModulus:
    """Coerce an int or FieldModulus into a FieldModulus."""
    return p if isinstance(p, FieldModulus) else FieldModulus(p)


def _eliminate(rows: list[list[int]], p: int) -> list[int]:
    """In-place forward elimination; returns the pivot column list.

    Pivot choice is deterministic: columns are scanned left to right and
    the first row with a nonzero entry becomes the pivot row.  Pivot rows
    are normalized so rows end in reduced echelon form after a back pass.
    """
    n_rows = len(rows)
    n_cols = len(rows[0]) if rows else 0
    pivots: list[int] = []
    r = 0
    for c in range(n_cols):
        if r == n_rows:
            break
        pivot_row = None
        for i in range(r, n_rows):
            if rows[i][c] % p:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
        inv = pow(rows[r][c], p - 2, p)
        if inv != 1:
            row = rows[r]
            for j in range(c, n_cols):
                row[j] = row[j] * inv % p
        prow = rows[r]
        for i in range(n_rows):
            if i == r:
                continue
            factor = rows[i][c] % p
            if factor:
                row = rows[i]
                for j in range(c, n_cols):
                    row[j] = (row[j] - factor * prow[j]) % p
        pivots.append(c)
        r += 1
    return pivots


def rank_of_rows(rows: Iterable[Sequence[int]], modulus: "int | FieldModulus") -> int:
    """Row rank of an iterable of coefficient rows.

    This is the allocation-light path used by audits and entropy sweeps;
    FieldMatrix.rank delegates here.  Duplicate and zero rows are fine.
    """
    p = modulus_of(modulus).p
    work = [list(row) for row in rows]
    if not work:
        return 0
    return len(_eliminate(work, p))


@dataclass(frozen=True)
class FieldMatrix:
    """A dense rows x cols matrix over GF(p), stored row-major.

    Instances are immutable; all operations return new matrices.
    """

    rows: int
    cols: int
    entries: tuple[int, ...]
    modulus: FieldModulus

    def __post_init__(self) -> None:
        if self.rows < 0 or self.cols < 0:
            raise BadParameters("matrix dimensions must be nonnegative")
        if len(self.entries) != self.rows * self.cols:
            raise BadParameters(
                f"{self.rows}x{self.cols} matrix needs {self.rows * self.cols} "
                f"entries, got {len(self.entries)}"
            )
        p = self.modulus.p
        for e in self.entries:
            if not 0 <= e < p:
                raise BadParameters(f"entry {e} outside [0, {p - 1}]")

    @classmethod
    def from_rows(
        cls, rows: Sequence[Sequence[int]], modulus: "int | FieldModulus"
    ) -> "FieldMatrix":
        m = modulus_of(modulus)
        n_rows = len(rows)
        n_cols = len(rows[0]) if n_rows else 0
        flat: list[int] = []
        for row in rows:
            if len(row) != n_cols:
                raise BadParameters("ragged rows")
            flat.extend(v % m.p for v in row)
        return cls(n_rows, n_cols, tuple(flat), m)

    @classmethod
    def identity(cls, n: int, modulus: "int | FieldModulus") -> "FieldMatrix":
        m = modulus_of(modulus)
        return cls(n, n, tuple(1 if i == j else 0 for i in range(n) for j in range(n)), m)

    @classmethod
    def zeros(cls, rows: int, cols: int, modulus: "int | FieldModulus") -> "FieldMatrix":
        return cls(rows, cols, (0,) * (rows * cols), modulus_of(modulus))

    def at(self, i: int, j: int) -> int:
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple[int, ...]:
        return self.entries[i * self.cols : (i + 1) * self.cols]

    def to_rows(self) -> list[list[int]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def transpose(self) -> "FieldMatrix":
        ent = tuple(self.at(i, j) for j in range(self.cols) for i in range(self.rows))
        return FieldMatrix(self.cols, self.rows, ent, self.modulus)

    def mul(self, other: "FieldMatrix") -> "FieldMatrix":
        if self.cols != other.rows:
            raise BadParameters(
                f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}"
            )
        if self.modulus != other.modulus:
            raise BadParameters("mixed moduli")
        p = self.modulus.p
        out: list[int] = []
        other_t = other.transpose()
        for i in range(self.rows):
            a = self.row(i)
            for j in range(other.cols):
                b = other_t.row(j)
                out.append(sum(x * y for x, y in zip(a, b)) % p)
        return FieldMatrix(self.rows, other.cols, tuple(out), self.modulus)

    def rank(self) -> int:
        return rank_of_rows(self.to_rows(), self.modulus)

    def rref(self) -> tuple["FieldMatrix", tuple[int, ...]]:
        """Reduced row echelon form together with the pivot columns."""
        work = self.to_rows()
        pivots = _eliminate(work, self.modulus.p) if work else []
        flat = tuple(v for row in work for v in row)
        return FieldMatrix(self.rows, self.cols, flat, self.modulus), tuple(pivots)

    def solve(self, b: "FieldMatrix") -> "FieldMatrix":
        """Solve a x = b for square invertible a; raises SingularMatrix."""
        if self.rows != self.cols:
            raise SingularMatrix("coefficient matrix must be square")
        if b.rows != self.rows:
            raise BadParameters("right-hand side has wrong number of rows")
        if self.modulus != b.modulus:
            raise BadParameters("mixed moduli")
        n = self.rows
        work = [list(self.row(i)) + list(b.row(i)) for i in range(n)]
        pivots = _eliminate(work, self.modulus.p) if n else []
        if len(pivots) < n or any(c >= n for c in pivots):
            raise SingularMatrix(f"matrix has rank {len(pivots)} < {n}")
        flat = tuple(v for row in work for v in row[n:])
        return FieldMatrix(n, b.cols, flat, self.modulus)

    def inverse(self) -> "FieldMatrix":
        return self.solve(FieldMatrix.identity(self.rows, self.modulus))


def vandermonde(
    points: Sequence[int], width: int, modulus: "int | FieldModulus"
) -> FieldMatrix:
    """Rows (1, x, x^2, ..., x^(width-1)) for each evaluation point x.

    Points must be distinct and nonzero; any width >= 1 subset of d rows
    of a width-d matrix built this way is invertible, which is the
    structural fact behind both repair and data collection.
    """
    m = modulus_of(modulus)
    if width < 1:
        raise BadParameters("width must be >= 1")
    if not points:
        raise BadParameters("need at least one evaluation point")
    seen: set[int] = set()
    for x in points:
        xr = x % m.p
        if xr == 0:
            raise ZeroPoint(f"evaluation point {x} is zero mod {m.p}")
        if xr in seen:
            raise DuplicatePoint(f"evaluation point {x} repeated mod {m.p}")
        seen.add(xr)
    flat: list[int] = []
    for x in points:
        acc = 1
        for _ in range(width):
            flat.append(acc)
            acc = acc * x % m.p
    return FieldMatrix(len(points), width, tuple(flat), m)


@lru_cache(maxsize=None)
def cached_vandermonde(
    points: tuple[int, ...], width: int, p: int
) -> FieldMatrix:
    """Memoized vandermonde for the hot paths (hashable arguments only)."""
    return vandermonde(points, width, FieldModulus(p))
