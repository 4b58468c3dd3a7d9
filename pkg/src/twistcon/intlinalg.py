"""Exact integer linear algebra on small matrices (Python ints throughout)."""
from __future__ import annotations

from typing import Sequence

Matrix = tuple[tuple[int, ...], ...]
Vector = tuple[int, ...]


def as_matrix(rows: Sequence[Sequence[int]]) -> Matrix:
    return tuple(tuple(int(v) for v in row) for row in rows)


def identity(r: int) -> Matrix:
    return tuple(tuple(int(i == j) for j in range(r)) for i in range(r))


def matmul(a: Matrix, b: Matrix) -> Matrix:
    bt = tuple(zip(*b))
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a)


def matvec(a: Matrix, v: Sequence[int]) -> Vector:
    return tuple(sum(x * y for x, y in zip(row, v)) for row in a)


def sub(a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(x - y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def transpose(a: Matrix) -> Matrix:
    return tuple(zip(*a)) if a else a


def row_echelon(gens: Sequence[Sequence[int]], width: int) -> list[list[int]]:
    """Hermite normal form of the lattice spanned by the given row vectors.

    Returns nonzero rows in echelon form with positive pivots, and entries
    above each pivot reduced into ``[0, pivot)``; this basis is unique for
    the lattice.
    """
    rows = [list(r) for r in gens if any(r)]
    basis: list[list[int]] = []
    col = 0
    while rows and col < width:
        nz = [r for r in rows if r[col] != 0]
        if not nz:
            col += 1
            continue
        rest = [r for r in rows if r[col] == 0]
        # Euclid on column `col` across the rows that are nonzero there
        while len(nz) > 1:
            nz.sort(key=lambda r: abs(r[col]))
            piv = nz[0]
            nxt = [piv]
            for r in nz[1:]:
                q = r[col] // piv[col]
                r = [x - q * y for x, y in zip(r, piv)]
                if r[col] != 0:
                    nxt.append(r)
                elif any(r):
                    rest.append(r)
            nz = nxt
        piv = nz[0]
        if piv[col] < 0:
            piv = [-x for x in piv]
        basis.append(piv)
        rows = rest
        col += 1
    # reduce entries above pivots
    for i in range(len(basis)):
        pc = _pivot_col(basis[i])
        p = basis[i][pc]
        for j in range(i):
            q = basis[j][pc] // p
            if q:
                basis[j] = [x - q * y for x, y in zip(basis[j], basis[i])]
    return basis


def _pivot_col(row: Sequence[int]) -> int:
    for i, x in enumerate(row):
        if x != 0:
            return i
    raise ValueError("zero row")


def rank(a: Sequence[Sequence[int]]) -> int:
    width = len(a[0]) if a else 0
    return len(row_echelon(a, width))


class Sublattice:
    """A sublattice L of Z^r with a canonical coset representative map."""

    def __init__(self, generators: Sequence[Sequence[int]], r: int):
        self.r = r
        self.basis = row_echelon(generators, r)
        self.pivots = [_pivot_col(b) for b in self.basis]

    @classmethod
    def image_of(cls, a: Matrix) -> "Sublattice":
        """Column span of a (the image a Z^r)."""
        return cls(transpose(a), len(a))

    @property
    def rank(self) -> int:
        return len(self.basis)

    def index(self) -> int | None:
        """[Z^r : L], or None when infinite."""
        if self.rank < self.r:
            return None
        out = 1
        for b, c in zip(self.basis, self.pivots):
            out *= b[c]
        return out

    def reduce(self, v: Sequence[int]) -> Vector:
        """Canonical representative of v + L."""
        v = list(v)
        for b, c in zip(self.basis, self.pivots):
            q = v[c] // b[c]
            if q:
                v = [x - q * y for x, y in zip(v, b)]
        return tuple(v)

    def contains(self, v: Sequence[int]) -> bool:
        return not any(self.reduce(v))
