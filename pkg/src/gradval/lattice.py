"""Exact integer linear algebra.

Everything here works on Python ints (arbitrary precision) or
``fractions.Fraction``; no floating point is involved anywhere.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, prod
from typing import Iterable, Sequence


class LatticeError(ValueError):
    pass


class IntMatrix:
    """Immutable dense integer matrix."""

    __slots__ = ("_rows", "nrows", "ncols")

    def __init__(self, rows: Iterable[Iterable[int]], ncols: int | None = None):
        data = tuple(tuple(int(x) for x in r) for r in rows)
        if data:
            widths = {len(r) for r in data}
            if len(widths) != 1:
                raise LatticeError("ragged matrix rows")
            width = widths.pop()
        else:
            width = ncols or 0
        self._rows = data
        self.nrows = len(data)
        self.ncols = width

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls([[int(i == j) for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, m: int, n: int) -> "IntMatrix":
        return cls([[0] * n for _ in range(m)], ncols=n)

    @classmethod
    def diag(cls, entries: Sequence[int]) -> "IntMatrix":
        n = len(entries)
        return cls([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    @property
    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self._rows]

    def row(self, i: int) -> tuple[int, ...]:
        return self._rows[i]

    def col(self, j: int) -> tuple[int, ...]:
        return tuple(r[j] for r in self._rows)

    def __getitem__(self, ij):
        i, j = ij
        return self._rows[i][j]

    def __iter__(self):
        return iter(self._rows)

    def __eq__(self, other):
        if isinstance(other, IntMatrix):
            return self._rows == other._rows and self.shape == other.shape
        return NotImplemented

    def __hash__(self):
        return hash((self._rows, self.shape))

    def __repr__(self):
        return f"IntMatrix({self.tolist()})"

    def transpose(self) -> "IntMatrix":
        return IntMatrix(zip(*self._rows), ncols=self.nrows) if self.nrows else IntMatrix.zeros(self.ncols, 0)

    T = property(transpose)

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        other = as_matrix(other)
        if self.ncols != other.nrows:
            raise LatticeError(f"shape mismatch {self.shape} @ {other.shape}")
        cols = [other.col(j) for j in range(other.ncols)]
        return IntMatrix(
            [[sum(a * b for a, b in zip(r, c)) for c in cols] for r in self._rows],
            ncols=other.ncols,
        )

    def apply(self, v: Sequence) -> list:
        """Matrix times column vector (entries may be Fractions)."""
        if len(v) != self.ncols:
            raise LatticeError("dimension mismatch")
        return [sum(a * b for a, b in zip(r, v)) for r in self._rows]

    def rapply(self, v: Sequence) -> list:
        """Row vector times matrix."""
        if len(v) != self.nrows:
            raise LatticeError("dimension mismatch")
        return [sum(v[i] * self._rows[i][j] for i in range(self.nrows)) for j in range(self.ncols)]


def as_matrix(a) -> IntMatrix:
    return a if isinstance(a, IntMatrix) else IntMatrix(a)


def _square(a) -> IntMatrix:
    a = as_matrix(a)
    if not a.is_square:
        raise LatticeError(f"expected a square matrix, got shape {a.shape}")
    return a


def det(a) -> int:
    """Bareiss fraction-free determinant."""
    a = _square(a)
    n = a.nrows
    if n == 0:
        return 1
    m = a.tolist()
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def adjugate(a) -> IntMatrix:
    a = _square(a)
    n = a.nrows
    if n == 1:
        adj = IntMatrix([[1]])
    else:
        rows = a.tolist()
        cof = [[0] * n for _ in range(n)]
        for i in range(n):
            for j in range(n):
                minor = [r[:j] + r[j + 1:] for k, r in enumerate(rows) if k != i]
                cof[i][j] = (-1) ** (i + j) * det(minor)
        adj = IntMatrix(cof).transpose()
    d = det(a)
    if a @ adj != IntMatrix.diag([d] * n):
        raise AssertionError("adjugate identity A*adj(A) = det(A)*I failed")
    return adj


def is_unimodular(u) -> bool:
    u = as_matrix(u)
    return u.is_square and abs(det(u)) == 1


# -- Hermite normal form ---------------------------------------------------

def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def hermite_normal_form(a) -> tuple[IntMatrix, IntMatrix]:
    """Row-style HNF: returns ``(H, U)`` with ``U @ A == H``.

    ``H`` is in row echelon form with positive pivots, entries above each
    pivot reduced into ``[0, pivot)``, and zero rows at the bottom.
    """
    a = as_matrix(a)
    m, n = a.shape
    h = a.tolist()
    u = IntMatrix.identity(m).tolist()
    r = 0
    for c in range(n):
        if r == m:
            break
        # fold every entry below row r into row r via extended gcd
        for i in range(r + 1, m):
            if h[i][c] == 0:
                continue
            if h[r][c] == 0:
                h[r], h[i] = h[i], h[r]
                u[r], u[i] = u[i], u[r]
                continue
            g, x, y = _xgcd(h[r][c], h[i][c])
            p, q = h[r][c] // g, h[i][c] // g
            hr, hi = h[r], h[i]
            h[r] = [x * s + y * t for s, t in zip(hr, hi)]
            h[i] = [-q * s + p * t for s, t in zip(hr, hi)]
            ur, ui = u[r], u[i]
            u[r] = [x * s + y * t for s, t in zip(ur, ui)]
            u[i] = [-q * s + p * t for s, t in zip(ur, ui)]
        if h[r][c] == 0:
            continue
        if h[r][c] < 0:
            h[r] = [-x for x in h[r]]
            u[r] = [-x for x in u[r]]
        piv = h[r][c]
        for i in range(r):
            f = h[i][c] // piv
            if f:
                h[i] = [s - f * t for s, t in zip(h[i], h[r])]
                u[i] = [s - f * t for s, t in zip(u[i], u[r])]
        r += 1
    return IntMatrix(h, ncols=n), IntMatrix(u, ncols=m)


def row_lattice_basis(a) -> IntMatrix:
    """Nonzero rows of the HNF: a basis of the lattice spanned by the rows."""
    h, _ = hermite_normal_form(a)
    rows = [r for r in h if any(r)]
    return IntMatrix(rows, ncols=h.ncols)


# -- Smith normal form -----------------------------------------------------

def smith_normal_form(a) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Return ``(D, U, V)`` with ``U @ A @ V == D``.

    ``D`` is diagonal with nonnegative entries and ``d_i | d_{i+1}``;
    ``U`` and ``V`` are unimodular.
    """
    a = as_matrix(a)
    m, n = a.shape
    d = a.tolist()
    u = IntMatrix.identity(m).tolist()
    v = IntMatrix.identity(n).tolist()

    def swap_rows(i, j):
        d[i], d[j] = d[j], d[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in d:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, f):
        d[dst] = [x - f * y for x, y in zip(d[dst], d[src])]
        u[dst] = [x - f * y for x, y in zip(u[dst], u[src])]

    def add_col(dst, src, f):
        for row in d:
            row[dst] -= f * row[src]
        for row in v:
            row[dst] -= f * row[src]

    for t in range(min(m, n)):
        while True:
            nz = [(abs(d[i][j]), i, j) for i in range(t, m) for j in range(t, n) if d[i][j]]
            if not nz:
                break
            _, i, j = min(nz)
            swap_rows(t, i)
            swap_cols(t, j)
            piv = d[t][t]
            dirty = False
            for i in range(t + 1, m):
                q = d[i][t] // piv
                if q:
                    add_row(i, t, q)
                dirty |= d[i][t] != 0
            for j in range(t + 1, n):
                q = d[t][j] // piv
                if q:
                    add_col(j, t, q)
                dirty |= d[t][j] != 0
            if dirty:
                continue
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if d[i][j] % piv),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, -1)
        if t < m and t < n and d[t][t] < 0:
            d[t] = [-x for x in d[t]]
            u[t] = [-x for x in u[t]]

    D, U, V = IntMatrix(d, ncols=n), IntMatrix(u, ncols=m), IntMatrix(v, ncols=n)
    if U @ a @ V != D:
        raise AssertionError("Smith normal form transform check failed")
    return D, U, V


def invariant_factors(a) -> list[int]:
    """Diagonal of the Smith normal form (zeros included)."""
    D, _, _ = smith_normal_form(a)
    return [D[i, i] for i in range(min(D.shape))]


@dataclass(frozen=True)
class QuotientStructure:
    """Finite abelian group Z/d_1 + ... + Z/d_k with d_i | d_{i+1}, d_i > 1."""

    invariant_factors: tuple[int, ...]
    order: int

    def __post_init__(self):
        fs = self.invariant_factors
        if any(f <= 1 for f in fs):
            raise LatticeError("invariant factors must exceed 1")
        if any(b % a for a, b in zip(fs, fs[1:])):
            raise LatticeError("invariant factors must form a divisibility chain")
        if prod(fs) != self.order:
            raise LatticeError("order must equal the product of invariant factors")


def quotient_structure(a) -> QuotientStructure:
    """Structure of Z^s / A^t Z^s for a nonsingular square ``A``.

    Trivial factors (1) are dropped, so the trivial group has no factors.
    """
    a = _square(a)
    if det(a) == 0:
        raise LatticeError("singular matrix has infinite cokernel")
    fs = tuple(f for f in invariant_factors(a.transpose()) if f != 1)
    return QuotientStructure(fs, prod(fs))


def cokernel_representatives(a) -> list[tuple[int, ...]]:
    """One integer vector per class of Z^s / A Z^s (column lattice of A).

    With ``U A V = D`` the map ``x -> U x`` identifies the quotient with
    the product of Z/d_i, so ``U^{-1} k`` for ``0 <= k_i < d_i`` is a
    complete, irredundant set of representatives.
    """
    a = _square(a)
    if det(a) == 0:
        raise LatticeError("singular matrix has infinite cokernel")
    D, U, _ = smith_normal_form(a)
    s = a.nrows
    uinv = adjugate(U)
    sgn = det(U)
    boxes = [range(D[i, i]) for i in range(s)]
    reps = []
    for k in itertools.product(*boxes):
        reps.append(tuple(sgn * x for x in uinv.apply(k)))
    return reps


def cokernel_class(a, x: Sequence[int]) -> tuple[int, ...]:
    """Canonical label of the class of ``x`` in Z^s / A Z^s."""
    a = _square(a)
    D, U, _ = smith_normal_form(a)
    ux = U.apply(list(x))
    return tuple(ux[i] % D[i, i] for i in range(a.nrows))


# -- solving ---------------------------------------------------------------

def solve_integral(a, b: Sequence[int]) -> list[int] | None:
    """Integer solution of ``A x = b`` or ``None``.

    Uses the HNF of ``A^t``: with ``U A^t = H`` we get ``A U^t = H^t`` and
    solve ``H^t y = b`` by forward substitution along the pivots.
    """
    a = as_matrix(a)
    b = [int(x) for x in b]
    if len(b) != a.nrows:
        raise LatticeError(f"right-hand side has length {len(b)}, expected {a.nrows}")
    if a.ncols == 0:
        return [] if not any(b) else None
    h, u = hermite_normal_form(a.transpose())
    resid = list(b)
    y = [0] * h.nrows
    for i, row in enumerate(h):
        piv = next((j for j, x in enumerate(row) if x), None)
        if piv is None:
            break
        if any(resid[:piv]):
            return None
        q, r = divmod(resid[piv], row[piv])
        if r:
            return None
        y[i] = q
        resid = [s - q * t for s, t in zip(resid, row)]
    if any(resid):
        return None
    x = u.transpose().apply(y)
    assert a.apply(x) == b
    return x


def rational_solve(rows: Sequence[Sequence], rhs: Sequence) -> list[Fraction] | None:
    """Some rational solution of a linear system (free variables set to 0)."""
    m = [[Fraction(x) for x in r] + [Fraction(c)] for r, c in zip(rows, rhs)]
    ncols = len(rows[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        pv = m[r][c]
        m[r] = [x / pv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    if any(row[-1] != 0 for row in m[r:]):
        return None
    x = [Fraction(0)] * ncols
    for i, c in enumerate(pivots):
        x[c] = m[i][-1]
    return x


def rational_rank(rows: Sequence[Sequence]) -> int:
    m = [[Fraction(x) for x in r] for r in rows]
    rank = 0
    ncols = len(m[0]) if m else 0
    for c in range(ncols):
        p = next((i for i in range(rank, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[rank], m[p] = m[p], m[rank]
        for i in range(rank + 1, len(m)):
            if m[i][c] != 0:
                f = m[i][c] / m[rank][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[rank])]
        rank += 1
    return rank


def nullspace(rows: Sequence[Sequence], ncols: int) -> list[list[Fraction]]:
    """Basis of the rational right kernel."""
    m = [[Fraction(x) for x in r] for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        pv = m[r][c]
        m[r] = [x / pv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    basis = []
    for free in (c for c in range(ncols) if c not in pivots):
        vec = [Fraction(0)] * ncols
        vec[free] = Fraction(1)
        for i, c in enumerate(pivots):
            vec[c] = -m[i][free]
        basis.append(vec)
    return basis


def common_denominator(values: Iterable) -> int:
    d = 1
    for x in values:
        den = Fraction(x).denominator
        d = d * den // gcd(d, den)
    return d
