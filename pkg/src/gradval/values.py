"""Finitely generated ordered abelian value groups.

An element is a vector of rational coordinates.  The first ``lex_prefix``
coordinates are compared lexicographically; the remaining ones are the
coefficients of an embedding into the reals, sum(c_i * b_i), where each
basis constant b_i is either the rational unit or an irrational number
known through nested rational intervals.  The basis constants are
declared linearly independent over Q, so two elements are equal exactly
when their coordinates agree and any nonzero difference has a sign that
finite interval refinement will decide.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt
from typing import Callable, Iterable, Sequence

from . import lattice

DEFAULT_MAX_BITS = 256


class ValueGroupError(ValueError):
    pass


class RefinementCapExceeded(ValueGroupError):
    """Sign of a combination stayed undecided up to the precision cap.

    This only happens when the basis constants are not actually linearly
    independent over Q.
    """


# -- basis constants -------------------------------------------------------

class BasisReal:
    """A real constant with rational enclosures of width at most 2**-bits."""

    tag: str

    def interval(self, bits: int) -> tuple[Fraction, Fraction]:
        raise NotImplementedError

    def __repr__(self):
        return f"<{self.tag}>"

    def __eq__(self, other):
        return isinstance(other, BasisReal) and self.tag == other.tag

    def __hash__(self):
        return hash(self.tag)


class RationalUnit(BasisReal):
    tag = "rat"

    def interval(self, bits):
        return Fraction(1), Fraction(1)


class _Cached(BasisReal):
    def __init__(self):
        self._cache: dict[int, tuple[Fraction, Fraction]] = {}
        self._lock = threading.Lock()

    def interval(self, bits):
        with self._lock:
            hit = self._cache.get(bits)
        if hit is None:
            hit = self._compute(bits)
            lo, hi = hit
            if not lo <= hi or hi - lo > Fraction(1, 2 ** bits):
                raise ValueGroupError(f"bad enclosure for {self.tag} at {bits} bits")
            with self._lock:
                self._cache[bits] = hit
        return hit

    def _compute(self, bits):
        raise NotImplementedError


class SqrtConstant(_Cached):
    """sqrt(p) for a positive non-square integer p."""

    def __init__(self, p: int):
        super().__init__()
        if p <= 1 or isqrt(p) ** 2 == p:
            raise ValueGroupError(f"sqrt({p}) is rational")
        self.p = p
        self.tag = f"sqrt:{p}"

    def _compute(self, bits):
        scale = 1 << bits
        a = isqrt(self.p * scale * scale)
        return Fraction(a, scale), Fraction(a + 1, scale)


def _arctan_inv_bounds(x: int, terms: int) -> tuple[Fraction, Fraction]:
    # alternating series for arctan(1/x); consecutive partial sums bracket it
    s = Fraction(0)
    prev = s
    for k in range(terms + 1):
        prev = s
        s += Fraction((-1) ** k, (2 * k + 1) * x ** (2 * k + 1))
    return min(prev, s), max(prev, s)


class PiConstant(_Cached):
    """pi via Machin's formula with exact alternating-series brackets."""

    tag = "pi"

    def __init__(self):
        super().__init__()

    def _compute(self, bits):
        terms = 1
        while True:
            lo5, hi5 = _arctan_inv_bounds(5, terms)
            lo239, hi239 = _arctan_inv_bounds(239, max(1, terms // 3))
            lo = 16 * lo5 - 4 * hi239
            hi = 16 * hi5 - 4 * lo239
            if hi - lo <= Fraction(1, 2 ** bits):
                return lo, hi
            terms += max(1, terms // 2)


class IntervalConstant(_Cached):
    """User supplied constant: ``source(bits)`` returns an enclosure.

    ``source`` may also be a finite list of nested intervals; requesting
    more precision than the list provides raises ``RefinementCapExceeded``.
    """

    def __init__(self, name: str, source: Callable[[int], tuple] | Sequence[Sequence]):
        super().__init__()
        self.tag = f"custom:{name}"
        self.name = name
        if callable(source):
            self._source = source
            self._intervals = None
        else:
            ivs = [(Fraction(lo), Fraction(hi)) for lo, hi in source]
            for (a, b), (c, d) in zip(ivs, ivs[1:]):
                if not (a <= c <= d <= b) or (d - c) >= (b - a):
                    raise ValueGroupError(f"intervals for {name} are not strictly nested")
            self._intervals = ivs
            self._source = None

    def _compute(self, bits):
        if self._source is not None:
            lo, hi = self._source(bits)
            return Fraction(lo), Fraction(hi)
        for lo, hi in self._intervals:
            if hi - lo <= Fraction(1, 2 ** bits):
                return lo, hi
        raise RefinementCapExceeded(f"interval list for {self.name} exhausted at {bits} bits")


_PI = PiConstant()
_SQRT: dict[int, SqrtConstant] = {}


def basis_constant(tag) -> BasisReal:
    """Resolve a descriptor: ``"rat"``, ``"pi"``, ``"sqrt:P"`` or a BasisReal."""
    if isinstance(tag, BasisReal):
        return tag
    if tag == "rat":
        return RationalUnit()
    if tag == "pi":
        return _PI
    if isinstance(tag, str) and tag.startswith("sqrt:"):
        p = int(tag[5:])
        if p not in _SQRT:
            _SQRT[p] = SqrtConstant(p)
        return _SQRT[p]
    raise ValueGroupError(f"unknown basis constant {tag!r}")


# -- groups and elements ---------------------------------------------------

@dataclass(frozen=True, eq=False)
class OrderedGroup:
    basis: tuple[BasisReal, ...]
    lex_prefix: int = 0
    max_bits: int = DEFAULT_MAX_BITS
    truncation: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "basis", tuple(basis_constant(b) for b in self.basis))
        if len(set(self.basis)) != len(self.basis):
            raise ValueGroupError("basis constants must be pairwise distinct")
        if self.lex_prefix < 0:
            raise ValueGroupError("lex_prefix must be nonnegative")

    @classmethod
    def of(cls, *tags, lex_prefix: int = 0, **kw) -> "OrderedGroup":
        return cls(tuple(tags), lex_prefix, **kw)

    @property
    def rank(self) -> int:
        return self.lex_prefix + len(self.basis)

    @property
    def archimedean(self) -> bool:
        return self.lex_prefix == 0

    def __call__(self, *coords) -> "GroupElement":
        if len(coords) == 1 and isinstance(coords[0], (list, tuple)):
            coords = tuple(coords[0])
        return GroupElement(self, tuple(Fraction(c) for c in coords))

    def zero(self) -> "GroupElement":
        return self(*([0] * self.rank))

    def unit(self, i: int) -> "GroupElement":
        return self(*[int(i == j) for j in range(self.rank)])

    def descriptor(self) -> dict:
        out = {"basis": [b.tag for b in self.basis], "lex_prefix": self.lex_prefix}
        if self.truncation is not None:
            out["truncation"] = self.truncation
        return out

    def real_sign(self, coeffs: Sequence[Fraction]) -> int:
        """Sign of sum(coeffs[i] * basis[i]) by interval refinement."""
        if not any(coeffs):
            return 0
        bits = 8
        while True:
            lo = hi = Fraction(0)
            for c, b in zip(coeffs, self.basis):
                if not c:
                    continue
                blo, bhi = b.interval(bits)
                if c > 0:
                    lo += c * blo
                    hi += c * bhi
                else:
                    lo += c * bhi
                    hi += c * blo
            if lo > 0:
                return 1
            if hi < 0:
                return -1
            if bits >= self.max_bits:
                raise RefinementCapExceeded(
                    f"sign of {list(map(str, coeffs))} over {self.basis} undecided at "
                    f"{bits} bits; basis constants are probably Q-dependent"
                )
            bits = min(2 * bits, self.max_bits)

    def real_enclosure(self, coords: Sequence[Fraction], bits: int = 32) -> tuple[Fraction, Fraction]:
        """Rational enclosure of the embedded real part of an element."""
        lo = hi = Fraction(0)
        for c, b in zip(coords[self.lex_prefix:], self.basis):
            if not c:
                continue
            blo, bhi = b.interval(bits)
            if c > 0:
                lo, hi = lo + c * blo, hi + c * bhi
            else:
                lo, hi = lo + c * bhi, hi + c * blo
        return lo, hi


@dataclass(frozen=True)
class GroupElement:
    group: OrderedGroup = field(compare=False)
    coords: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.coords) != self.group.rank:
            raise ValueGroupError(
                f"element has {len(self.coords)} coordinates, group rank is {self.group.rank}"
            )

    def _check(self, other: "GroupElement"):
        if not isinstance(other, GroupElement) or other.group is not self.group:
            raise ValueGroupError("elements belong to different groups")

    def __add__(self, other):
        self._check(other)
        return GroupElement(self.group, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other):
        self._check(other)
        return GroupElement(self.group, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self):
        return GroupElement(self.group, tuple(-a for a in self.coords))

    def __mul__(self, k):
        k = Fraction(k)
        return GroupElement(self.group, tuple(k * a for a in self.coords))

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not any(self.coords)

    def sign(self) -> int:
        g = self.group
        for c in self.coords[: g.lex_prefix]:
            if c:
                return 1 if c > 0 else -1
        return g.real_sign(self.coords[g.lex_prefix:])

    def __lt__(self, other):
        return compare(self, other) < 0

    def __le__(self, other):
        return compare(self, other) <= 0

    def __gt__(self, other):
        return compare(self, other) > 0

    def __ge__(self, other):
        return compare(self, other) >= 0

    def __str__(self):
        return "(" + ", ".join(str(c) for c in self.coords) + ")"

    def tolist(self) -> list[str]:
        return [str(c) for c in self.coords]


def add(a: GroupElement, b: GroupElement) -> GroupElement:
    return a + b


def compare(a: GroupElement, b: GroupElement) -> int:
    """-1, 0 or 1 according to the group order."""
    a._check(b)
    if a.coords == b.coords:
        return 0
    return (a - b).sign()


def minimum(elems: Iterable[GroupElement]) -> GroupElement:
    it = iter(elems)
    best = next(it)
    for x in it:
        if compare(x, best) < 0:
            best = x
    return best


def _integer_system(vectors: Sequence[Sequence[Fraction]]) -> tuple[list[list[int]], int]:
    den = lattice.common_denominator(c for v in vectors for c in v)
    return [[int(c * den) for c in v] for v in vectors], den


def in_subgroup(gamma: GroupElement, gens: Sequence[GroupElement]) -> list[int] | None:
    """Integer coefficients expressing ``gamma`` in the generators, or None."""
    for g in gens:
        gamma._check(g)
    if not gens:
        return [] if gamma.is_zero() else None
    ints, _ = _integer_system([g.coords for g in gens] + [gamma.coords])
    cols, target = ints[:-1], ints[-1]
    mat = [list(row) for row in zip(*cols)]
    return lattice.solve_integral(mat, target)


def in_subgroup_coords(gamma: Sequence, gens: Sequence[Sequence]) -> list[int] | None:
    """Same as :func:`in_subgroup` on bare coordinate vectors."""
    if not gens:
        return [] if not any(gamma) else None
    ints, _ = _integer_system([list(g) for g in gens] + [list(gamma)])
    mat = [list(row) for row in zip(*ints[:-1])]
    return lattice.solve_integral(mat, ints[-1])


class SubgroupResidue:
    """Canonical representative of gamma modulo the subgroup generated by ``gens``.

    Hermite reduction against a row-echelon basis makes the residue a class
    invariant, so ``reduce(a) == reduce(b)`` exactly when a - b lies in the
    subgroup.
    """

    def __init__(self, gens: Sequence[GroupElement] | Sequence[Sequence]):
        vecs = [g.coords if isinstance(g, GroupElement) else tuple(Fraction(c) for c in g) for g in gens]
        ints, self.den = _integer_system(vecs) if vecs else ([], 1)
        self.rows = [(next(j for j, x in enumerate(r) if x), r)
                     for r in lattice.row_lattice_basis(ints)] if ints else []

    def reduce(self, gamma) -> tuple[Fraction, ...]:
        coords = gamma.coords if isinstance(gamma, GroupElement) else gamma
        x = [Fraction(c) * self.den for c in coords]
        for piv, row in self.rows:
            q = x[piv] // row[piv]
            if q:
                x = [a - q * b for a, b in zip(x, row)]
        return tuple(x)


INFINITE = float("inf")


class SubgroupNotContained(ValueGroupError):
    def __init__(self, witness):
        super().__init__(f"generator {witness} is not in the ambient subgroup")
        self.witness = witness


def subgroup_index_coords(sub: Sequence[Sequence], amb: Sequence[Sequence]):
    """Index of <sub> in <amb> (coordinate vectors); ``INFINITE`` on rank drop."""
    vecs = [list(v) for v in sub] + [list(v) for v in amb]
    if not vecs:
        return 1
    ints, _ = _integer_system(vecs)
    sub_i, amb_i = ints[: len(sub)], ints[len(sub):]
    width = len(vecs[0])
    amb_basis = lattice.row_lattice_basis(amb_i) if amb_i else lattice.IntMatrix.zeros(0, width)
    cols = [list(r) for r in zip(*amb_basis)] if amb_basis.nrows else [[] for _ in range(width)]
    change = []
    for v, orig in zip(sub_i, sub):
        x = lattice.solve_integral(cols, v) if amb_basis.nrows else ([] if not any(v) else None)
        if x is None:
            raise SubgroupNotContained(orig)
        change.append(x)
    if amb_basis.nrows == 0:
        return 1
    sub_rank = lattice.rational_rank(sub_i) if sub_i else 0
    if sub_rank < amb_basis.nrows:
        return INFINITE
    # rows of `change` generate the sublattice inside Z^r (r = ambient rank)
    fs = lattice.invariant_factors(change)
    index = 1
    for f in fs:
        index *= f
    return index


def subgroup_index(sub_gens: Sequence[GroupElement], amb_gens: Sequence[GroupElement]):
    """[<amb_gens> : <sub_gens>] as an int, or ``INFINITE`` when ranks differ."""
    for g in list(sub_gens) + list(amb_gens):
        if g.group is not (sub_gens or amb_gens)[0].group:
            raise ValueGroupError("elements belong to different groups")
    try:
        return subgroup_index_coords([g.coords for g in sub_gens], [g.coords for g in amb_gens])
    except SubgroupNotContained as exc:
        witness = next(g for g in sub_gens if g.coords == tuple(exc.witness))
        raise SubgroupNotContained(witness) from None
