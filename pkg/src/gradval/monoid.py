"""Finitely generated monoids inside value groups or integer lattices."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import lcm
from typing import Sequence

from . import lattice
from .values import GroupElement, OrderedGroup, in_subgroup_coords, subgroup_index_coords

FM_MAX_VARS = 6


class MonoidError(ValueError):
    pass


class NotIntegral(MonoidError):
    def __init__(self, witness):
        super().__init__(f"generator {witness} has no multiple in the base monoid")
        self.witness = witness


def _coords(x) -> tuple[Fraction, ...]:
    if isinstance(x, GroupElement):
        return x.coords
    return tuple(Fraction(c) for c in x)


class AffineMonoid:
    """Monoid generated by finitely many elements.

    With a ``group`` the generators are GroupElements and must be strictly
    positive in the group order.  Without one the monoid lives in Z^n (or
    Q^n) and generators must be nonzero with nonnegative coordinates; pass
    ``auxiliary=True`` to skip that check for group-like helper monoids.
    """

    def __init__(self, gens: Sequence, group: OrderedGroup | None = None, auxiliary: bool = False,
                 label: str = ""):
        if group is None and gens and isinstance(gens[0], GroupElement):
            group = gens[0].group
        self.group = group
        self.label = label
        self.auxiliary = auxiliary
        self.vectors = [_coords(g) for g in gens]
        if group is not None:
            self.gens = [g if isinstance(g, GroupElement) else group(*g) for g in gens]
            for g in self.gens:
                if g.group is not group:
                    raise MonoidError("generators belong to different groups")
        else:
            self.gens = list(self.vectors)
        widths = {len(v) for v in self.vectors}
        if len(widths) > 1:
            raise MonoidError("generators have different lengths")
        self.dim = widths.pop() if widths else (group.rank if group else 0)
        if not auxiliary:
            for g, v in zip(self.gens, self.vectors):
                if group is not None:
                    if g.sign() <= 0:
                        raise MonoidError(f"generator {g} is not strictly positive")
                elif not any(v) or min(v) < 0:
                    raise MonoidError(f"generator {list(map(str, v))} is not a nonzero nonnegative vector")

    def __repr__(self):
        gens = ", ".join("(" + ", ".join(map(str, v)) + ")" for v in self.vectors)
        return f"AffineMonoid<{gens}>"

    def element(self, coords) -> GroupElement | tuple:
        coords = tuple(Fraction(c) for c in coords)
        return self.group(*coords) if self.group is not None else coords

    def scaled(self, k) -> "AffineMonoid":
        return AffineMonoid([tuple(k * c for c in v) for v in self.vectors], self.group,
                            self.auxiliary, self.label)

    @cached_property
    def lattice_rank(self) -> int:
        return lattice.rational_rank(self.vectors) if self.vectors else 0

    @cached_property
    def _plan(self) -> "_MemberPlan":
        return _MemberPlan(self)


# -- exact membership ------------------------------------------------------

class _MemberPlan:
    """Precomputed data for the lattice-guided membership search.

    Generators are visited in decreasing value.  At depth i the remainder
    must lie in the lattice L_i generated by the generators not yet used,
    which pins the coefficient c_i to one residue class modulo the order
    of g_i in (L_i + Z g_i)/L_i, or to a single value when g_i is outside
    the rational span of L_i.
    """

    def __init__(self, mon: AffineMonoid):
        self.mon = mon
        vecs = mon.vectors
        if mon.group is not None and mon.group.archimedean:
            order = sorted(range(len(vecs)), key=lambda i: _SortKey(mon.gens[i]), reverse=True)
        else:
            order = sorted(range(len(vecs)), key=lambda i: tuple(-c for c in vecs[i]))
        self.order = order
        self.den = lattice.common_denominator(c for v in vecs for c in v)
        ints = [[int(c * self.den) for c in vecs[i]] for i in order]
        self.ints = ints
        k = len(ints)
        width = mon.dim
        self.bases = []
        for i in range(k + 1):
            rest = ints[i:]
            self.bases.append(lattice.row_lattice_basis(rest) if rest else lattice.IntMatrix.zeros(0, width))
        self.periods = []
        for i in range(k):
            rest = ints[i + 1:]
            in_span = bool(rest) and lattice.rational_rank(rest + [ints[i]]) == lattice.rational_rank(rest)
            if in_span:
                self.periods.append(subgroup_index_coords(rest, rest + [ints[i]]))
            else:
                self.periods.append(None)
        self.lower = None
        if mon.group is not None and mon.group.archimedean:
            self.lower = [_positive_lower_bound(mon.gens[i]) for i in order]
        elif mon.group is None:
            self.lower = None
        self.unique = all(p is None for p in self.periods)

    def bound(self, i: int, rem: list[int]) -> int | None:
        """Upper bound for the coefficient of generator i given remainder."""
        mon = self.mon
        if self.lower is not None:
            coords = [Fraction(c, self.den) for c in rem]
            _, hi = mon.group.real_enclosure(coords, bits=32)
            if hi < 0:
                return -1
            return int(hi / self.lower[i])
        if mon.group is None:
            g = self.ints[i]
            if any(c < 0 for c in rem):
                return -1
            return min(r // c for r, c in zip(rem, g) if c > 0)
        return None

    def first_coefficient(self, i: int, rem: list[int]) -> int | None:
        basis = self.bases[i + 1]
        cols = [[self.ints[i][r]] + [b[r] for b in basis] for r in range(len(rem))]
        sol = lattice.solve_integral(cols, rem)
        return None if sol is None else sol[0]

    def search(self, target: list[int]) -> list[int] | None:
        k = len(self.ints)
        coeffs = [0] * k

        def rec(i, rem):
            if i == k:
                return not any(rem)
            c0 = self.first_coefficient(i, rem)
            if c0 is None:
                return False
            period = self.periods[i]
            if period is None:
                candidates = [c0] if c0 >= 0 else []
                b = self.bound(i, rem)
                if b is not None and candidates and candidates[0] > b:
                    candidates = []
            else:
                b = self.bound(i, rem)
                if b is None:
                    raise MonoidError("membership needs value bounds; lex-ordered groups "
                                      "with dependent generators are unsupported")
                start = c0 % period
                candidates = range(start, b + 1, period)
            g = self.ints[i]
            for c in candidates:
                coeffs[i] = c
                if rec(i + 1, [r - c * x for r, x in zip(rem, g)]):
                    return True
            coeffs[i] = 0
            return False

        if not rec(0, target):
            return None
        out = [0] * k
        for pos, idx in enumerate(self.order):
            out[idx] = coeffs[pos]
        return out


class _SortKey:
    __slots__ = ("g",)

    def __init__(self, g):
        self.g = g

    def __lt__(self, other):
        return self.g < other.g


def _positive_lower_bound(g: GroupElement) -> Fraction:
    bits = 16
    while True:
        lo, _ = g.group.real_enclosure(g.coords, bits)
        if lo > 0:
            return lo
        bits *= 2
        if bits > g.group.max_bits:
            raise MonoidError(f"cannot bound generator {g} away from zero")


def member(gamma, mon: AffineMonoid) -> list[int] | None:
    """Nonnegative integer coefficients with sum(c_i * g_i) == gamma, or None."""
    coords = _coords(gamma)
    if len(coords) != mon.dim:
        raise MonoidError("element and monoid have different dimensions")
    if not any(coords):
        return [0] * len(mon.vectors)
    if not mon.vectors:
        return None
    plan = mon._plan
    scaled = [c * plan.den for c in coords]
    if any(c.denominator != 1 for c in scaled):
        return None
    target = [int(c) for c in scaled]
    sol = plan.search(target)
    if sol is not None:
        check = [sum(c * v[j] for c, v in zip(sol, mon.vectors)) for j in range(mon.dim)]
        assert tuple(check) == coords
    return sol


# -- rational cone membership ----------------------------------------------

def _normalize(ineq):
    coeffs, const = ineq
    nz = [abs(x) for x in coeffs if x] + ([abs(const)] if const else [])
    if not nz:
        return ineq
    m = min(nz)
    return tuple(x / m for x in coeffs), const / m


def _fm_point(ineqs: list, nvars: int) -> list[Fraction] | None:
    """A rational point with a.x + b >= 0 for all (a, b), or None.

    Exact Fourier-Motzkin elimination of x_0, x_1, ... followed by
    back-substitution that prefers small integers.
    """
    if nvars > FM_MAX_VARS:
        raise MonoidError(f"Fourier-Motzkin limited to {FM_MAX_VARS} variables, got {nvars}")
    stages = []
    system = list({_normalize(q) for q in ineqs})
    for j in range(nvars):
        stages.append(system)
        pos = [q for q in system if q[0][j] > 0]
        neg = [q for q in system if q[0][j] < 0]
        nxt = [q for q in system if q[0][j] == 0]
        for (ap, bp), (an, bn) in itertools.product(pos, neg):
            s, t = -an[j], ap[j]
            coeffs = tuple(s * x + t * y for x, y in zip(ap, an))
            nxt.append(_normalize((coeffs, s * bp + t * bn)))
        system = list(set(nxt))
    if any(b < 0 for _, b in system):
        return None
    x = [Fraction(0)] * nvars
    for j in reversed(range(nvars)):
        lo, hi = None, None
        for a, b in stages[j]:
            if a[j] == 0:
                continue
            rest = b + sum(a[t] * x[t] for t in range(j + 1, nvars))
            bound = -rest / a[j]
            if a[j] > 0:
                lo = bound if lo is None else max(lo, bound)
            else:
                hi = bound if hi is None else min(hi, bound)
        if lo is None:
            val = Fraction(0) if hi is None or hi >= 0 else Fraction(int(hi // 1))
        else:
            val = Fraction(-((-lo.numerator) // lo.denominator))
            if hi is not None and val > hi:
                val = lo
        x[j] = val
    return x


def cone_coefficients(gamma, vectors: Sequence[Sequence[Fraction]]) -> list[Fraction] | None:
    """Nonnegative rationals lam with sum(lam_i * v_i) == gamma, or None."""
    coords = _coords(gamma)
    k = len(vectors)
    if not any(coords):
        return [Fraction(0)] * k
    if k == 0:
        return None
    rows = [[Fraction(v[r]) for v in vectors] for r in range(len(coords))]
    # row-reduce the equalities to express pivot variables through free ones
    m = [row + [Fraction(c)] for row, c in zip(rows, coords)]
    pivots = []
    r = 0
    for c in range(k):
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
    free = [c for c in range(k) if c not in pivots]
    nf = len(free)
    ineqs = []
    for j in range(nf):
        ineqs.append((tuple(Fraction(int(t == j)) for t in range(nf)), Fraction(0)))
    for i, c in enumerate(pivots):
        # lam_c = m[i][-1] - sum_f m[i][f] lam_f >= 0
        ineqs.append((tuple(-m[i][f] for f in free), m[i][-1]))
    if nf == 0:
        if any(b < 0 for _, b in ineqs):
            return None
        xs = []
    else:
        xs = _fm_point(ineqs, nf)
        if xs is None:
            return None
    lam = [Fraction(0)] * k
    for j, f in enumerate(free):
        lam[f] = xs[j]
    for i, c in enumerate(pivots):
        lam[c] = m[i][-1] - sum(m[i][f] * lam[f] for f in free)
    assert all(x >= 0 for x in lam)
    assert all(sum(l * v[t] for l, v in zip(lam, vectors)) == coords[t] for t in range(len(coords)))
    return lam


@dataclass(frozen=True)
class SaturationCertificate:
    multiple: int
    coeffs: tuple[int, ...]


def saturation_member(gamma, mon: AffineMonoid) -> SaturationCertificate | None:
    """Smallest m > 0 with m*gamma in the monoid, with coefficients.

    Present exactly when gamma is in the rational cone of the generators.
    """
    lam = cone_coefficients(gamma, mon.vectors)
    if lam is None:
        return None
    coords = _coords(gamma)
    m0 = lcm(*[x.denominator for x in lam]) if lam else 1
    for m in range(1, m0 + 1):
        sol = member(tuple(m * c for c in coords), mon)
        if sol is not None:
            return SaturationCertificate(m, tuple(sol))
    raise AssertionError("scaled cone point must lie in the monoid")


# -- fundamental parallelepiped --------------------------------------------

@dataclass(frozen=True)
class ParBox:
    basis: tuple[tuple[int, ...], ...]
    points: tuple[tuple[int, ...], ...]

    @property
    def determinant(self) -> int:
        return lattice.det(self.basis)


def par_points(vectors: Sequence[Sequence[int]]) -> ParBox:
    """Lattice points of the half-open parallelepiped spanned by ``vectors``.

    Scans the bounding box and keeps p with p = sum(q_i v_i), 0 <= q_i < 1.
    """
    basis = tuple(tuple(int(x) for x in v) for v in vectors)
    n = len(basis)
    if any(len(v) != n for v in basis):
        raise MonoidError("par_points needs n vectors in Z^n")
    d = lattice.det(basis)
    if d == 0:
        raise MonoidError("vectors are linearly dependent")
    adj = lattice.adjugate(basis)
    ad = abs(d)
    sgn = 1 if d > 0 else -1
    ranges = []
    for j in range(n):
        col = [v[j] for v in basis]
        lo = sum(x for x in col if x < 0)
        hi = sum(x for x in col if x > 0)
        ranges.append(range(lo, hi + 1))
    pts = []
    # q = p V^{-1} = p adj(V) / d
    for p in itertools.product(*ranges):
        num = adj.rapply(p)
        if all(0 <= sgn * x < ad for x in num):
            pts.append(tuple(p))
    pts.sort(key=lambda p: (any(p), p))
    if len(pts) != ad:
        raise AssertionError(f"found {len(pts)} parallelepiped points, expected {ad}")
    return ParBox(basis, tuple(pts))


# -- translates ------------------------------------------------------------

@dataclass(frozen=True)
class DisjointnessResult:
    disjoint: bool
    witness: tuple | None = None  # (a, b, common point)

    def __bool__(self):
        return self.disjoint


def translates_disjoint(points: Sequence, mon: AffineMonoid) -> DisjointnessResult:
    """Whether the translates a + M, a in ``points``, are pairwise disjoint.

    (a + M) and (b + M) meet exactly when a - b lies in the group generated
    by M: split an integer relation a - b = sum c_i v_i into positive and
    negative parts.  For a square independent integer basis the test reduces
    to comparing residues p * adj(V) mod |det V|.
    """
    pts = [_coords(p) for p in points]
    vecs = mon.vectors
    square = (len(vecs) == mon.dim and all(c.denominator == 1 for v in vecs for c in v)
              and lattice.det([[int(c) for c in v] for v in vecs]) != 0)
    if square:
        basis = [[int(c) for c in v] for v in vecs]
        adj = lattice.adjugate(basis)
        d = abs(lattice.det(basis))
        seen = {}
        for p in pts:
            if any(c.denominator != 1 for c in p):
                key = ("frac", p)
            else:
                key = tuple(x % d for x in adj.rapply([int(c) for c in p]))
            if key in seen:
                return DisjointnessResult(False, _common_point(seen[key], p, mon))
            seen[key] = p
        return DisjointnessResult(True)
    for a, b in itertools.combinations(pts, 2):
        if a == b:
            return DisjointnessResult(False, (mon.element(a), mon.element(b), mon.element(a)))
        diff = [x - y for x, y in zip(a, b)]
        if in_subgroup_coords(diff, vecs) is not None:
            return DisjointnessResult(False, _common_point(a, b, mon))
    return DisjointnessResult(True)


def _common_point(a, b, mon):
    diff = [x - y for x, y in zip(a, b)]
    c = in_subgroup_coords(diff, mon.vectors)
    neg = [max(-x, 0) for x in c]
    point = tuple(x + sum(k * v[j] for k, v in zip(neg, mon.vectors)) for j, x in enumerate(a))
    return mon.element(a), mon.element(b), mon.element(point)


def translate_cover(box: ParBox, bound: int) -> tuple[bool, tuple | None]:
    """Every lattice point of the cone with coordinates in [-bound, bound]
    lies in exactly one translate lam + M (M generated by ``box.basis``).

    Returns (ok, counterexample point).
    """
    basis = box.basis
    n = len(basis)
    adj = lattice.adjugate(basis)
    d = lattice.det(basis)
    ad, sgn = abs(d), (1 if d > 0 else -1)
    buckets: dict[tuple, list] = {}
    for lam in box.points:
        la = tuple(sgn * x for x in adj.rapply(lam))
        buckets.setdefault(tuple(x % ad for x in la), []).append(la)
    # a nonnegative basis spans a cone inside the orthant
    lo = 0 if all(x >= 0 for v in basis for x in v) else -bound
    for p in itertools.product(range(lo, bound + 1), repeat=n):
        pa = [sgn * x for x in adj.rapply(p)]
        if any(x < 0 for x in pa):
            continue
        hits = 0
        for la in buckets.get(tuple(x % ad for x in pa), ()):
            # p - lam in M  <=>  (p - lam) V^{-1} is a nonnegative integer vector
            diff = [x - y for x, y in zip(pa, la)]
            if all(t >= 0 and t % ad == 0 for t in diff):
                hits += 1
        if hits != 1:
            return False, p
    return True, None


# -- module generators -----------------------------------------------------

@dataclass
class Finite:
    generators: list
    multiples: list = field(default_factory=list)
    verdict: str = "Finite"
    counts: dict = field(default_factory=dict)


@dataclass
class NotFinite:
    evidence: str
    counts: dict = field(default_factory=dict)
    verdict: str = "NotFinite"


def module_generators(s2: AffineMonoid, s1: AffineMonoid) -> Finite | NotFinite:
    """Finite generating set of S2 as an S1-module, when there is one.

    Each generator u_j of S2 has a least m_j with m_j u_j in S1, so the sums
    sum(c_j u_j) with 0 <= c_j < m_j generate; redundant elements (those
    differing from another candidate by an element of S1) are dropped.
    """
    multiples = []
    for g, v in zip(s2.gens, s2.vectors):
        cert = saturation_member(v, s1)
        if cert is None:
            raise NotIntegral(g)
        multiples.append(cert.multiple)
    r1, r2 = s1.lattice_rank, lattice.rational_rank(s1.vectors + s2.vectors) if s2.vectors else s1.lattice_rank
    if r1 < r2:
        return NotFinite(f"rank drop: base lattice has rank {r1}, extension has rank {r2}")
    for v in s1.vectors:
        if cone_coefficients(v, s2.vectors) is None:
            return NotFinite(f"cone mismatch: {list(map(str, v))} is outside the cone of S2")
    dim = s2.dim
    cands = set()
    for cs in itertools.product(*[range(m) for m in multiples]):
        cands.add(tuple(sum((c * v[j] for c, v in zip(cs, s2.vectors)), Fraction(0)) for j in range(dim)))
    # process candidates in increasing order; a redundant candidate is always
    # an S1-translate of some earlier kept one
    if s2.group is not None:
        cands = sorted(cands, key=lambda p: _SortKey(s2.group(*p)))
    else:
        cands = sorted(cands, key=lambda p: (sum(p), p))
    keep = []
    for lam in cands:
        if not any(member(tuple(x - y for x, y in zip(lam, k)), s1) is not None for k in keep):
            keep.append(lam)
    return Finite([s2.element(p) for p in keep], multiples)


@dataclass
class TowerLevel:
    level: int
    s2: AffineMonoid
    s1: AffineMonoid


def tower_module_generators(levels: Sequence[TowerLevel]) -> Finite | NotFinite:
    """Per-level generator counts; NotFinite when they strictly increase."""
    counts = {}
    results = {}
    for lv in levels:
        res = module_generators(lv.s2, lv.s1)
        if isinstance(res, NotFinite):
            return NotFinite(f"level {lv.level}: {res.evidence}", counts)
        counts[lv.level] = len(res.generators)
        results[lv.level] = res
    seq = [counts[lv.level] for lv in levels]
    if len(seq) >= 2 and all(a < b for a, b in zip(seq, seq[1:])):
        return NotFinite("generator counts strictly increase across levels " + str(seq), counts)
    last = results[levels[-1].level] if levels else Finite([])
    return Finite(last.generators, last.multiples, counts=counts)
