"""Verifier for monomial extensions x_i = delta_i * y^(a_i), x_j = y_j.

Given the exponent matrix A and the values of the y-variables it computes
the ramification index, a free basis of monomials w_i, their values, the
action of Z^s/AZ^s by roots of unity, and symmetric-function certificates
for conjugates of a polynomial in the y-variables.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from . import lattice
from .cyclotomic import CyclotomicField
from .lattice import IntMatrix, QuotientStructure
from .monoid import AffineMonoid, ParBox, par_points, translate_cover, translates_disjoint
from .values import GroupElement, SubgroupResidue, compare, in_subgroup, minimum, subgroup_index

# below this many cosets the residue check is repeated pairwise with in_subgroup
PAIRWISE_LIMIT = 12


class VerifierError(ValueError):
    pass


class CosetValidationError(VerifierError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class ContractViolation(VerifierError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class AmbiguousLeadingForm(VerifierError):
    pass


@dataclass(frozen=True)
class MonomialExtension:
    s: int
    n: int
    A: IntMatrix
    y_values: tuple[GroupElement, ...]
    unit_flags: tuple[bool, ...] = ()
    names: tuple[str, ...] = ()

    def __post_init__(self):
        a = lattice.as_matrix(self.A)
        object.__setattr__(self, "A", a)
        object.__setattr__(self, "y_values", tuple(self.y_values))
        if not 0 < self.s <= self.n:
            raise VerifierError(f"need 0 < s <= n, got s={self.s}, n={self.n}")
        if a.shape != (self.s, self.s):
            raise VerifierError(f"A has shape {a.shape}, expected ({self.s}, {self.s})")
        if any(x < 0 for row in a for x in row):
            raise VerifierError("A must have nonnegative entries")
        if lattice.det(a) == 0:
            raise VerifierError("A is singular")
        if len(self.y_values) != self.n:
            raise VerifierError(f"expected {self.n} y-values, got {len(self.y_values)}")
        groups = {id(g.group) for g in self.y_values}
        if len(groups) != 1:
            raise VerifierError("y-values must lie in one value group")
        if lattice.rational_rank([g.coords for g in self.y_values[: self.s]]) != self.s:
            raise VerifierError("the first s y-values are not rationally independent")
        flags = tuple(self.unit_flags) or (True,) * self.s
        if len(flags) != self.s:
            raise VerifierError(f"expected {self.s} unit flags, got {len(flags)}")
        object.__setattr__(self, "unit_flags", flags)
        names = tuple(self.names) or tuple(f"y{i + 1}" for i in range(self.n))
        if len(names) != self.n:
            raise VerifierError(f"expected {self.n} variable names")
        object.__setattr__(self, "names", names)

    @property
    def group(self):
        return self.y_values[0].group

    @property
    def e(self) -> int:
        return abs(lattice.det(self.A))

    def x_values(self) -> list[GroupElement]:
        out = []
        for i in range(self.s):
            v = self.group.zero()
            for a, y in zip(self.A.row(i), self.y_values):
                v = v + y * a
            out.append(v)
        return out + list(self.y_values[self.s:])

    def basis_rows(self) -> list[tuple[int, ...]]:
        """Rows of A padded to length n, followed by unit vectors e_{s+1}..e_n."""
        rows = [tuple(self.A.row(i)) + (0,) * (self.n - self.s) for i in range(self.s)]
        for j in range(self.s, self.n):
            rows.append(tuple(int(k == j) for k in range(self.n)))
        return rows

    def monomial_value(self, exps: Sequence[int]) -> GroupElement:
        v = self.group.zero()
        for k, y in zip(exps, self.y_values):
            if k:
                v = v + y * k
        return v


@dataclass
class AJReport:
    e: int
    invariant_factors: QuotientStructure
    w_exponents: list[tuple[int, ...]]
    coset_values: list[GroupElement]
    free_basis_ok: bool
    cosets_complete: bool
    cover_disjoint: bool
    invariants_trivial_only: bool
    notes: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.free_basis_ok and self.cosets_complete and self.cover_disjoint and self.invariants_trivial_only

    def to_dict(self) -> dict:
        return {
            "e": self.e,
            "invariant_factors": list(self.invariant_factors.invariant_factors),
            "w_exponents": [list(w) for w in self.w_exponents],
            "coset_values": [g.tolist() for g in self.coset_values],
            "free_basis_ok": self.free_basis_ok,
            "cosets_complete": self.cosets_complete,
            "cover_disjoint": self.cover_disjoint,
            "invariants_trivial_only": self.invariants_trivial_only,
            "notes": list(self.notes),
        }


def free_basis(ext: MonomialExtension) -> ParBox:
    return par_points(ext.basis_rows())


def analyze(ext: MonomialExtension, bound: int | None = None) -> AJReport:
    """Run every check on ``ext``; failures are reported, not repaired.

    ``bound`` sets the coordinate box for the cover check (default: twice the
    largest entry of A plus one).
    """
    notes = []
    e = ext.e
    qs = lattice.quotient_structure(ext.A)
    box = free_basis(ext)
    lam = list(box.points)
    coset_vals = [ext.monomial_value(w) for w in lam]

    idx = subgroup_index(ext.x_values(), list(ext.y_values))
    counts = {"|det A|": e, "quotient order": qs.order, "group index": idx, "|Lambda|": len(lam)}
    if len(set(counts.values())) != 1:
        notes.append("index mismatch: " + ", ".join(f"{k}={v}" for k, v in counts.items()))

    lattice_monoid = AffineMonoid(box.basis)
    disjoint = translates_disjoint(lam, lattice_monoid)
    if not disjoint:
        notes.append(f"translates meet: {disjoint.witness}")
    free_ok = len(lam) == e and lam[0] == (0,) * ext.n and bool(disjoint) and idx == e

    try:
        coset_representatives(ext, lam)
        complete = True
    except CosetValidationError as err:
        complete = False
        notes.append(str(err))

    if bound is None:
        bound = 2 * max(max(r) for r in ext.A) + 1
    covered, bad = translate_cover(box, bound)
    if not covered:
        notes.append(f"cone point {bad} is not in exactly one translate")

    action = character_action(ext, lam)
    if not action.trivial_only:
        notes.append(f"invariant basis indices {sorted(action.invariant_indices)}")

    return AJReport(e, qs, lam, coset_vals, free_ok, complete, covered and bool(disjoint),
                    action.trivial_only, notes)


def coset_representatives(ext: MonomialExtension, exponents: Sequence[Sequence[int]] | None = None
                          ) -> list[GroupElement]:
    """Values of the free basis monomials, checked to represent every coset once.

    Pass ``exponents`` to validate a different candidate set.
    """
    lam = [tuple(w) for w in (exponents if exponents is not None else free_basis(ext).points)]
    vals = [ext.monomial_value(w) for w in lam]
    if len(vals) != ext.e:
        raise CosetValidationError(f"{len(vals)} candidates for {ext.e} cosets")
    xs = ext.x_values()
    residue = SubgroupResidue(xs)
    seen: dict = {}
    for j, b in enumerate(vals):
        i = seen.setdefault(residue.reduce(b), j)
        if i != j:
            # confirm the collision independently before reporting it
            assert in_subgroup(vals[i] - b, xs) is not None
            raise CosetValidationError(
                f"w{i + 1} and w{j + 1} have values in the same coset", (lam[i], lam[j]))
    if len(vals) <= PAIRWISE_LIMIT:
        for (i, a), (j, b) in itertools.combinations(enumerate(vals), 2):
            assert in_subgroup(a - b, xs) is None
    return vals


def min_formula_check(ext: MonomialExtension, coeff_values: Sequence[GroupElement | None],
                      coset_values: Sequence[GroupElement] | None = None) -> GroupElement:
    """min over present i of value(f_i) + value(w_i), with a unique minimizer."""
    cv = list(coset_values) if coset_values is not None else coset_representatives(ext)
    if len(coeff_values) != len(cv):
        raise VerifierError(f"expected {len(cv)} coefficient values, got {len(coeff_values)}")
    present = [(i, f) for i, f in enumerate(coeff_values) if f is not None]
    if not present:
        raise VerifierError("all coefficients are absent")
    xs = ext.x_values()
    for i, f in present:
        if in_subgroup(f, xs) is None:
            raise VerifierError(f"coefficient value {f} at index {i} is not in the base value group")
    sums = [(i, f + cv[i]) for i, f in present]
    best = minimum(v for _, v in sums)
    winners = [i for i, v in sums if compare(v, best) == 0]
    if len(winners) > 1:
        raise ContractViolation(f"minimum {best} attained at indices {winners[:2]}", tuple(winners[:2]))
    return best


@dataclass
class CharacterAction:
    group_elements: list[tuple[int, ...]]
    table: list[list[int]]  # table[c][i] = k, meaning sigma_c(w_i) = omega^k w_i
    e: int
    adj: IntMatrix
    invariant_indices: set[int]

    @property
    def trivial_only(self) -> bool:
        return self.invariant_indices == {0}

    def exponent(self, c: Sequence[int], v: Sequence[int]) -> int:
        """Root-of-unity exponent by which sigma_c scales the monomial y^v."""
        psi = self.adj.apply(list(c))
        return sum(a * b for a, b in zip(v, psi)) % self.e


def character_action(ext: MonomialExtension, exponents: Sequence[Sequence[int]] | None = None
                     ) -> CharacterAction:
    lam = [tuple(w) for w in (exponents if exponents is not None else free_basis(ext).points)]
    e = ext.e
    adj = lattice.adjugate(ext.A)
    sgn = 1 if lattice.det(ext.A) > 0 else -1
    if sgn < 0:
        adj = IntMatrix([[-x for x in r] for r in adj])
    reps = lattice.cokernel_representatives(ext.A)
    psis = []
    for c in reps:
        psi = adj.apply(list(c))
        # sigma_c fixes every x_i: row_i(A) . psi must vanish mod e
        assert all(x % e == 0 for x in ext.A.apply(psi))
        psis.append(tuple(x % e for x in psi))
    assert len(set(psis)) == len(reps), "character map is not injective"
    table = [[sum(a * b for a, b in zip(w[: ext.s], psi)) % e for w in lam] for psi in psis]
    invariant = {i for i in range(len(lam)) if all(row[i] == 0 for row in table)}
    return CharacterAction(reps, table, e, adj, invariant)


# -- Kummer certificates ---------------------------------------------------

Poly = dict  # exponent tuple -> coefficient


@dataclass
class SymmetricCertificate:
    z: dict
    conjugate_values: list[GroupElement]
    S: list[dict]
    S_values: list[GroupElement | None]
    inequalities_ok: bool
    integral_equation: list[tuple[int, Fraction]]
    equation_value: Fraction
    strict: bool = False

    @property
    def r(self) -> int:
        return len(self.S)

    def equation_text(self) -> str:
        """The leading-term relation, with each in(S_i) written as its coefficient."""
        out = ""
        for i, c in self.integral_equation:
            k = self.r - i
            power = "" if k == 0 else "in(z)" if k == 1 else f"in(z)^{k}"
            mag = abs(c)
            body = power if mag == 1 and power else f"{mag}*{power}" if power else str(mag)
            out += (" - " if c < 0 else " + ") + body if out else ("-" if c < 0 else "") + body
        return out + " = 0"


def _poly_mul(f: Poly, g: Poly, add, mul, zero) -> Poly:
    out: dict = {}
    for a, x in f.items():
        for b, y in g.items():
            k = tuple(i + j for i, j in zip(a, b))
            out[k] = add(out.get(k, zero), mul(x, y))
    return {k: v for k, v in out.items() if any(v)}


def _to_rational(field_: CyclotomicField, f: Poly) -> dict:
    return {k: field_.rational(v) for k, v in f.items()}


def _value_terms(ext: MonomialExtension, f: Mapping) -> dict:
    """Collapse f into the semigroup algebra: value coords -> coefficient sum."""
    out: dict = {}
    for k, c in f.items():
        key = ext.monomial_value(k).coords
        out[key] = out.get(key, Fraction(0)) + c
    return {k: v for k, v in out.items() if v}


def _leading(ext: MonomialExtension, terms: dict):
    if not terms:
        return None, Fraction(0)
    g = ext.group
    low = minimum(g(*k) for k in terms)
    return low, terms[low.coords]


def _newton_elementary(field_: CyclotomicField, conjugates: list[Poly], n: int, r: int) -> list[Poly]:
    """Elementary symmetric e_1..e_r from power sums via Newton's identities."""
    zero = field_.zero
    add, mul = field_.add, field_.mul
    one = {(0,) * n: field_.one}
    powers = [dict(one) for _ in conjugates]
    p = []
    for _ in range(r):
        powers = [_poly_mul(pw, z, add, mul, zero) for pw, z in zip(powers, conjugates)]
        total: dict = {}
        for pw in powers:
            for k, v in pw.items():
                total[k] = add(total.get(k, zero), v)
        p.append({k: v for k, v in total.items() if any(v)})
    es = [one]
    for k in range(1, r + 1):
        acc: dict = {}
        for i in range(1, k + 1):
            term = _poly_mul(es[k - i], p[i - 1], add, mul, zero)
            sign = 1 if i % 2 else -1
            for key, v in term.items():
                acc[key] = add(acc.get(key, zero), field_.scale(v, sign))
        es.append({key: field_.scale(v, Fraction(1, k)) for key, v in acc.items() if any(v)})
    return es[1:]


def kummer_symmetric_certificate(z: Mapping[Sequence[int], object], ext: MonomialExtension,
                                 strict: bool = False) -> SymmetricCertificate:
    """Certify value(S_i(z)) >= i * value(z) for the coefficients S_i of prod (T - sigma(z)).

    S_i is the coefficient of T^(r-i), i.e. (-1)^i times the i-th elementary
    symmetric function of the r conjugates.  It is expanded twice: as a
    product of linear factors and through Newton's identities.
    """
    zpoly = {tuple(int(x) for x in k): Fraction(c) for k, c in z.items() if Fraction(c)}
    if not zpoly:
        raise VerifierError("z is zero")
    if any(len(k) != ext.n for k in zpoly):
        raise VerifierError(f"exponent vectors of z must have length {ext.n}")
    if any(x < 0 for k in zpoly for x in k):
        raise VerifierError("z must be a polynomial (nonnegative exponents)")

    zlead, zc = _leading(ext, _value_terms(ext, zpoly))
    if zlead is None or minimum(ext.monomial_value(k) for k in zpoly) != zlead:
        raise AmbiguousLeadingForm("the minimal-value terms of z cancel in the semigroup algebra")

    action = character_action(ext)
    e = action.e
    F = CyclotomicField(e)
    r = len(action.group_elements)
    n = ext.n
    conjugates = []
    for c in action.group_elements:
        conjugates.append({k: F.scale(F.root_power(action.exponent(c, k[: ext.s])), v)
                           for k, v in zpoly.items()})
    conj_vals = [minimum(ext.monomial_value(k) for k in cz) for cz in conjugates]

    # product form: prod_c (T - sigma_c z), coefficients indexed by power of T
    coeffs: list[Poly] = [{(0,) * n: F.one}]
    for cz in conjugates:
        neg = {k: F.neg(v) for k, v in cz.items()}
        nxt: list[Poly] = [dict() for _ in range(len(coeffs) + 1)]
        for d, poly in enumerate(coeffs):
            for k, v in poly.items():
                nxt[d + 1][k] = F.add(nxt[d + 1].get(k, F.zero), v)
            for k, v in _poly_mul(poly, neg, F.add, F.mul, F.zero).items():
                nxt[d][k] = F.add(nxt[d].get(k, F.zero), v)
        coeffs = [{k: v for k, v in p.items() if any(v)} for p in nxt]
    S_prod = [coeffs[r - i] for i in range(1, r + 1)]

    S_newton = _newton_elementary(F, conjugates, n, r)
    S_newton = [{k: F.scale(v, (-1) ** i) for k, v in p.items()} for i, p in enumerate(S_newton, 1)]
    if S_prod != S_newton:
        raise AssertionError("product expansion and Newton's identities disagree")

    S = [_to_rational(F, p) for p in S_prod]
    values, ok, equation = [], True, [(0, Fraction(1))]
    for i, si in enumerate(S, 1):
        low, coef = _leading(ext, _value_terms(ext, si))
        values.append(low)
        if low is None:
            continue
        target = zlead * i
        cmp = compare(low, target)
        if cmp < 0 or (strict and cmp == 0):
            ok = False
        if cmp == 0:
            equation.append((i, coef))
    # leading forms live in degree r * value(z); in k[Gamma] in(z) = zc * t^value(z)
    total = sum((c * zc ** (r - i) for i, c in equation), Fraction(0))
    return SymmetricCertificate(zpoly, conj_vals, S, values, ok, equation, total, strict)
