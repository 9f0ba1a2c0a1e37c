"""Monomial-type models of associated graded rings and extension tests.

A graded ring of monomial type over the residue field k is the semigroup
algebra k[S] of its value semigroup S, so questions about an extension
gr(R) -> gr(S) become questions about a pair of monoids S1 inside S2 of a
common value group.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from . import lattice
from .monoid import (
    AffineMonoid,
    Finite,
    NotFinite,
    NotIntegral,
    TowerLevel,
    member,
    module_generators,
    saturation_member,
    tower_module_generators,
)
from .values import INFINITE, GroupElement, OrderedGroup, subgroup_index_coords

INTEGRAL_CAVEAT = (
    "Integral is exact for monomial-type graded rings (semigroup algebras, f=1); "
    "for general graded rings only a NotIntegral verdict is conclusive."
)


class GradedError(ValueError):
    pass


class InfiniteIndex(GradedError):
    pass


@dataclass
class GradedExtension:
    """gr(R) inside gr(S), modeled by value semigroups S1 inside S2."""

    s1: AffineMonoid
    s2: AffineMonoid
    f: int = 1
    label: str = ""

    def __post_init__(self):
        if self.f < 1:
            raise GradedError("residue degree f must be positive")
        if self.s1.dim != self.s2.dim:
            raise GradedError("S1 and S2 live in groups of different rank")
        if self.s1.group is not None and self.s2.group is not None and self.s1.group is not self.s2.group:
            raise GradedError("S1 and S2 must share one value group")
        if self.s1.vectors and self.s2.vectors:
            # <S1> must sit inside <S2>
            subgroup_index_coords(self.s1.vectors, self.s2.vectors)


@dataclass
class GradedTower:
    """A family of extensions indexed by truncation level."""

    levels: list[tuple[int, GradedExtension]]
    label: str = ""
    surrogate: bool = False


# -- integrality -----------------------------------------------------------

@dataclass
class IntegralityResult:
    verdict: str
    certificates: dict = field(default_factory=dict)
    witness: GroupElement | tuple | None = None
    caveat: str = INTEGRAL_CAVEAT

    @property
    def integral(self) -> bool:
        return self.verdict == "Integral"


def integrality_test(ext: GradedExtension) -> IntegralityResult:
    certs = {}
    for g, v in zip(ext.s2.gens, ext.s2.vectors):
        cert = saturation_member(v, ext.s1)
        if cert is None:
            return IntegralityResult("NotIntegral", certs, g)
        certs[str(g)] = cert
    return IntegralityResult("Integral", certs)


def finiteness_test(ext: GradedExtension | GradedTower) -> Finite | NotFinite:
    if isinstance(ext, GradedTower):
        for level, e in ext.levels:
            res = integrality_test(e)
            if not res.integral:
                raise NotIntegral(res.witness)
        return tower_module_generators([TowerLevel(lv, e.s2, e.s1) for lv, e in ext.levels])
    res = integrality_test(ext)
    if not res.integral:
        raise NotIntegral(res.witness)
    return module_generators(ext.s2, ext.s1)


# -- p-power inclusion -----------------------------------------------------

@dataclass
class PowerInclusion:
    holds: bool
    p: int
    n: int
    witnesses: list = field(default_factory=list)
    certificates: dict = field(default_factory=dict)

    def __bool__(self):
        return self.holds


def p_power_inclusion(ext: GradedExtension, p: int, n: int) -> PowerInclusion:
    """Whether gr(S)^(p^n) lies in gr(R): p^n * gamma in S1 for each generator gamma of S2.

    Checking generators suffices in characteristic p because Frobenius is
    additive and the p^n-th power of a monomial has p^n times its exponent.
    """
    if p < 2 or any(p % d == 0 for d in range(2, int(p ** 0.5) + 1)):
        raise GradedError(f"{p} is not prime")
    if n < 0:
        raise GradedError("n must be nonnegative")
    q = p ** n
    out = PowerInclusion(True, p, n)
    for g, v in zip(ext.s2.gens, ext.s2.vectors):
        sol = member(tuple(q * c for c in v), ext.s1)
        if sol is None:
            out.holds = False
            out.witnesses.append(ext.s2.element(tuple(q * c for c in v)))
        else:
            out.certificates[str(g)] = tuple(sol)
    return out


def qf_degree(ext: GradedExtension) -> int:
    """[QF(gr S) : QF(gr R)] = e * f with e the value group index."""
    e = subgroup_index_coords(ext.s1.vectors, ext.s2.vectors)
    if e == INFINITE:
        raise InfiniteIndex("value group index is infinite")
    return e * ext.f


# -- binomial presentations ------------------------------------------------

Monomial = dict  # variable name -> exponent


def _mono(m: Mapping[str, int]) -> dict:
    return {k: int(v) for k, v in m.items() if v}


@dataclass
class BinomialPresentation:
    """k[vars] / (lhs_i - rhs_i) with a value attached to each variable."""

    vars: list[str]
    relations: list[tuple[dict, dict]]
    values: dict[str, Fraction]

    def __post_init__(self):
        self.relations = [(_mono(a), _mono(b)) for a, b in self.relations]
        unknown = {v for r in self.relations for side in r for v in side} - set(self.vars)
        if unknown:
            raise GradedError(f"relations use undeclared variables {sorted(unknown)}")
        self.values = {k: Fraction(v) for k, v in self.values.items()}
        for lhs, rhs in self.relations:
            if self.value(lhs) != self.value(rhs):
                raise GradedError(f"relation {format_monomial(lhs)} = {format_monomial(rhs)} is not homogeneous")

    def value(self, mono: Mapping[str, int]) -> Fraction:
        return sum((e * self.values[v] for v, e in mono.items()), Fraction(0))

    @classmethod
    def from_relations(cls, vars: Sequence[str], relations, anchor: str, anchor_value=1) -> "BinomialPresentation":
        return cls(list(vars), list(relations), derive_values(vars, relations, anchor, anchor_value))

    def truncated(self, j: int) -> "BinomialPresentation":
        keep = self.vars[: j + 1]
        rels = [r for r in self.relations if set(r[0]) | set(r[1]) <= set(keep)]
        return BinomialPresentation(keep, rels, {v: self.values[v] for v in keep})

    def value_semigroup(self, group: OrderedGroup | None = None) -> AffineMonoid:
        group = group or OrderedGroup.of("rat")
        return AffineMonoid([group(self.values[v]) for v in self.vars], group)


def derive_values(vars: Sequence[str], relations, anchor: str, anchor_value=1) -> dict[str, Fraction]:
    """Values forced by homogeneity of every relation, normalized at ``anchor``."""
    idx = {v: i for i, v in enumerate(vars)}
    rows = []
    for lhs, rhs in relations:
        row = [0] * len(vars)
        for v, e in lhs.items():
            row[idx[v]] += e
        for v, e in rhs.items():
            row[idx[v]] -= e
        rows.append(row)
    kernel = lattice.nullspace(rows, len(vars))
    if len(kernel) != 1:
        raise GradedError(f"relations determine values only up to a {len(kernel)}-dimensional family")
    vec = kernel[0]
    a = vec[idx[anchor]]
    if a == 0:
        raise GradedError(f"anchor {anchor} is forced to have value 0")
    scale = Fraction(anchor_value) / a
    return {v: vec[i] * scale for v, i in idx.items()}


def format_monomial(m: Mapping[str, int]) -> str:
    if not m:
        return "1"
    return "*".join(v if e == 1 else f"{v}^{e}" for v, e in m.items())


class _TermOrder:
    """Value first, then lexicographic with later variables dominating."""

    def __init__(self, pres: BinomialPresentation):
        self.pres = pres
        self.rank = {v: i for i, v in enumerate(pres.vars)}

    def key(self, m):
        vec = [0] * len(self.rank)
        for v, e in m.items():
            vec[self.rank[v]] = e
        return self.pres.value(m), tuple(reversed(vec))


@dataclass
class SubstitutionResult:
    verdict: str  # "true", "false" or "Inconclusive"
    failing: tuple | None = None
    steps: int = 0
    normal_forms: list = field(default_factory=list)

    def __bool__(self):
        return self.verdict == "true"


class RewriteLimit(Exception):
    pass


def _rewriter(pres: BinomialPresentation, cap: int):
    order = _TermOrder(pres)
    rules = []
    for lhs, rhs in pres.relations:
        if order.key(lhs) == order.key(rhs):
            continue
        lead, tail = (lhs, rhs) if order.key(lhs) > order.key(rhs) else (rhs, lhs)
        rules.append((lead, tail))
    counter = {"steps": 0}

    def normal_form(m: dict) -> dict:
        m = dict(m)
        while True:
            for lead, tail in rules:
                k = min(m.get(v, 0) // e for v, e in lead.items())
                if k > 0:
                    break
            else:
                return m
            counter["steps"] += 1
            if counter["steps"] > cap:
                raise RewriteLimit
            for v, e in lead.items():
                m[v] -= k * e
            for v, e in tail.items():
                m[v] = m.get(v, 0) + k * e
            m = _mono(m)

    return normal_form, counter


def substitution_check(src: BinomialPresentation, dst: BinomialPresentation,
                       mapping: Mapping[str, Mapping[str, int]]) -> SubstitutionResult:
    """Whether the substitution var -> monomial carries every relation of
    ``src`` to an identity modulo the relations of ``dst``.
    """
    for v in src.vars:
        if v not in mapping:
            raise GradedError(f"no image for variable {v}")
        img = _mono(mapping[v])
        if src.values[v] != dst.value(img):
            raise GradedError(
                f"value mismatch: {v} has value {src.values[v]}, its image "
                f"{format_monomial(img)} has value {dst.value(img)}"
            )
    cap = 10 * max(1, len(dst.relations))
    normal_form, counter = _rewriter(dst, cap)

    def image(m):
        out = {}
        for v, e in m.items():
            for w, f in mapping[v].items():
                out[w] = out.get(w, 0) + e * f
        return _mono(out)

    forms = []
    for lhs, rhs in src.relations:
        a, b = image(lhs), image(rhs)
        counter["steps"] = 0
        try:
            na, nb = normal_form(a), normal_form(b)
        except RewriteLimit:
            return SubstitutionResult("Inconclusive", (lhs, rhs), counter["steps"], forms)
        forms.append((format_monomial(na), format_monomial(nb)))
        if na != nb:
            return SubstitutionResult("false", (lhs, rhs), counter["steps"], forms)
    return SubstitutionResult("true", None, counter["steps"], forms)
