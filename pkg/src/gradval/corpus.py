"""Executable worked examples and the randomized verifier harness."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from . import lattice
from .graded import (
    BinomialPresentation,
    GradedExtension,
    GradedTower,
    finiteness_test,
    integrality_test,
    p_power_inclusion,
    substitution_check,
)
from .monoid import AffineMonoid, NotFinite
from .series import (
    BeyondTruncation,
    Polynomial,
    TruncatedSeries,
    default_seed,
    leading_orders,
    monomials_up_to,
    random_unit_series,
    series_order,
    sqrt_branch,
)
from .values import OrderedGroup, subgroup_index
from .verifier import MonomialExtension, analyze


@dataclass
class Report:
    name: str
    verdict: str
    expected: str
    witnesses: list = field(default_factory=list)
    details: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.verdict == self.expected

    def diff(self) -> str:
        return "" if self.passed else f"expected {self.expected!r}, got {self.verdict!r}"

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "verdict": self.verdict,
            "expected": self.expected,
            "passed": self.passed,
            "witnesses": [str(w) for w in self.witnesses],
            **self.details,
            "notes": list(self.notes),
        }


# -- ex1: integral closure fails at the semigroup level ---------------

def ex1_extension() -> GradedExtension:
    g = OrderedGroup.of("rat", "pi")
    s1 = AffineMonoid([g(1, 1), g(0, 1)], g, label="S^R")
    s2 = AffineMonoid([g(1, 0), g(0, 1)], g, label="S^S")
    return GradedExtension(s1, s2, label="ex1")


def _ex1() -> Report:
    res = integrality_test(ex1_extension())
    return Report("ex1", res.verdict, "NotIntegral", [res.witness] if res.witness is not None else [],
                  {"certificates": {k: v.multiple for k, v in res.certificates.items()}}, [res.caveat])


# -- ex2: integral but not finite (surrogate tower) ------------------

def ex2_tower(levels: int = 3) -> GradedTower:
    g = OrderedGroup.of("rat")
    s1 = AffineMonoid([g(1)], g, label="<1>")
    exts = []
    for n in range(1, levels + 1):
        s2 = AffineMonoid([g(Fraction(1, 3 ** n))], g, label=f"<1/3^{n}>")
        exts.append((n, GradedExtension(s1, s2, label=f"level {n}")))
    return GradedTower(exts, label="ex2 surrogate tower S1=<1>, S2=<1/3^N>", surrogate=True)


def _ex2() -> Report:
    tower = ex2_tower()
    integral = all(integrality_test(e).integral for _, e in tower.levels)
    fin = finiteness_test(tower)
    counts = fin.counts if isinstance(fin, NotFinite) else {}
    verdict = ("Integral" if integral else "NotIntegral") + "+" + fin.verdict
    return Report("ex2", verdict, "Integral+NotFinite", [],
                  {"levels": {str(k): v for k, v in counts.items()}},
                  ["surrogate tower, not the valuation of the original example"])


# -- ex3: purely inseparable extension of semigroup algebras ---------

def ex3_presentation(name: str, p: int, levels: int, literal: bool) -> tuple[list[str], list]:
    """Variables name_0..name_J with name_1^(p^2) = name_0 and the level relations.

    ``literal`` uses name_j = name_0^(p^(2j-2)) * name_(j-1) for j >= 2.
    Otherwise name_j is raised to p^2, which makes the value group grow by a
    factor p^2 per level.
    """
    v = [f"{name}_{j}" for j in range(levels + 1)]
    rels = [({v[1]: p * p}, {v[0]: 1})]
    for j in range(2, levels + 1):
        rels.append(({v[j]: 1 if literal else p * p}, {v[0]: p ** (2 * j - 2), v[j - 1]: 1}))
    return v, rels


@dataclass
class Ex3Result:
    p: int
    literal: bool
    substitution: str
    p_power: dict
    counts: list
    group_growth: list
    values: dict

    @property
    def counts_increase(self) -> bool:
        return all(a < b for a, b in zip(self.counts, self.counts[1:]))


def ex3_run(p: int, levels: int = 4, literal: bool = False) -> Ex3Result:
    xv, xr = ex3_presentation("X", p, levels, literal)
    uv, ur = ex3_presentation("U", p, levels, literal)
    dst = BinomialPresentation.from_relations(xv, xr, "X_0", 1)
    src = BinomialPresentation.from_relations(uv, ur, "U_0", p)
    sub = substitution_check(src, dst, {f"U_{j}": {f"X_{j}": p} for j in range(levels + 1)})
    g = OrderedGroup.of("rat")
    counts, growth, pp = [], [], {}
    base = dst.truncated(1).value_semigroup(g)
    for lv in range(1, levels + 1):
        s2 = dst.truncated(lv).value_semigroup(g)
        s1 = src.truncated(lv).value_semigroup(g)
        ext = GradedExtension(s1, s2, label=f"level {lv}")
        fin = finiteness_test(ext)
        counts.append(len(fin.generators))
        growth.append(subgroup_index(base.gens, s2.gens))
        for n in (1, 2):
            pp.setdefault(n, True)
            pp[n] = pp[n] and p_power_inclusion(ext, p, n).holds
    return Ex3Result(p, literal, sub.verdict, pp, counts, growth, {k: str(v) for k, v in dst.values.items()})


def _ex3(primes: Sequence[int] = (2, 3), levels: int = 4) -> Report:
    ok, notes, details = True, [], {"levels": {}}
    for p in primes:
        lit = ex3_run(p, levels, literal=True)
        rec = ex3_run(p, levels, literal=False)
        details["levels"][f"p={p}"] = rec.counts
        details.setdefault("literal_levels", {})[f"p={p}"] = lit.counts
        ok &= rec.substitution == "true" and all(rec.p_power.values()) and rec.counts_increase
        ok &= lit.substitution == "true" and all(lit.p_power.values())
        if len(set(lit.group_growth)) == 1:
            notes.append(f"p={p}: literal relations give value group index {lit.group_growth} over level 1 "
                         f"and constant counts {lit.counts}; exponent p^2 on U_j restores growth "
                         f"{rec.group_growth}")
    verdict = "true+true+NotFinite" if ok else "mismatch"
    return Report("ex3", verdict, "true+true+NotFinite", [], details, notes)


# -- ex4: immediate extension with a transcendental branch -----------

@dataclass
class Ex4Result:
    truncation: int
    semigroup: list
    ranks_r: list
    ranks_s: list
    infinite_detector: dict
    relation_found: bool

    @property
    def ok(self) -> bool:
        return (all(isinstance(o, BeyondTruncation) for o in self.infinite_detector.values())
                and self.ranks_r == self.ranks_s == [1] * len(self.ranks_r)
                and self.semigroup == list(range(len(self.semigroup))))


def ex4_run(truncation: int = 64, bound: int = 20, seed: int | None = None,
            detector_truncations: Sequence[int] = (16, 32, 64)) -> Ex4Result:
    seed = default_seed() if seed is None else seed
    p = random_unit_series(truncation, seed)
    x = TruncatedSeries.from_coeffs([0, 1], truncation)
    phi = sqrt_branch(p)
    semigroup = []
    for n in range(bound + 1):
        o = series_order(Polynomial.from_dict(["x"], {(n,): 1}), {"x": x})
        if o == n:
            semigroup.append(n)
    r = leading_orders(monomials_up_to(2, bound), [x, p], cover=bound)
    s = leading_orders(monomials_up_to(3, bound), [x, p, phi], cover=bound)
    detector = {}
    for n in detector_truncations:
        pn = random_unit_series(n, seed)
        poly = Polynomial.from_dict(["x", "y"], {(0, 1): 1, **{(k, 0): -c for k, c in enumerate(pn.coeffs) if c}})
        detector[n] = series_order(poly, {"x": TruncatedSeries.from_coeffs([0, 1], n), "y": pn})
    z2 = Polynomial.parse("z^2 - x*y", ["x", "y", "z"])
    rel = isinstance(series_order(z2, {"x": x, "y": p, "z": phi}), BeyondTruncation)
    return Ex4Result(truncation, semigroup, [r.rank(d) for d in range(bound + 1)],
                     [s.rank(d) for d in range(bound + 1)], detector, rel)


def _ex4(truncation: int = 64, bound: int = 20) -> Report:
    res = ex4_run(truncation, bound)
    verdict = "iso+Pinf" if res.ok and res.relation_found else "mismatch"
    return Report("ex4", verdict, "iso+Pinf", [], {
        "truncation": truncation,
        "semigroup": res.semigroup,
        "ranks_R": res.ranks_r,
        "ranks_S": res.ranks_s,
        "infinite_value": {str(k): str(v) for k, v in res.infinite_detector.items()},
    }, [f"verdicts hold at truncation {truncation} with seed {default_seed()}"])


# -- monomial extensions ---------------------------------------------------

def monomial_example(a) -> MonomialExtension:
    g = OrderedGroup.of("rat", "sqrt:2")
    return MonomialExtension(2, 2, a, [g(1, 0), g(0, 1)])


def _monomial(name: str, a) -> Report:
    rep = analyze(monomial_example(a))
    d = rep.to_dict()
    return Report(name, "ok" if rep.ok else "failed", "ok", [], {
        "e": d["e"], "invariant_factors": d["invariant_factors"],
        "w_exponents": d["w_exponents"], "coset_values": d["coset_values"],
        **{k: d[k] for k in ("free_basis_ok", "cosets_complete", "cover_disjoint", "invariants_trivial_only")},
    }, rep.notes)


EXAMPLES: dict[str, Callable[[], Report]] = {
    "ex1": _ex1,
    "ex2": _ex2,
    "ex3": _ex3,
    "ex4": _ex4,
    "monomial_diag": lambda: _monomial("monomial_diag", [[2, 0], [0, 2]]),
    "monomial_det3": lambda: _monomial("monomial_det3", [[2, 1], [1, 2]]),
}


def run_example(name: str) -> Report:
    if name not in EXAMPLES:
        raise KeyError(f"unknown example {name!r}; choose from {sorted(EXAMPLES)}")
    return EXAMPLES[name]()


# -- randomized harness ----------------------------------------------------

_BASIS = ("rat", "sqrt:2", "sqrt:3", "sqrt:5")


@dataclass
class RandSummary:
    seed: int
    dims: tuple
    max_entry: int
    tested: int = 0
    passed: int = 0
    skipped_singular: int = 0
    first_counterexample: dict | None = None

    @property
    def failed(self) -> int:
        return self.tested - self.passed

    def to_dict(self) -> dict:
        return {
            "verdict": "pass" if self.failed == 0 else "fail",
            "seed": self.seed, "dims": list(self.dims), "max_entry": self.max_entry,
            "tested": self.tested, "passed": self.passed, "failed": self.failed,
            "skipped_singular": self.skipped_singular,
            "witnesses": [self.first_counterexample] if self.first_counterexample else [],
        }


def random_extension(rng: random.Random, dims: Sequence[int], max_entry: int):
    """A random nonnegative matrix and ext, or (matrix, None) when singular."""
    s = rng.choice(list(dims))
    a = [[rng.randint(0, max_entry) for _ in range(s)] for _ in range(s)]
    if lattice.det(a) == 0:
        return a, None
    g = OrderedGroup.of(*_BASIS[:s])
    ys = [g.unit(i) * Fraction(rng.randint(1, 5), rng.randint(1, 3)) for i in range(s)]
    return a, MonomialExtension(s, s, a, ys)


def rand_suite(dims: int | Sequence[int] = 2, max_entry: int = 5, count: int = 200,
               seed: int | None = None) -> RandSummary:
    dims = (dims,) if isinstance(dims, int) else tuple(dims)
    if not dims or any(not 1 <= d <= 4 for d in dims):
        raise ValueError("dimensions must lie in 1..4")
    if not 0 <= count <= 10 ** 4:
        raise ValueError("count must lie in 0..10000")
    if max_entry < 0:
        raise ValueError("max_entry must be nonnegative")
    seed = default_seed() if seed is None else seed
    rng = random.Random(seed)
    out = RandSummary(seed, dims, max_entry)
    attempts = 0
    # the cap ends the loop when nonsingular draws are impossible (max_entry 0)
    while out.tested < count and attempts < 100 * count + 100:
        attempts += 1
        a, ext = random_extension(rng, dims, max_entry)
        if ext is None:
            out.skipped_singular += 1
            continue
        out.tested += 1
        rep = analyze(ext)
        if rep.ok and not rep.notes:
            out.passed += 1
        elif out.first_counterexample is None:
            out.first_counterexample = {"A": a, "notes": rep.notes}
    return out
