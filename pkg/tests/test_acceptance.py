"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v`` (lines appear in the terminal
summary) or directly with ``python tests/test_acceptance.py``.
"""

import itertools
import random
import sys
import time
from fractions import Fraction

import pytest
import sympy

from gradval import lattice
from gradval.corpus import ex1_extension, ex2_tower, ex3_run, ex4_run, random_extension, monomial_example
from gradval.graded import finiteness_test, integrality_test
from gradval.monoid import AffineMonoid, NotFinite, member, par_points, translate_cover, translates_disjoint
from gradval.series import BeyondTruncation, DEFAULT_SEED
from gradval.values import OrderedGroup, compare, subgroup_index
from gradval.verifier import (
    ContractViolation,
    MonomialExtension,
    analyze,
    character_action,
    coset_representatives,
    kummer_symmetric_certificate,
    min_formula_check,
)

RESULTS: list[str] = []
SMALL_MATRICES = {"diag(2,2)": [[2, 0], [0, 2]], "[[2,1],[1,2]]": [[2, 1], [1, 2]]}


def record(number, title, ok, elapsed, limit, detail=""):
    within = elapsed < limit
    line = (f"{'PASS' if ok and within else 'FAIL'} criterion {number}: {title} "
            f"({elapsed:.2f}s, limit {limit}s){' ' + detail if detail else ''}")
    RESULTS.append(line)
    print(line)
    assert ok, line
    assert within, line


def _random_matrices(count=200, seed=DEFAULT_SEED):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        a, ext = random_extension(rng, (2, 3), 5)
        if ext is not None:
            out.append((a, ext))
    return out


@pytest.fixture(scope="module")
def random_instances():
    return _random_matrices()


def test_criterion_1_parallelepiped(random_instances):
    start = time.perf_counter()
    bad = []
    for a, ext in random_instances:
        box = par_points(ext.basis_rows())
        ok = len(box.points) == abs(lattice.det(a))
        ok &= bool(translates_disjoint(box.points, AffineMonoid(ext.basis_rows(), auxiliary=True)))
        covered, _ = translate_cover(box, 2 * max(max(r) for r in a) + 1)
        if not (ok and covered):
            bad.append(a)
    record(1, "parallelepiped count, disjoint translates, cover", not bad,
           time.perf_counter() - start, 30, f"[{len(random_instances)} matrices, {len(bad)} failures]")


def test_criterion_2_index_agreement(random_instances):
    start = time.perf_counter()
    bad = []
    for a, ext in random_instances:
        counts = {
            abs(lattice.det(a)),
            lattice.quotient_structure(lattice.IntMatrix(a).T).order,
            subgroup_index(ext.x_values(), list(ext.y_values)),
            len(par_points(ext.basis_rows()).points),
        }
        if len(counts) != 1:
            bad.append((a, counts))
    record(2, "|det| = quotient order = group index = |Lambda|", not bad, time.perf_counter() - start, 30,
           f"[{len(bad)} disagreements]")


def test_criterion_3_ex1_not_integral():
    start = time.perf_counter()
    ext = ex1_extension()
    res = integrality_test(ext)
    g = ext.s2.group
    ok = res.verdict == "NotIntegral" and res.witness == g(1, 0)
    # brute force: m*(1,0) = a*(1,1) + b*(0,1) needs a = m and a + b = 0
    hits = [m for m in range(1, 13) for a, b in itertools.product(range(40), repeat=2)
            if (a, a + b) == (m, 0)]
    ok &= not hits and all(member(g(m, 0), ext.s1) is None for m in range(1, 13))
    record(3, "ex1 NotIntegral with witness (1,0)", ok, time.perf_counter() - start, 1)


def test_criterion_4_ex2_tower():
    start = time.perf_counter()
    tower = ex2_tower(3)
    integral = all(integrality_test(e).integral for _, e in tower.levels)
    fin = finiteness_test(tower)
    ok = integral and isinstance(fin, NotFinite) and fin.counts == {1: 3, 2: 9, 3: 27}
    record(4, "surrogate tower integral with counts 3, 9, 27 and NotFinite", ok, time.perf_counter() - start, 5,
           f"[counts {getattr(fin, 'counts', None)}]")


def test_criterion_5_ex3():
    start = time.perf_counter()
    ok, detail = True, []
    for p in (2, 3):
        res = ex3_run(p, 4)
        ok &= res.substitution == "true" and res.p_power == {1: True, 2: True} and res.counts_increase
        detail.append(f"p={p} counts {res.counts}")
    record(5, "ex3 substitution, p-power inclusion n=1,2, growing counts", ok,
           time.perf_counter() - start, 10, f"[{'; '.join(detail)}]")


def test_criterion_6_ex4():
    start = time.perf_counter()
    res = ex4_run(truncation=64, bound=20)
    ok = set(range(21)) <= set(res.semigroup)
    ok &= res.ranks_r == res.ranks_s == [1] * 21
    ok &= sorted(res.infinite_detector) == [16, 32, 64]
    ok &= all(isinstance(v, BeyondTruncation) for v in res.infinite_detector.values())
    record(6, "ex4 graded ranks agree and y - p(x) is beyond truncation", ok,
           time.perf_counter() - start, 10)


def test_criterion_7_verifier_small_matrices():
    start = time.perf_counter()
    ok = True
    for a in SMALL_MATRICES.values():
        ext = monomial_example(a)
        rep = analyze(ext)
        ok &= rep.ok and character_action(ext).invariant_indices == {0}
        ok &= len(coset_representatives(ext)) == rep.e
    checked = 0
    for flat in itertools.product(range(5), repeat=4):
        a = [list(flat[:2]), list(flat[2:])]
        d = lattice.det(a)
        if not d or abs(d) > 12:
            continue
        checked += 1
        ext = monomial_example(a)
        rep = analyze(ext)
        labels = {lattice.cokernel_class(ext.A.T, list(w)) for w in rep.w_exponents}
        ok &= rep.ok and len(labels) == rep.e
    record(7, "verifier booleans and trivial invariants", ok, time.perf_counter() - start, 5,
           f"[{checked} matrices with e <= 12]")


def test_criterion_8_kummer():
    start = time.perf_counter()
    rng = random.Random(DEFAULT_SEED)
    g = OrderedGroup.of("rat", "sqrt:2")
    ys = [g(Fraction(rng.randint(1, 9), rng.randint(1, 4)), 0), g(0, Fraction(rng.randint(1, 9), rng.randint(1, 4)))]
    ext = MonomialExtension(2, 2, [[2, 0], [0, 2]], ys)
    # kummer_symmetric_certificate cross-checks the product and Newton expansions internally
    cert = kummer_symmetric_certificate({(1, 0): 1, (0, 1): 1}, ext)
    zval = ys[0] if compare(ys[0], ys[1]) <= 0 else ys[1]
    # third expansion with sympy over the four conjugates +-x +-y
    t, x, y = sympy.symbols("t x y")
    prod = sympy.Poly(sympy.expand(sympy.prod(t - (a * x + b * y) for a in (1, -1) for b in (1, -1))), t)
    for i, si in enumerate(cert.S, 1):
        c = prod.coeff_monomial(t ** (4 - i))
        ref = sympy.Poly(c, x, y).as_dict() if c != 0 else {}
        assert {k: Fraction(int(v.p), int(v.q)) for k, v in ref.items()} == si
    ok = cert.inequalities_ok and cert.equation_value == 0 and cert.r == 4
    ok &= all(v is None or compare(v, zval * i) >= 0 for i, v in enumerate(cert.S_values, 1))
    record(8, "Kummer certificate for z = x + y", ok, time.perf_counter() - start, 2,
           f"[{cert.equation_text()}]")


def test_criterion_9_min_formula():
    start = time.perf_counter()
    rng = random.Random(DEFAULT_SEED)
    ok, trials = True, 0
    for a in SMALL_MATRICES.values():
        ext = monomial_example(a)
        cv = coset_representatives(ext)
        xs = ext.x_values()
        for _ in range(1000):
            coeffs = [None] * ext.e
            for i in rng.sample(range(ext.e), rng.randint(1, ext.e)):
                v = ext.group.zero()
                for x in xs:
                    v = v + x * rng.randint(-4, 4)
                coeffs[i] = v
            try:
                best = min_formula_check(ext, coeffs, cv)
            except ContractViolation:
                ok = False
                continue
            # independent oracle: count indices attaining the minimum
            sums = [c + cv[i] for i, c in enumerate(coeffs) if c is not None]
            ok &= sum(compare(s, best) == 0 for s in sums) == 1
            ok &= all(compare(s, best) >= 0 for s in sums)
            trials += 1
    record(9, "unique minimizer in the value-min formula", ok, time.perf_counter() - start, 5,
           f"[{trials} trials]")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
