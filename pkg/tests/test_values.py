import threading
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from gradval.lattice import det
from gradval.values import (
    INFINITE,
    IntervalConstant,
    OrderedGroup,
    RefinementCapExceeded,
    SubgroupNotContained,
    SubgroupResidue,
    ValueGroupError,
    basis_constant,
    compare,
    in_subgroup,
    subgroup_index,
)

G = OrderedGroup.of("rat", "pi")
rat = st.fractions(min_value=-20, max_value=20, max_denominator=6)
elem = st.tuples(rat, rat).map(lambda c: G(*c))


def test_add_examples():
    assert G(1, 1) + G(0, 1) == G(1, 2)
    a = G(3, Fraction(1, 2))
    assert a + G.zero() == a
    assert (G(1, 0) + G(-1, 0)).is_zero()


def test_group_mismatch():
    with pytest.raises(ValueGroupError):
        G(1, 0) + OrderedGroup.of("rat", "pi")(1, 0)


def test_compare_examples():
    assert compare(G(1, 1), G(0, 1)) == 1
    assert compare(G(0, 1), G(1, 0)) == 1
    assert compare(G(2, 3), G(2, 3)) == 0


@pytest.mark.parametrize("tag, ref", [("pi", lambda: +mpmath.pi), ("sqrt:2", lambda: mpmath.sqrt(2)),
                                      ("sqrt:7", lambda: mpmath.sqrt(7))])
def test_enclosures_contain_constant(tag, ref):
    mpmath.mp.dps = 120
    ref = ref()
    b = basis_constant(tag)
    for bits in (8, 64, 256):
        lo, hi = b.interval(bits)
        assert mpmath.mpf(lo.numerator) / lo.denominator <= ref <= mpmath.mpf(hi.numerator) / hi.denominator
        assert hi - lo <= Fraction(1, 2 ** bits)


@given(elem, elem)
def test_compare_agrees_with_high_precision_float(a, b):
    mpmath.mp.dps = 60
    val = lambda g: mpmath.mpf(g.coords[0].numerator) / g.coords[0].denominator + \
        mpmath.mpf(g.coords[1].numerator) / g.coords[1].denominator * mpmath.pi
    diff = val(a) - val(b)
    expected = 0 if a.coords == b.coords else (1 if diff > 0 else -1)
    assert compare(a, b) == expected


@given(elem, elem, elem)
def test_total_order_properties(a, b, c):
    assert compare(a, b) == -compare(b, a)
    assert (compare(a, b) == 0) == (a.coords == b.coords)
    assert compare(a + c, b + c) == compare(a, b)
    if compare(a, b) <= 0 and compare(b, c) <= 0:
        assert compare(a, c) <= 0


def test_lex_prefix_dominates():
    h = OrderedGroup.of("rat", lex_prefix=1)
    assert compare(h(1, -100), h(0, 100)) == 1
    assert compare(h(0, 1), h(0, 0)) == 1


def test_refinement_cap_on_dependent_constants():
    fake = IntervalConstant("two", lambda bits: (Fraction(2), Fraction(2)))
    g = OrderedGroup((basis_constant("rat"), fake))
    with pytest.raises(RefinementCapExceeded):
        compare(g(2, 0), g(0, 1))


def test_finite_interval_list_exhausts():
    c = IntervalConstant("c", [(1, 2), (Fraction(5, 4), Fraction(3, 2))])
    g = OrderedGroup((basis_constant("rat"), c))
    with pytest.raises(RefinementCapExceeded):
        compare(g(Fraction(4, 3), 0), g(0, 1))


def test_interval_cache_is_thread_safe():
    b = basis_constant("sqrt:11")
    out = []
    ts = [threading.Thread(target=lambda: out.append(b.interval(128))) for _ in range(8)]
    for t in ts:
        t.start()
    for t in ts:
        t.join()
    assert len(set(out)) == 1


def test_in_subgroup_examples():
    assert in_subgroup(G(0, 1), [G(1, 1), G(1, 0)]) == [1, -1]
    assert in_subgroup(G(1, 0), [G(1, 1), G(0, 1)]) == [1, -1]
    assert in_subgroup(G(Fraction(1, 2), 0), [G(1, 0)]) is None


@given(elem, st.lists(elem, min_size=1, max_size=3))
def test_in_subgroup_certificate_recombines(gamma, gens):
    cert = in_subgroup(gamma, gens)
    if cert is not None:
        total = G.zero()
        for c, g in zip(cert, gens):
            total = total + g * c
        assert total == gamma


def test_subgroup_index_examples():
    e = [G(1, 0), G(0, 1)]
    assert subgroup_index([G(2, 0), G(0, 2)], e) == 4
    assert subgroup_index(e, e) == 1
    assert subgroup_index([G(3, 0)], e) == INFINITE


def test_subgroup_index_reports_witness():
    with pytest.raises(SubgroupNotContained) as info:
        subgroup_index([G(Fraction(1, 2), 0)], [G(1, 0), G(0, 1)])
    assert info.value.witness == G(Fraction(1, 2), 0)


@given(st.lists(st.lists(st.integers(-5, 5), min_size=2, max_size=2), min_size=2, max_size=2))
def test_index_times_covolume(rows):
    d = det(rows)
    if d == 0:
        return
    amb = [G(Fraction(1, 2), 0), G(0, Fraction(1, 2))]
    sub = [G(Fraction(a, 2), Fraction(b, 2)) for a, b in rows]
    covolume_amb, covolume_sub = Fraction(1, 4), Fraction(abs(d), 4)
    assert subgroup_index(sub, amb) * covolume_amb == covolume_sub


@given(st.lists(st.tuples(st.integers(-4, 4), st.integers(-4, 4)), min_size=1, max_size=3), elem, elem)
def test_residue_is_class_invariant(gens, a, b):
    gs = [G(*g) for g in gens]
    res = SubgroupResidue(gs)
    same = res.reduce(a) == res.reduce(b)
    assert same == (in_subgroup(a - b, gs) is not None)
