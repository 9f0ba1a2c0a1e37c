import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from gradval import lattice
from gradval.values import OrderedGroup, compare, in_subgroup, minimum, subgroup_index
from gradval.verifier import (
    AmbiguousLeadingForm,
    ContractViolation,
    CosetValidationError,
    MonomialExtension,
    VerifierError,
    analyze,
    character_action,
    coset_representatives,
    kummer_symmetric_certificate,
    min_formula_check,
)

G = OrderedGroup.of("rat", "sqrt:2")
G3 = OrderedGroup.of("rat", "sqrt:2", "sqrt:3")


def ext2(a):
    return MonomialExtension(2, 2, a, [G(1, 0), G(0, 1)])


def ext3(a):
    return MonomialExtension(3, 3, a, [G3(1, 0, 0), G3(0, 1, 0), G3(0, 0, 1)])


def test_validation():
    with pytest.raises(VerifierError):
        ext2([[1, 2], [2, 4]])
    with pytest.raises(VerifierError):
        ext2([[1, -1], [0, 1]])
    with pytest.raises(VerifierError):
        MonomialExtension(2, 2, [[1, 0], [0, 1]], [G(1, 0), G(2, 0)])
    with pytest.raises(VerifierError):
        MonomialExtension(3, 2, [[1]], [G(1, 0), G(0, 1)])


def test_x_values_follow_rows():
    e = MonomialExtension(2, 3, [[2, 1], [1, 2]], [G(1, 0), G(0, 1), G(3, 1)])
    assert e.x_values() == [G(2, 1), G(1, 2), G(3, 1)]
    assert e.basis_rows() == [(2, 1, 0), (1, 2, 0), (0, 0, 1)]


def test_analyze_diag():
    rep = analyze(ext2([[2, 0], [0, 2]]))
    assert rep.e == 4 and rep.invariant_factors.invariant_factors == (2, 2)
    assert rep.ok and rep.w_exponents[0] == (0, 0)
    assert set(rep.w_exponents) == {(0, 0), (1, 0), (0, 1), (1, 1)}


def test_analyze_det3():
    rep = analyze(ext2([[2, 1], [1, 2]]))
    assert rep.e == 3 and rep.invariant_factors.invariant_factors == (3,)
    assert rep.ok


def test_analyze_identity():
    rep = analyze(ext2([[1, 0], [0, 1]]))
    assert rep.e == 1 and rep.w_exponents == [(0, 0)] and rep.ok
    assert rep.coset_values == [G(0, 0)]


def test_diag_cosets_pairwise_outside_base_group():
    e = ext2([[2, 0], [0, 2]])
    vals = coset_representatives(e)
    xs = e.x_values()
    assert len(vals) == 4
    for a, b in itertools.combinations(vals, 2):
        assert in_subgroup(a - b, xs) is None


def test_corrupted_free_basis_is_rejected():
    e = ext2([[2, 0], [0, 2]])
    with pytest.raises(CosetValidationError) as info:
        coset_representatives(e, [(0, 0), (1, 0), (0, 1), (2, 1)])
    assert info.value.witness == ((0, 1), (2, 1))
    with pytest.raises(CosetValidationError):
        coset_representatives(e, [(0, 0), (1, 0)])


def _nonsingular(size, top):
    for flat in itertools.product(range(top + 1), repeat=size * size):
        a = [list(flat[i * size:(i + 1) * size]) for i in range(size)]
        d = lattice.det(a)
        if d and abs(d) <= 12:
            yield a


def test_exhaustive_small_2x2():
    for a in _nonsingular(2, 4):
        e = ext2(a)
        rep = analyze(e)
        assert rep.ok and not rep.notes, a
        # four independent counts of the same number
        assert len(rep.w_exponents) == abs(lattice.det(a)) == rep.invariant_factors.order \
            == subgroup_index(e.x_values(), list(e.y_values))
        # coset classes by an independent labelling: the class of w in Z^s / A^T Z^s
        labels = {lattice.cokernel_class(e.A.T, list(w[:2])) for w in rep.w_exponents}
        assert len(labels) == rep.e
        assert character_action(e).invariant_indices == {0}


def test_sampled_3x3():
    rng = random.Random(3)
    done = 0
    while done < 25:
        a = [[rng.randint(0, 2) for _ in range(3)] for _ in range(3)]
        d = lattice.det(a)
        if not d or abs(d) > 12:
            continue
        done += 1
        e = ext3(a)
        rep = analyze(e)
        assert rep.ok and rep.e == abs(d), a
        labels = {lattice.cokernel_class(e.A.T, list(w)) for w in rep.w_exponents}
        assert len(labels) == rep.e


def test_character_table_diag():
    act = character_action(ext2([[2, 0], [0, 2]]))
    assert act.e == 4 and act.adj == lattice.IntMatrix([[2, 0], [0, 2]])
    assert act.exponent((1, 0), (1, 0)) == 2
    assert act.invariant_indices == {0}
    assert len(act.table) == 4 and all(len(row) == 4 for row in act.table)


def test_character_table_det3():
    act = character_action(ext2([[2, 1], [1, 2]]))
    assert len(act.group_elements) == 3
    for i in (1, 2):
        assert any(row[i] for row in act.table)


def test_character_identity():
    act = character_action(ext2([[1, 0], [0, 1]]))
    assert act.table == [[0]] and act.trivial_only


matrices = st.lists(st.lists(st.integers(0, 4), min_size=2, max_size=2), min_size=2, max_size=2).filter(
    lambda a: lattice.det(a) != 0)
vec = st.lists(st.integers(-6, 6), min_size=2, max_size=2)


@settings(max_examples=60, deadline=None)
@given(matrices, vec, vec, vec, vec)
def test_character_is_additive_and_well_defined(a, c1, c2, k, v):
    act = character_action(ext2(a))
    both = [x + y for x, y in zip(c1, c2)]
    assert act.exponent(both, v) == (act.exponent(c1, v) + act.exponent(c2, v)) % act.e
    # shifting c by a column combination of A gives the same group element
    shifted = [x + y for x, y in zip(c1, lattice.IntMatrix(a).apply(k))]
    assert act.exponent(shifted, v) == act.exponent(c1, v)


def test_min_formula_examples():
    ident = ext2([[1, 0], [0, 1]])
    assert min_formula_check(ident, [G(3, 1)]) == G(3, 1)
    e = ext2([[2, 0], [0, 2]])
    cv = coset_representatives(e)
    coeffs = [G(0, 0), G(2, 0), None, None]
    # oracle: enumerate the present sums by hand
    sums = [coeffs[i] + cv[i] for i in (0, 1)]
    assert min_formula_check(e, coeffs) == minimum(sums)
    with pytest.raises(VerifierError):
        min_formula_check(e, [None] * 4)
    with pytest.raises(VerifierError):
        min_formula_check(e, [G(1, 0), None, None, None])  # (1,0) is not in 2Z + 2Z*sqrt2


def test_min_formula_reports_ties():
    e = ext2([[2, 0], [0, 2]])
    with pytest.raises(ContractViolation) as info:
        min_formula_check(e, [G(0, 0), G(0, 0), None, None], [G(1, 0), G(1, 0), G(5, 5), G(5, 5)])
    assert info.value.witness == (0, 1)


def test_kummer_ex2_map():
    e = ext2([[2, 0], [0, 2]])
    cert = kummer_symmetric_certificate({(1, 0): 1, (0, 1): 1}, e)
    assert cert.r == 4 and cert.inequalities_ok
    # oracle: (T^2 - (x+y)^2)(T^2 - (x-y)^2)
    assert cert.S[0] == {} and cert.S[2] == {}
    assert cert.S[1] == {(2, 0): -2, (0, 2): -2}
    assert cert.S[3] == {(4, 0): 1, (2, 2): -2, (0, 4): 1}
    zval = G(1, 0)
    for i, v in enumerate(cert.S_values, 1):
        assert v is None or compare(v, zval * i) >= 0
    assert cert.S_values[3] == zval * 4
    assert cert.integral_equation == [(0, 1), (2, -2), (4, 1)]
    assert cert.equation_value == 0
    assert cert.equation_text() == "in(z)^4 - 2*in(z)^2 + 1 = 0"


def test_kummer_quadratic():
    e = ext2([[2, 0], [0, 1]])
    cert = kummer_symmetric_certificate({(1, 0): 1}, e)
    assert cert.r == 2 and cert.S[0] == {} and cert.S[1] == {(2, 0): -1}
    assert cert.integral_equation == [(0, 1), (2, -1)] and cert.equation_value == 0


def test_kummer_trivial_group():
    cert = kummer_symmetric_certificate({(1, 0): 1}, ext2([[1, 0], [0, 1]]))
    assert cert.r == 1 and cert.S == [{(1, 0): -1}]
    assert cert.equation_text() == "in(z) - 1 = 0"


def test_kummer_strict_fails_on_equality():
    e = ext2([[2, 0], [0, 2]])
    cert = kummer_symmetric_certificate({(1, 0): 1, (0, 1): 1}, e, strict=True)
    assert not cert.inequalities_ok


def test_kummer_ambiguous_leading_form():
    e = MonomialExtension(2, 3, [[2, 0], [0, 2]], [G(1, 0), G(0, 1), G(1, 0)])
    with pytest.raises(AmbiguousLeadingForm):
        kummer_symmetric_certificate({(1, 0, 0): 1, (0, 0, 1): -1}, e)
    with pytest.raises(VerifierError):
        kummer_symmetric_certificate({}, e)
    with pytest.raises(VerifierError):
        kummer_symmetric_certificate({(1, 0): 1}, e)


@settings(max_examples=20, deadline=None)
@given(st.dictionaries(st.tuples(st.integers(0, 2), st.integers(0, 2)),
                       st.fractions(-3, 3, max_denominator=2).filter(bool), min_size=1, max_size=3))
def test_kummer_inequalities_hold_for_random_z(z):
    # z is integral over the invariants, so every S_i has value >= i * value(z)
    e = ext2([[2, 1], [1, 2]])
    cert = kummer_symmetric_certificate(z, e)
    assert cert.inequalities_ok and cert.equation_value == 0
    assert all(isinstance(c, Fraction) for p in cert.S for c in p.values())
