import pytest
from hypothesis import given, settings, strategies as st

from filtap.errors import InputError
from filtap.expr import parse_filtration, parse_monomial_ideal
from filtap.ideal import (Filtration, Fixed, MonomialIdeal, Powers, contains_ideal, contains_jet,
                          filtrations_cofinal, reduce_mod, support_ideal, weak_fg_check)
from filtap.jet import Jet, Space

from oracles import ideal_set, monomials_up_to, product_set
from strategies import ideals, jets

V2 = ("x1", "x2")
V3 = ("x1", "x2", "x3")
S2 = Space(V2)


def I(text, vars=V2):
    return parse_monomial_ideal(text, list(vars))


def test_examples():
    m = MonomialIdeal.maximal(V2)
    assert (m * m) == I("x1^2, x1*x2, x2^2")
    assert (I("x1") & I("x2")) == I("x1*x2")
    assert set(MonomialIdeal(V2, [(2, 0), (0, 1), (2, 1)]).gens) == {(2, 0), (0, 1)}


def test_powers():
    assert I("x1") ** 2 == I("x1^2")
    assert (MonomialIdeal.maximal(V2) ** 0).is_unit()
    cube = MonomialIdeal.maximal(V2) ** 3
    assert sorted(cube.gens) == sorted(m for m in monomials_up_to(2, 3) if sum(m) == 3)


def test_containment_examples():
    assert contains_ideal(I("x1"), I("x1^2"))
    assert not contains_ideal(I("x1^2"), I("x1"))
    assert contains_ideal(I("x1, x2"), I("x1*x2"))


def test_membership_certificates():
    c = contains_jet(I("x1*x2"), Jet(S2, {(2, 1): 1, (1, 2): 1}, 6))
    assert c.holds and c.verify()
    assert c.cofactors[0].terms == {(1, 0): 1, (0, 1): 1}
    bad = contains_jet(I("x1^2"), Jet(S2, {(1, 0): 1, (0, 2): 1}, 6))
    assert not bad.holds and bad.offending_text() == "x1"
    zero = contains_jet(I("x1"), Jet.zero(S2, 4))
    assert zero.holds and all(c.is_zero() for c in zero.cofactors)


def test_reduce_mod():
    f = Jet(S2, {(0, 0): 1, (1, 0): 2, (0, 1): 3, (1, 1): 4}, 4)
    assert reduce_mod(f, I("x2")).terms == {(0, 0): 1, (1, 0): 2}


def test_support_ideal():
    f = Jet(S2, {(2, 0): 1, (2, 1): 5, (0, 3): 1}, 4)
    assert support_ideal(f) == I("x1^2, x2^3")


def test_weak_fg_examples():
    c = weak_fg_check(Filtration(Powers(MonomialIdeal.maximal(V2)), V2), 2)
    assert c.N_tilde == 0 and set(c.q_set) == {(2, 0), (1, 1), (0, 2)}
    assert c.verify()
    F = parse_filtration("scaled((x1,x2)^2, m, j)", list(V2))
    c = weak_fg_check(F, 3)
    assert c.N_tilde == 0 and all(sum(q) == 5 for q in c.q_set)
    Z = Filtration(Fixed(MonomialIdeal.zero(V2)), V2)
    assert weak_fg_check(Z, 1).q_set == ()


def test_cofinal_examples():
    A = parse_filtration("powers(m, j)", list(V2))
    B = parse_filtration("powers(m, 2*j)", list(V2), j_max=4)
    t = filtrations_cofinal(A, B, 3)
    assert t.forward == [0, 2, 4, 6] and t.backward == [0, 1, 1, 2]
    assert filtrations_cofinal(A, A, 3).forward == [0, 1, 2, 3]
    X1 = parse_filtration("powers((x1), j)", list(V2))
    X2 = parse_filtration("powers((x2), j)", list(V2))
    t = filtrations_cofinal(X1, X2, 3)
    assert not t.equivalent and t.refusal == ("forward", 1)


def test_non_descending_rule_rejected():
    with pytest.raises(InputError):
        parse_filtration("sum(fixed((x1)), powers((x2), 1-j))", list(V2), j_max=2)


# -- brute-force comparison ------------------------------------------------------------

DEG = 8


@settings(max_examples=200)
@given(st.sampled_from([("x1",), V2, V3]).flatmap(
    lambda v: st.tuples(st.just(v), ideals(v, 4, 3), ideals(v, 4, 3))))
def test_ideal_algebra_matches_enumeration(data):
    vars, a, b = data
    n = len(vars)
    sa, sb = ideal_set(a.gens, n, DEG), ideal_set(b.gens, n, DEG)
    assert ideal_set((a + b).gens, n, DEG) == sa | sb
    assert ideal_set((a & b).gens, n, DEG) == sa & sb
    assert ideal_set((a * b).gens, n, DEG) == product_set(a.gens, b.gens, n, DEG)
    assert contains_ideal(a, b) == (sb <= sa)


@given(ideals(V2, 3, 3), jets(S2, 5))
def test_certificates_recombine(ideal, f):
    c = contains_jet(ideal, f)
    members = ideal_set(ideal.gens, 2, 5)
    assert c.holds == all(m in members for m in f.terms)
    if c.holds:
        assert c.verify() and c.recombine().terms == f.terms
