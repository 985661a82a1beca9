from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from filtap.errors import (ExprError, ExprSyntaxError, NegativeExponent, NotAMonomial,
                           UnknownVariable)
from filtap.expr import (VarContext, parse_filtration, parse_jet, parse_monomial_ideal,
                         parse_polynomial, serialize_ideal, serialize_jet,
                         serialize_polynomial, tokenize)
from filtap.jet import Space

from strategies import ideals, jets, polynomials

X = VarContext(("x",), ())
XY = VarContext(("x",), ("y1",))
X12 = VarContext(("x1", "x2"), ())


def test_binomial_square():
    p = parse_polynomial("(1+x)^2", X)
    assert p.terms == {(0,): 1, (1,): 2, (2,): 1}
    assert p.exact


def test_term_listing():
    p = parse_polynomial("y1^2 - 1 - x", XY)
    assert len(p.terms) == 3 and p.degree() == 2


def test_negative_exponent():
    with pytest.raises(NegativeExponent):
        parse_polynomial("x^-1", X)


@pytest.mark.parametrize("text, pos", [("x +* 2", 3), ("(x", 2), ("x y", 2), ("2x", 1)])
def test_syntax_errors_carry_position(text, pos):
    with pytest.raises(ExprSyntaxError) as info:
        parse_polynomial(text, X)
    assert info.value.position == pos


def test_unknown_variable_position():
    with pytest.raises(UnknownVariable) as info:
        parse_polynomial("x + 3*z", X)
    assert info.value.position == 6


def test_rational_literals_normalize():
    p = parse_polynomial("-5/8*x + 4/6", X)
    assert p.coeff((1,)) == Fraction(-5, 8)
    assert p.coeff((0,)) == Fraction(2, 3)
    with pytest.raises(ExprSyntaxError):
        parse_polynomial("1/0", X)


def test_precedence():
    # ^ before *, * before +, unary minus over the whole power
    assert parse_polynomial("2*x^2+1", X).terms == {(2,): 2, (0,): 1}
    assert parse_polynomial("-x^2", X).terms == {(2,): -1}
    with pytest.raises(ExprSyntaxError):
        parse_polynomial("x^2^3", X)


def test_ideal_minimized():
    assert parse_monomial_ideal("x1, x1^2", X12).gens == ((1, 0),)
    assert len(parse_monomial_ideal("x1*x2, x2^2", X12).gens) == 2


@pytest.mark.parametrize("text", ["x1 + x2", "2*x1", "x1, -x2"])
def test_not_a_monomial(text):
    with pytest.raises(NotAMonomial):
        parse_monomial_ideal(text, X12)


def test_ideal_parens_and_empty():
    assert parse_monomial_ideal("(x1^2, x2)", X12) == parse_monomial_ideal("x2, x1^2", X12)
    assert parse_monomial_ideal("", X12).is_zero()
    assert parse_monomial_ideal("1", X12).is_unit()


def test_filtration_rules():
    F = parse_filtration("scaled((x1,x2)^2, m, j)", X12)
    assert F.ideal_at(1).degree_min() == 3
    G = parse_filtration("cap(powers((x1), j), powers((x2), j))", X12)
    assert G.ideal_at(2).gens == ((2, 2),)
    H = parse_filtration("powers(m, 2*j+1)", X12, j_max=4)
    assert H.ideal_at(1).degree_min() == 3


def test_jet_text_form():
    p = parse_jet("1 + x ; order: 3", X)
    assert p.order == 3 and not p.exact
    q = parse_jet("1 + x ; order: 3 ; exact", X)
    assert q.exact


def test_tokenize_rejects_stray_characters():
    with pytest.raises(ExprSyntaxError):
        parse_polynomial("x & 1", X)
    assert [t[0] for t in tokenize("x^2")][:3] == ["NAME", "^", "INT"]


SP = Space(("x1", "x2"), ("t",))
CTX = VarContext(("x1", "x2"), (), "t")


@given(polynomials(SP))
def test_polynomial_round_trip(p):
    q = parse_polynomial(serialize_polynomial(p), CTX, p.order)
    assert q.terms == p.terms


@given(jets(SP, 4))
def test_jet_round_trip(p):
    text = serialize_jet(p)
    q = parse_jet(text, CTX)
    assert (q.terms, q.order, q.exact) == (p.terms, p.order, p.exact)
    assert serialize_jet(q) == text


@given(ideals(("x1", "x2")))
def test_ideal_round_trip(I):
    assert parse_monomial_ideal(serialize_ideal(I), X12) == I


@settings(max_examples=300)
@given(st.text(alphabet="x12+-*^/() 0y;:,", max_size=16))
def test_parser_is_total(text):
    try:
        parse_polynomial(text, X12)
    except ExprError as exc:
        assert exc.position is None or 0 <= exc.position <= len(text)
