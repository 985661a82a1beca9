import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from filtap.errors import (CertificateInvalid, ContractionViolated, HZero, OrderBudgetExceeded,
                           PrefixNotApproximate, ResidualNotInIdeal)
from filtap.expr import VarContext, parse_filtration, parse_monomial_ideal, parse_polynomial
from filtap.ideal import Filtration, MonomialIdeal
from filtap.jet import Jet
from filtap.lift import (LiftRequest, ann_coker_step, lift_general_filtration,
                         tougeron_step)
from filtap.system import PolySystem, evaluate, jacobian_y, mat_vec

from oracles import series_by_coefficients, to_fraction_terms
from strategies import random_system

CX = VarContext(("x",), ("y",))
x, y = sympy.symbols("x y")


def sympy_series(expr, order):
    """Taylor coefficients of ``expr`` at 0 up to ``order`` as Fractions."""
    poly = sympy.series(expr, x, 0, order + 1).removeO()
    if poly == 0:
        return {}
    return {k: Fraction(int(c.p), int(c.q)) for (k,), c in sympy.Poly(poly, x).terms() if c != 0}


def request(eqs, start, ideal, order, ctx=CX, quotient=None):
    sys = PolySystem.from_text(ctx, eqs, quotient)
    ys = [parse_polynomial(s, ctx.x_space) for s in start]
    return LiftRequest(sys, ys, parse_monomial_ideal(ideal, ctx.x_space), order)


def test_square_root():
    res = tougeron_step(request(["y^2 - 1 - x"], ["1"], "x", 6))
    expected = {0: 1, 1: Fraction(1, 2), 2: Fraction(-1, 8), 3: Fraction(1, 16),
                4: Fraction(-5, 128), 5: Fraction(7, 256), 6: Fraction(-21, 1024)}
    assert to_fraction_terms(res.y_solution[0]) == expected
    assert res.verify()


def test_monomial_h():
    res = tougeron_step(request(["x^2*y - x^10"], ["0"], "x^10", 12))
    assert res.h.terms == {(4,): 1}
    assert res.y_solution[0].terms == {(8,): 1}
    assert res.correction_ideal == parse_monomial_ideal("x^2", ["x"])
    assert res.verify()


def test_degenerate_h_matches_oracle():
    res = tougeron_step(request(["x^2*y + y^2 - x^10"], ["0"], "x^10", 20))
    assert to_fraction_terms(res.y_solution[0]) == {8: 1, 14: -1, 20: 2}
    # the root of the quadratic in y that vanishes to high order at 0
    root = x**2 * (sympy.sqrt(1 + 4 * x**6) - 1) / 2
    assert to_fraction_terms(res.y_solution[0]) == sympy_series(root, 20)


def test_contraction_refusal():
    with pytest.raises((ContractionViolated, ResidualNotInIdeal)):
        tougeron_step(request(["x^2*y - x^5"], ["0"], "x^5", 10))


def test_residual_outside_ideal():
    with pytest.raises(ResidualNotInIdeal):
        tougeron_step(request(["y^2 - 1 - x"], ["1"], "x^2", 6))


def test_h_zero():
    with pytest.raises(HZero):
        tougeron_step(request(["y - x", "y - x^2"], ["x"], "x^3", 6))


def test_start_too_short():
    sys = PolySystem.from_text(CX, ["x^2*y - x^10"])
    start = [Jet.zero(CX.x_space, 3, exact=False)]
    with pytest.raises(OrderBudgetExceeded):
        tougeron_step(LiftRequest(sys, start, parse_monomial_ideal("x^10", ["x"]), 12))


def test_certificate_variant_matches_adjugate():
    req = request(["y^2 - 1 - x"], ["1"], "x", 8)
    plain = tougeron_step(req)
    d = jacobian_y(req.sys, req.y_start, plain.working_order)
    via = ann_coker_step(req, d.h, d.M)
    assert [s.terms for s in via.y_solution] == [s.terms for s in plain.y_solution]


def test_certificate_variant_weaker_loss():
    sp = CX.x_space
    req = request(["x^2*y - x^6"], ["0"], "x^6", 8)
    res = ann_coker_step(req, parse_polynomial("x^2", sp), [[parse_polynomial("1", sp)]])
    assert res.y_solution[0].terms == {(4,): 1}
    assert res.working_order == 8 + 4
    with pytest.raises(ContractionViolated):
        tougeron_step(req)
    with pytest.raises(CertificateInvalid):
        ann_coker_step(req, parse_polynomial("x^2", sp), [[parse_polynomial("2", sp)]])


def test_quotient_lift():
    c = VarContext(("x1", "x2"), ("y",))
    res = tougeron_step(request(["y - x1 - x1^3"], ["x1"], "x1^3", 6, c, "x2"))
    assert res.verify()
    assert all(ct.holds and ct.verify() for ct in res.quotient_certificates)


def test_general_filtration_exact_prefix():
    c = VarContext(("x1", "x2"), ("y",))
    sys = PolySystem.from_text(c, ["y - x1^2"])
    A = parse_filtration("scaled((x1,x2)^2, m, j)", ["x1", "x2"])
    g = lift_general_filtration(sys, [parse_polynomial("x1^2", c.x_space)], A, 3, 6)
    assert all(w.is_zero() for w in g.shift_solution)
    assert g.verify()


@pytest.mark.parametrize("N, prefix", [(0, "1 + 1/2*x"), (1, "1 + 1/2*x - 1/8*x^2 + 1/16*x^3")])
def test_general_filtration_even_powers(N, prefix):
    sys = PolySystem.from_text(CX, ["y^2 - 1 - x"])
    A = parse_filtration("powers(m, 2*j)", ["x"])
    g = lift_general_filtration(sys, [parse_polynomial(prefix, ["x"])], A, N, 8)
    assert g.verify()
    diff = g.y_solution[0] - parse_polynomial(prefix, ["x"]).at_order(8)
    assert diff.ord() >= 2 * (N + 1)
    oracle = series_by_coefficients(y**2 - 1 - x, 8, 1)
    assert to_fraction_terms(g.y_solution[0]) == oracle


def test_general_filtration_empty_tail():
    sys = PolySystem.from_text(CX, ["y^2 - 1 - x"])
    A = Filtration(_ZeroTail(), ("x",))
    with pytest.raises(PrefixNotApproximate):
        lift_general_filtration(sys, [parse_polynomial("1", ["x"])], A, 1, 6)


class _ZeroTail:
    """m^j for j <= 1, then the zero ideal."""

    def at(self, j):
        return MonomialIdeal.unit(("x",)) if j == 0 else \
            MonomialIdeal.maximal(("x",)) if j == 1 else MonomialIdeal.zero(("x",))


# -- properties ---------------------------------------------------------------------------

def test_substitution_identity_random():
    # J * (h * M * z) = h^2 * z, the step that turns F(y0 + dy) into h^2 (z + ...)
    rng = random.Random(3)
    for _ in range(40):
        s, n = rng.randint(1, 2), rng.randint(1, 3)
        sys, start = random_system(rng, s, n)
        d = jacobian_y(sys, start, 8)
        sp = d.h.space
        z = [Jet(sp, {(rng.randint(0, 2), rng.randint(0, 2)): rng.randint(-3, 3)}, 8)
             for _ in range(s)]
        dy = [d.h * w for w in mat_vec(d.M, z)]
        lhs = mat_vec(d.J, dy)
        assert all(a.terms == (d.h * d.h * b).terms for a, b in zip(lhs, z))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2), st.lists(st.integers(-3, 3), min_size=1, max_size=3),
       st.lists(st.integers(-3, 3), min_size=1, max_size=3))
def test_linear_equations_match_oracle(e, ucoef, vcoef):
    # F = u(x) y - v(x) with u = x^e (1 + ...); h = u^2, so v needs x^(4e+1)
    u = x**e * (1 + sum(c * x ** (k + 1) for k, c in enumerate(ucoef)))
    v = x ** (4 * e + 1) * (sum(c * x ** k for k, c in enumerate(vcoef)) + 1)
    text = str(sympy.expand(u * y - v)).replace("**", "^")
    res = tougeron_step(request([text], ["0"], f"x^{4 * e + 1}", 6))
    assert to_fraction_terms(res.y_solution[0]) == sympy_series(v / u, 6)
    assert res.verify()


@settings(max_examples=15, deadline=None)
@given(st.lists(st.integers(-2, 2), min_size=1, max_size=3))
def test_newton_progress(coefs):
    a = 1 + sum(c * x ** (k + 1) for k, c in enumerate(coefs))
    F = sympy.expand(y**2 + x * y - a)
    if sympy.Poly(F, x, y).coeff_monomial(1) != -1:
        return
    res = tougeron_step(request([str(F).replace("**", "^")], ["1"], "x", 10))
    diffs = [min((b - a).ord() for a, b in zip(p, q)) for p, q in zip(res.z_trace, res.z_trace[1:])]
    assert all(d2 > d1 for d1, d2 in zip(diffs, diffs[1:]))
    assert res.iterations <= 10 + 2
    assert all(r.is_zero() for r in evaluate(res.sys, res.y_solution))
