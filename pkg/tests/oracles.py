"""Independent reference computations used by the tests.

Nothing here calls into the engine's algorithms: ideals are compared as sets
of monomials up to a degree bound, and series are solved by undetermined
coefficients with sympy.
"""
from fractions import Fraction
from itertools import product

import sympy


def monomials_up_to(nvars, max_deg):
    return [m for m in product(range(max_deg + 1), repeat=nvars) if sum(m) <= max_deg]


def divides(a, b):
    return all(x <= y for x, y in zip(a, b))


def ideal_set(gens, nvars, max_deg):
    """All monomials of degree <= max_deg in the ideal generated by ``gens``."""
    return {m for m in monomials_up_to(nvars, max_deg) if any(divides(g, m) for g in gens)}


def product_set(gens_a, gens_b, nvars, max_deg):
    # m is in I*J iff m = u*v with u in I and v in J
    out = set()
    for m in monomials_up_to(nvars, max_deg):
        for u in product(*(range(e + 1) for e in m)):
            v = tuple(e - f for e, f in zip(m, u))
            if any(divides(g, u) for g in gens_a) and any(divides(g, v) for g in gens_b):
                out.add(m)
                break
    return out


def series_by_coefficients(equation, order, start):
    """Solve F(x, y) = 0 for y = sum a_k x^k with a_0 = ``start`` by matching coefficients.

    ``equation`` is a sympy expression in symbols x, y.  Returns {k: Fraction}.
    """
    x, y = sympy.symbols("x y")
    coeffs = sympy.symbols(f"a1:{order + 1}")
    ansatz = start + sum(c * x ** (k + 1) for k, c in enumerate(coeffs))
    expr = sympy.expand(equation.subs(y, ansatz))
    poly = sympy.Poly(expr, x)
    known = {}
    for k in range(1, order + 1):
        eq = poly.coeff_monomial(x ** k).subs(known)
        sol = sympy.solve(eq, coeffs[k - 1])
        known[coeffs[k - 1]] = sol[0]
    out = {0: Fraction(start)}
    for k, c in enumerate(coeffs, start=1):
        v = sympy.Rational(known[c])
        out[k] = Fraction(int(v.p), int(v.q))
    return {k: v for k, v in out.items() if v != 0}


def to_fraction_terms(jet):
    return {m[0]: c for m, c in jet.terms.items()}
