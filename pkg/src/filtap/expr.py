"""Text format for polynomials, jets, monomial ideals and filtration rules.

Polynomial grammar (``^`` binds tighter than ``*``, which binds tighter than
``+``/``-``; unary minus applies to a whole power)::

    expr    := term (("+" | "-") term)*
    term    := unary ("*" unary)*
    unary   := ("-" | "+") unary | power
    power   := atom ("^" INT)?
    atom    := INT ("/" INT)? | NAME | "(" expr ")"

There is no implicit multiplication, no floating point, and ``/`` only
appears inside a rational literal.  Jets append ``; order: N`` and optionally
``; exact``.  Ideals are comma-separated monomials.  Filtration rules::

    rule    := powers(I, AFF) | fixed(I) | scaled(I, I, AFF)
             | sum(rule, ...) | prod(rule, ...) | cap(rule, ...) | I
    I       := factor ("*" factor)*
    factor  := "(" monomial, ... ")" ("^" INT)? | m
    AFF     := affine expression in j, e.g. "j", "2*j+1", "3"

where ``m`` (unless it is a declared variable) is the maximal ideal.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import (ExprSyntaxError, InputError, NegativeExponent, NotAMonomial,
                     UnknownVariable)
from .ideal import (Affine, Filtration, Fixed, IntersectionRule, MonomialIdeal,
                    Powers, ProductRule, Scaled, SumRule)
from .jet import Jet, Space

NAME_RE = re.compile(r"[a-zA-Z][a-zA-Z0-9_]*\Z")
_BIG = 10 ** 9

_TOKEN_RE = re.compile(r"\s*(?:(\d+)|([a-zA-Z][a-zA-Z0-9_]*)|(.))")


@dataclass(frozen=True)
class VarContext:
    x_vars: tuple = ()
    y_vars: tuple = ()
    t_var: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "x_vars", tuple(self.x_vars))
        object.__setattr__(self, "y_vars", tuple(self.y_vars))
        names = self.all_names
        for n in names:
            if not isinstance(n, str) or not NAME_RE.match(n):
                raise InputError(f"bad variable name {n!r}")
        if len(set(names)) != len(names):
            raise InputError(f"variable names must be unique: {names}")

    @property
    def all_names(self) -> tuple:
        return self.x_vars + self.y_vars + ((self.t_var,) if self.t_var else ())

    @property
    def params(self) -> tuple:
        return (self.t_var,) if self.t_var else ()

    @property
    def x_space(self) -> Space:
        return Space(self.x_vars, self.params)

    @property
    def full_space(self) -> Space:
        return Space(self.x_vars + self.y_vars, self.params)

    def with_y(self, y_vars) -> "VarContext":
        return VarContext(self.x_vars, tuple(y_vars), self.t_var)

    def with_t(self, t_var) -> "VarContext":
        return VarContext(self.x_vars, self.y_vars, t_var)


def tokenize(text: str):
    toks = []
    pos = 0
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        if m is None:  # only trailing whitespace
            break
        if m.group(1) is not None:
            toks.append(("INT", m.group(1), m.start(1)))
        elif m.group(2) is not None:
            toks.append(("NAME", m.group(2), m.start(2)))
        elif m.group(3) is not None:
            ch = m.group(3)
            if ch not in "+-*^/(),;:":
                raise ExprSyntaxError(f"unexpected character {ch!r}", m.start(3))
            toks.append((ch, ch, m.start(3)))
        pos = m.end()
    toks.append(("EOF", "", n))
    return toks


class _Parser:
    def __init__(self, text: str, space: Space):
        self.text = text
        self.space = space
        self.toks = tokenize(text)
        self.i = 0

    # token helpers
    def peek(self, k=0):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def take(self, kind=None):
        tok = self.peek()
        if kind is not None and tok[0] != kind:
            what = "end of input" if tok[0] == "EOF" else repr(tok[1])
            raise ExprSyntaxError(f"expected {kind!r}, found {what}", tok[2])
        self.i += 1
        return tok

    def at(self, kind):
        return self.peek()[0] == kind

    def fail(self, msg=None):
        tok = self.peek()
        what = "end of input" if tok[0] == "EOF" else repr(tok[1])
        raise ExprSyntaxError(msg or f"unexpected {what}", tok[2])

    # polynomials
    def const(self, c) -> Jet:
        return Jet.constant(self.space, c, _BIG)

    def expr(self) -> Jet:
        acc = self.term()
        while self.peek()[0] in "+-" and self.peek()[0] != "EOF":
            op = self.take()[0]
            rhs = self.term()
            acc = acc + rhs if op == "+" else acc - rhs
        return acc

    def term(self) -> Jet:
        acc = self.unary()
        while self.at("*"):
            self.take()
            acc = acc * self.unary()
        return acc

    def unary(self) -> Jet:
        if self.at("-"):
            self.take()
            return -self.unary()
        if self.at("+"):
            self.take()
            return self.unary()
        return self.power()

    def exponent(self) -> int:
        tok = self.peek()
        if tok[0] == "-":
            raise NegativeExponent("negative exponent", tok[2])
        return int(self.take("INT")[1])

    def power(self) -> Jet:
        base = self.atom()
        if self.at("^"):
            self.take()
            base = base ** self.exponent()
            if self.at("^"):
                self.fail("chained exponents are not allowed")
        return base

    def atom(self) -> Jet:
        tok = self.peek()
        if tok[0] == "INT":
            self.take()
            num = int(tok[1])
            if self.at("/"):
                self.take()
                dtok = self.take("INT")
                den = int(dtok[1])
                if den == 0:
                    raise ExprSyntaxError("zero denominator", dtok[2])
                return self.const(Fraction(num, den))
            return self.const(num)
        if tok[0] == "NAME":
            self.take()
            if tok[1] not in self.space.names:
                raise UnknownVariable(tok[1], tok[2])
            return Jet.variable(self.space, tok[1], _BIG)
        if tok[0] == "(":
            self.take()
            inner = self.expr()
            self.take(")")
            return inner
        self.fail()

    def finish(self):
        if not self.at("EOF"):
            self.fail()

    # ideals
    def monomial_item(self):
        start = self.peek()[2]
        p = self.expr()
        items = list(p.terms.items())
        if len(items) != 1 or items[0][1] != 1:
            raise NotAMonomial("not a monomial with unit coefficient", start)
        mono = items[0][0]
        if any(mono[len(self.space.vars):]):
            raise NotAMonomial("ideal generators may not involve parameters", start)
        return mono[:len(self.space.vars)]

    def monomial_list(self, closer):
        gens = []
        if self.at(closer):
            return gens
        gens.append(self.monomial_item())
        while self.at(","):
            self.take()
            gens.append(self.monomial_item())
        return gens

    def ideal_factor(self) -> MonomialIdeal:
        vars = self.space.vars
        tok = self.peek()
        if tok[0] == "NAME" and tok[1] == "m" and "m" not in self.space.names:
            self.take()
            ideal = MonomialIdeal.maximal(vars)
        elif tok[0] == "(":
            self.take()
            ideal = MonomialIdeal(vars, self.monomial_list(")"))
            self.take(")")
        else:
            self.fail("expected an ideal such as (x1, x2)")
        if self.at("^"):
            self.take()
            ideal = ideal ** self.exponent()
        return ideal

    def ideal_expr(self) -> MonomialIdeal:
        acc = self.ideal_factor()
        while self.at("*"):
            self.take()
            acc = acc * self.ideal_factor()
        return acc

    # filtration rules
    def affine(self) -> Affine:
        a = b = 0
        first = True
        while True:
            sign = 1
            if self.peek()[0] in "+-":
                sign = -1 if self.take()[0] == "-" else 1
            elif not first:
                break
            first = False
            tok = self.peek()
            if tok[0] == "INT":
                self.take()
                k = int(tok[1])
                if self.at("*"):
                    self.take()
                    jt = self.take("NAME")
                    if jt[1] != "j":
                        raise ExprSyntaxError("index variable must be j", jt[2])
                    a += sign * k
                else:
                    b += sign * k
            elif tok[0] == "NAME" and tok[1] == "j":
                self.take()
                a += sign
            else:
                self.fail("expected an affine index such as 2*j+1")
            if self.peek()[0] not in "+-":
                break
        return Affine(a, b)

    def rule(self):
        tok = self.peek()
        if tok[0] == "NAME" and self.peek(1)[0] == "(" and tok[1] in _RULES:
            self.take()
            self.take("(")
            kind = tok[1]
            if kind == "powers":
                ideal = self.ideal_expr()
                self.take(",")
                out = Powers(ideal, self.affine())
            elif kind == "fixed":
                out = Fixed(self.ideal_expr())
            elif kind == "scaled":
                base = self.ideal_expr()
                self.take(",")
                ideal = self.ideal_expr()
                self.take(",")
                out = Scaled(base, ideal, self.affine())
            else:
                parts = [self.rule()]
                while self.at(","):
                    self.take()
                    parts.append(self.rule())
                out = _RULES[kind](tuple(parts))
            self.take(")")
            return out
        return Fixed(self.ideal_expr())


_RULES = {"powers": None, "fixed": None, "scaled": None,
          "sum": SumRule, "prod": ProductRule, "cap": IntersectionRule}


def _space_of(ctx) -> Space:
    if isinstance(ctx, Space):
        return ctx
    if isinstance(ctx, VarContext):
        return ctx.full_space
    return VarContext(tuple(ctx)).full_space


def parse_polynomial(text: str, ctx, order: int | None = None) -> Jet:
    """Parse ``text`` into an exact jet (a polynomial).

    ``ctx`` is a VarContext (all of its variables are allowed), a Space, or a
    plain sequence of variable names.  The jet's order is its degree unless
    a larger working ``order`` is requested.
    """
    p = _Parser(text, _space_of(ctx))
    poly = p.expr()
    p.finish()
    deg = poly.degree()
    return Jet(poly.space, poly.terms, max(deg, order or 0), exact=True)


def parse_jet(text: str, ctx) -> Jet:
    """Inverse of ``Jet.to_text``: ``<expr> ; order: N [; exact]``."""
    space = _space_of(ctx)
    p = _Parser(text, space)
    poly = p.expr()
    p.take(";")
    key = p.take("NAME")
    if key[1] != "order":
        raise ExprSyntaxError("expected 'order'", key[2])
    p.take(":")
    order = int(p.take("INT")[1])
    exact = False
    if p.at(";"):
        p.take()
        flag = p.take("NAME")
        if flag[1] != "exact":
            raise ExprSyntaxError("expected 'exact'", flag[2])
        exact = True
    p.finish()
    if poly.degree() > order:
        raise ExprSyntaxError(f"terms exceed the declared order {order}", 0)
    return Jet(space, poly.terms, order, exact)


def _strip_outer_parens(toks) -> bool:
    if toks[0][0] != "(":
        return False
    depth = 0
    for k, tok in enumerate(toks[:-1]):
        if tok[0] == "(":
            depth += 1
        elif tok[0] == ")":
            depth -= 1
            if depth == 0:
                return k == len(toks) - 2
    return False


def parse_monomial_ideal(text: str, ctx) -> MonomialIdeal:
    """Comma-separated monomials, optionally wrapped in one pair of parentheses."""
    space = _space_of(ctx)
    space = Space(space.vars, space.params)
    p = _Parser(text, space)
    if _strip_outer_parens(p.toks):
        p.take("(")
        gens = p.monomial_list(")")
        p.take(")")
    else:
        gens = p.monomial_list("EOF")
    p.finish()
    return MonomialIdeal(space.vars, gens)


def parse_ideal_expr(text: str, ctx) -> MonomialIdeal:
    p = _Parser(text, _space_of(ctx))
    ideal = p.ideal_expr()
    p.finish()
    return ideal


def parse_rule(text: str, ctx):
    p = _Parser(text, _space_of(ctx))
    rule = p.rule()
    p.finish()
    return rule


def parse_filtration(text: str, ctx, j_max: int = 8) -> Filtration:
    space = _space_of(ctx)
    return Filtration(parse_rule(text, space), space.vars, j_max)


def serialize_polynomial(p: Jet) -> str:
    return p.to_expr()


def serialize_jet(p: Jet) -> str:
    return p.to_text()


def serialize_ideal(I: MonomialIdeal) -> str:
    return I.to_text()


def parse_jets(texts: Sequence[str], ctx, order: int | None = None) -> list[Jet]:
    """Parse a list of polynomial texts into exact jets of a common order."""
    jets = [parse_polynomial(t, ctx) for t in texts]
    top = max([j.order for j in jets] + [order or 0])
    return [j.at_order(top) for j in jets]
