"""Exact truncated multivariate power series ("jets") over the rationals.

A jet lives in a ``Space``: an ordered tuple of graded variables plus an
optional tuple of parameters.  Parameters have degree zero -- truncation and
``ord`` look only at the graded variables -- which is how a homotopy parameter
``t`` rides along as a coefficient.

Every jet carries its reliable truncation ``order``.  A jet flagged ``exact``
is a genuine polynomial: nothing was ever truncated away, so it may be viewed
at any larger order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import (ContextMismatch, IllFormedComposition, InsufficientOrder,
                     NotDivisible, UnknownVariable)

Monomial = tuple  # exponents, one per name of the ambient Space


@dataclass(frozen=True)
class Space:
    vars: tuple[str, ...]
    params: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "vars", tuple(self.vars))
        object.__setattr__(self, "params", tuple(self.params))
        if len(set(self.names)) != len(self.names):
            raise ContextMismatch(f"repeated variable names in {self.names}")

    @property
    def names(self) -> tuple[str, ...]:
        return self.vars + self.params

    @property
    def width(self) -> int:
        return len(self.vars) + len(self.params)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise UnknownVariable(name) from None

    def degree(self, mono: Monomial) -> int:
        return sum(mono[:len(self.vars)])

    def unit(self) -> Monomial:
        return (0,) * self.width

    def gen(self, name: str, power: int = 1) -> Monomial:
        e = [0] * self.width
        e[self.index(name)] = power
        return tuple(e)

    def sort_key(self, mono: Monomial):
        # graded lex on the graded part (x1 > x2 > ...), parameters last
        nv = len(self.vars)
        return (sum(mono[:nv]), tuple(-e for e in mono[:nv]), mono[nv:])

    def __str__(self):
        s = ", ".join(self.vars)
        if self.params:
            s += "; " + ", ".join(self.params)
        return f"[{s}]"


def _coerce(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    raise TypeError(f"coefficients must be int or Fraction, got {type(c).__name__}")


class Jet:
    """A truncated power series with exact rational coefficients."""

    __slots__ = ("space", "order", "terms", "exact")

    def __init__(self, space: Space, terms: Mapping[Monomial, object] | None = None,
                 order: int = 0, exact: bool = False):
        if order < 0:
            raise ValueError("jet order must be non-negative")
        clean = {}
        for mono, c in (terms or {}).items():
            mono = tuple(mono)
            if len(mono) != space.width or min(mono, default=0) < 0:
                raise ContextMismatch(f"monomial {mono} does not fit {space}")
            c = _coerce(c)
            if c == 0:
                continue
            if space.degree(mono) > order:
                exact = False
                continue
            clean[mono] = clean.get(mono, 0) + c
        self.space = space
        self.order = order
        self.terms = {m: c for m, c in clean.items() if c != 0}
        self.exact = bool(exact)

    @classmethod
    def _raw(cls, space, terms, order, exact):
        j = cls.__new__(cls)
        j.space, j.terms, j.order, j.exact = space, terms, order, exact
        return j

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, space: Space, order: int, exact: bool = True) -> "Jet":
        return cls._raw(space, {}, order, exact)

    @classmethod
    def constant(cls, space: Space, c, order: int) -> "Jet":
        return cls(space, {space.unit(): c}, order, exact=True)

    @classmethod
    def variable(cls, space: Space, name: str, order: int = 1) -> "Jet":
        mono = space.gen(name)
        return cls(space, {mono: 1}, max(order, space.degree(mono)), exact=True)

    @classmethod
    def monomial(cls, space: Space, mono: Monomial, coeff=1, order: int | None = None) -> "Jet":
        d = space.degree(mono)
        return cls(space, {mono: coeff}, d if order is None else max(order, d), exact=True)

    # -- basic queries ------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        return max((self.space.degree(m) for m in self.terms), default=0)

    def ord(self):
        """Lowest graded degree among the stored terms; ``math.inf`` for zero."""
        if not self.terms:
            return math.inf
        return min(self.space.degree(m) for m in self.terms)

    def coeff(self, mono: Monomial) -> Fraction:
        return self.terms.get(tuple(mono), Fraction(0))

    def constant_term(self) -> "Jet":
        """The degree-zero part (a polynomial in the parameters only)."""
        sp = self.space
        return Jet._raw(sp, {m: c for m, c in self.terms.items() if sp.degree(m) == 0},
                        self.order, True)

    def homogeneous(self, d: int) -> dict:
        sp = self.space
        return {m: c for m, c in self.terms.items() if sp.degree(m) == d}

    def lowest_form(self) -> dict:
        e = self.ord()
        return {} if e == math.inf else self.homogeneous(e)

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda mc: self.space.sort_key(mc[0]))

    # -- order bookkeeping --------------------------------------------------

    def at_order(self, order: int) -> "Jet":
        """View the jet at another order.  Raising the order needs ``exact``."""
        if order == self.order:
            return self
        if order > self.order:
            if not self.exact:
                raise InsufficientOrder(
                    f"jet known to order {self.order}, requested {order}",
                    have=self.order, need=order)
            return Jet._raw(self.space, self.terms, order, True)
        sp = self.space
        kept = {m: c for m, c in self.terms.items() if sp.degree(m) <= order}
        return Jet._raw(sp, kept, order, self.exact and len(kept) == len(self.terms))

    def with_space(self, space: Space) -> "Jet":
        """Re-home the jet in a space with the same names (used after renaming)."""
        if space.width != self.space.width:
            raise ContextMismatch(f"{self.space} vs {space}")
        return Jet._raw(space, self.terms, self.order, self.exact)

    # -- arithmetic -----------------------------------------------------------

    def _lift(self, other) -> "Jet":
        if isinstance(other, Jet):
            if other.space != self.space:
                raise ContextMismatch(f"{self.space} vs {other.space}")
            return other
        return Jet.constant(self.space, other, self.order)

    def __add__(self, other):
        other = self._lift(other)
        order = min(self.order, other.order)
        a, b = self.at_order(order) if self.order > order else self, \
            other.at_order(order) if other.order > order else other
        out = dict(a.terms)
        for m, c in b.terms.items():
            v = out.get(m, 0) + c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return Jet._raw(self.space, out, order, a.exact and b.exact)

    __radd__ = __add__

    def __neg__(self):
        return Jet._raw(self.space, {m: -c for m, c in self.terms.items()},
                        self.order, self.exact)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, Jet):
            c = _coerce(other)
            if c == 0:
                return Jet._raw(self.space, {}, self.order, self.exact)
            return Jet._raw(self.space, {m: v * c for m, v in self.terms.items()},
                            self.order, self.exact)
        other = self._lift(other)
        order = min(self.order, other.order)
        terms, dropped = _mul_terms(self.space, self.terms, other.terms, order)
        return Jet._raw(self.space, terms, order,
                        self.exact and other.exact and not dropped)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power of a jet")
        result = Jet.constant(self.space, 1, self.order)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if not isinstance(other, Jet):
            return NotImplemented
        return (self.space == other.space and self.order == other.order
                and self.terms == other.terms)

    def __hash__(self):
        return hash((self.space, self.order, frozenset(self.terms.items())))

    def same_value(self, other: "Jet") -> bool:
        """Equality at the smaller of the two orders."""
        n = min(self.order, other.order)
        return self.at_order(n).terms == other.at_order(n).terms

    # -- calculus -------------------------------------------------------------

    def partial(self, name: str) -> "Jet":
        i = self.space.index(name)
        out = {}
        for m, c in self.terms.items():
            if m[i]:
                mm = m[:i] + (m[i] - 1,) + m[i + 1:]
                out[mm] = c * m[i]
        graded = i < len(self.space.vars)
        order = max(self.order - 1, 0) if graded else self.order
        return Jet._raw(self.space, out, order, self.exact)

    # -- text -----------------------------------------------------------------

    def to_expr(self) -> str:
        return format_terms(self.space, self.terms)

    def to_text(self) -> str:
        s = f"{self.to_expr()} ; order: {self.order}"
        return s + " ; exact" if self.exact else s

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"Jet({self.to_text()!r}, space={self.space})"


def _mul_terms(space: Space, ta: dict, tb: dict, order: int):
    nv = len(space.vars)
    bl = sorted(((sum(m[:nv]), m, c) for m, c in tb.items()), key=lambda t: t[0])
    out: dict = {}
    dropped = False
    for ma, ca in ta.items():
        room = order - sum(ma[:nv])
        for db, mb, cb in bl:
            if db > room:
                dropped = True
                break
            m = tuple(p + q for p, q in zip(ma, mb))
            out[m] = out.get(m, 0) + ca * cb
    return {m: c for m, c in out.items() if c}, dropped


def _fmt_rational(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_monomial(space: Space, mono: Monomial) -> str:
    parts = []
    for name, e in zip(space.names, mono):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


def format_terms(space: Space, terms: Mapping[Monomial, Fraction]) -> str:
    items = sorted(terms.items(), key=lambda mc: space.sort_key(mc[0]))
    if not items:
        return "0"
    out = []
    for k, (m, c) in enumerate(items):
        mono = format_monomial(space, m)
        a = abs(c)
        if not mono:
            body = _fmt_rational(a)
        elif a == 1:
            body = mono
        else:
            body = f"{_fmt_rational(a)}*{mono}"
        if k == 0:
            out.append(("-" if c < 0 else "") + body)
        else:
            out.append((" - " if c < 0 else " + ") + body)
    return "".join(out)


# -- module-level operations ------------------------------------------------------

def add(a: Jet, b: Jet) -> Jet:
    return a + b


def sub(a: Jet, b: Jet) -> Jet:
    return a - b


def mul(a: Jet, b: Jet) -> Jet:
    return a * b


def ord_(a: Jet):
    return a.ord()


def partial_derivative(a: Jet, var: str) -> Jet:
    return a.partial(var)


def common_order(jets: Iterable[Jet]) -> int | None:
    """Smallest order among the non-exact jets, or None if all are exact."""
    orders = [j.order for j in jets if not j.exact]
    return min(orders) if orders else None


def substitute(p: Jet, assignment: Mapping[str, Jet], target: Space | None = None) -> Jet:
    """Compose ``p`` with the given assignment, name -> jet in ``target``.

    Names of ``p`` that are not assigned must exist in ``target`` and are
    mapped to themselves.  When ``p`` is truncated (not exact) every graded
    variable must be sent to a jet without constant term.
    """
    if target is None:
        spaces = {j.space for j in assignment.values()}
        if len(spaces) != 1:
            raise ContextMismatch("assignment jets must share one space")
        target = spaces.pop()
    for name, j in assignment.items():
        p.space.index(name)
        if j.space != target:
            raise ContextMismatch(f"assignment for {name} lives in {j.space}, expected {target}")

    images = []
    for name in p.space.names:
        if name in assignment:
            images.append(assignment[name])
        elif name in target.names:
            images.append(Jet.variable(target, name, 1))
        else:
            raise ContextMismatch(f"variable {name} is neither assigned nor present in {target}")

    if not p.exact:
        nv = len(p.space.vars)
        for name, img in zip(p.space.names[:nv], images[:nv]):
            if not img.constant_term().is_zero():
                raise IllFormedComposition(
                    f"{name} is sent to a jet with nonzero constant term "
                    f"but the outer series is truncated")

    order = common_order(images)
    if not p.exact:
        order = p.order if order is None else min(order, p.order)
    all_exact = order is None
    if all_exact:
        # exact composition: bound the result degree, no truncation happens
        bound = 0
        for m in p.terms:
            bound = max(bound, sum(e * img.degree() for e, img in zip(m, images)))
        order = max([bound, p.order] + [img.order for img in images])

    images = [img.at_order(order) for img in images]
    cache: dict = {}

    def power(i, e):
        key = (i, e)
        if key not in cache:
            cache[key] = images[i] if e == 1 else power(i, e - 1) * images[i]
        return cache[key]

    acc: dict = {}
    for m, c in p.terms.items():
        term = None
        for i, e in enumerate(m):
            if e:
                term = power(i, e) if term is None else term * power(i, e)
        if term is None:
            acc[target.unit()] = acc.get(target.unit(), 0) + c
            continue
        for mm, cc in term.terms.items():
            acc[mm] = acc.get(mm, 0) + c * cc
    return Jet(target, acc, order, exact=all_exact and p.exact)


def _exact_divide_poly(num: dict, den: dict) -> dict | None:
    """Exact multivariate division (lex order); None when a remainder is left."""
    lead = max(den)
    lc = den[lead]
    rem = dict(num)
    quo = {}
    while rem:
        m = max(rem)
        diff = tuple(a - b for a, b in zip(m, lead))
        if min(diff) < 0:
            return None
        qc = rem[m] / lc
        quo[diff] = qc
        for dm, dc in den.items():
            t = tuple(a + b for a, b in zip(diff, dm))
            v = rem.get(t, 0) - qc * dc
            if v:
                rem[t] = v
            else:
                rem.pop(t, None)
    return quo


def divide_exact(f: Jet, h: Jet, target_order: int) -> Jet:
    """Return q with q*h = f modulo degree ``target_order + ord(h) + 1``.

    Solved degree by degree: the degree-d part of q is the exact quotient of
    the degree-(d+e) part of the running remainder by the lowest form of h.
    """
    if f.space != h.space:
        raise ContextMismatch(f"{f.space} vs {h.space}")
    if h.is_zero():
        raise ZeroDivisionError("division by the zero jet")
    sp = f.space
    e = h.ord()
    need = target_order + e
    if f.order < need:
        if not f.exact:
            raise InsufficientOrder(
                f"dividend known to order {f.order}, division to order {target_order} "
                f"by a jet of order {e} needs {need}", have=f.order, need=need)
        f = f.at_order(need)
    if h.order < need:
        if not h.exact:
            raise InsufficientOrder(
                f"divisor known to order {h.order}, needs {need}", have=h.order, need=need)
        h = h.at_order(need)
    for m in f.terms:
        if sp.degree(m) < e:
            raise NotDivisible(min(sp.degree(mm) for mm in f.terms))
    low = h.homogeneous(e)
    rem = {m: c for m, c in f.terms.items() if sp.degree(m) <= need}
    q: dict = {}
    for d in range(target_order + 1):
        comp = {m: c for m, c in rem.items() if sp.degree(m) == d + e}
        if not comp:
            continue
        qd = _exact_divide_poly(comp, low)
        if qd is None:
            raise NotDivisible(d + e)
        q.update(qd)
        for mq, cq in qd.items():
            for mh, ch in h.terms.items():
                t = tuple(a + b for a, b in zip(mq, mh))
                if sp.degree(t) > need:
                    continue
                v = rem.get(t, 0) - cq * ch
                if v:
                    rem[t] = v
                else:
                    rem.pop(t, None)
    exact = False
    if f.exact and h.exact:
        prod, _ = _mul_terms(sp, q, h.terms, 10 ** 9)
        exact = prod == f.terms and all(sp.degree(m) <= target_order for m in q)
    return Jet(sp, q, target_order, exact=exact)
